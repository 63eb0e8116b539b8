#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "mhdbl/shear.hpp"

using namespace mhdbl;

TEST(Builtin, HartmannLike) {
  const ShearFlow f = builtin_profile(ProfileKind::HartmannLike, 1.0);
  EXPECT_NEAR(f.u(1.0), 0.63212055882855767, 1e-15);
  EXPECT_EQ(builtin_profile(ProfileKind::HartmannLike, 2.0).u_infinity(), 2.0);
  EXPECT_TRUE(f.satisfies_end_conditions(20.0));
}

TEST(Builtin, CriticalBump) {
  const ShearFlow f = builtin_profile("critical-bump", 1.0);
  EXPECT_NEAR(f.d1(1.0), 0.0, 1e-16);
  EXPECT_NEAR(f.d2(1.0), -std::exp(-1.0), 1e-15);
  EXPECT_EQ(f.u_infinity(), 0.0);
  EXPECT_TRUE(f.satisfies_end_conditions(20.0));
}

TEST(Builtin, Errors) {
  EXPECT_THROW(builtin_profile(ProfileKind::HartmannLike, 0.0), InvalidParameter);
  EXPECT_THROW(builtin_profile("parabola", 1.0), InvalidParameter);
}

// Supplied derivatives against centered differences at two resolutions.
TEST(Builtin, DerivativesMatchDifferences) {
  for (auto kind : {ProfileKind::HartmannLike, ProfileKind::CriticalBump, ProfileKind::Linear}) {
    const ShearFlow f = builtin_profile(kind, 1.3);
    double err[2];
    for (int r = 0; r < 2; ++r) {
      const double h = 0.02 / (1 << r);
      double e = 0.0;
      for (double z = 0.1; z < 6.0; z += 0.05) {
        const double d1 = (f.u(z + h) - f.u(z - h)) / (2 * h);
        const double d2 = (f.d1(z + h) - f.d1(z - h)) / (2 * h);
        const double d3 = (f.d2(z + h) - f.d2(z - h)) / (2 * h);
        e = std::max({e, std::abs(d1 - f.d1(z)), std::abs(d2 - f.d2(z))});
        // the cutoff is only C^3, so U''' differences lose an order at its ends
        if (std::abs(z - 2.0) > 0.1 && std::abs(z - 4.0) > 0.1) e = std::max(e, std::abs(d3 - f.d3(z)));
      }
      err[r] = e;
    }
    EXPECT_GE(std::log2(err[0] / err[1]), 1.8) << to_string(kind);
  }
}

TEST(Norms, HartmannLike) {
  const ShearNorms n = weighted_norms(builtin_profile(ProfileKind::HartmannLike, 1.0), 20.0, 2000);
  EXPECT_NEAR(n.d1, 1.0, 1e-14);
  // sup z e^{-z} = 1/e at z = 1
  EXPECT_NEAR(n.z_d1, std::exp(-1.0), 1e-10);
  EXPECT_NEAR(n.z_d2, std::exp(-1.0), 1e-10);
  EXPECT_GT(n.min_d1, 0.0);
}

TEST(Norms, CriticalBumpAgainstBruteForce) {
  const ShearFlow f = builtin_profile(ProfileKind::CriticalBump, 1.0);
  const ShearNorms n = weighted_norms(f, 20.0, 1000);
  // brute-force scan of |z U'(z)| = |z (1 - z) e^{-z}|
  double brute = 0.0, positive_lobe = 0.0;
  for (int i = 0; i <= 2000000; ++i) {
    const double z = 20.0 * i / 2000000.0;
    const double v = z * (1 - z) * std::exp(-z);
    brute = std::max(brute, std::abs(v));
    positive_lobe = std::max(positive_lobe, v);
  }
  EXPECT_NEAR(n.z_d1, brute, 1e-9);
  // local maximum at z = (3 - sqrt 5)/2 is ~0.161; the global sup of the
  // modulus sits on the negative lobe at z = (3 + sqrt 5)/2
  const double zm = (3 - std::sqrt(5.0)) / 2;
  EXPECT_NEAR(positive_lobe, zm * (1 - zm) * std::exp(-zm), 1e-10);
  EXPECT_NEAR(positive_lobe, 0.161, 1e-3);
  const double zp = (3 + std::sqrt(5.0)) / 2;
  EXPECT_NEAR(n.z_d1, std::abs(zp * (1 - zp) * std::exp(-zp)), 1e-10);
  EXPECT_LT(n.min_d1, 0.0);
}

TEST(Norms, LinearFinite) {
  const ShearNorms n = weighted_norms(builtin_profile(ProfileKind::Linear, 1.0), 20.0, 1000);
  for (double v : {n.d1, n.d2, n.z_d1, n.z_d2, n.z_d3}) EXPECT_TRUE(std::isfinite(v));
}

TEST(Norms, MonotoneInSamplesAndHeight) {
  const ShearFlow f = builtin_profile(ProfileKind::CriticalBump, 2.0);
  const ShearNorms a = weighted_norms(f, 10.0, 1000), b = weighted_norms(f, 10.0, 4000),
                   c = weighted_norms(f, 20.0, 4000);
  for (auto [x, y] : {std::pair{a.z_d1, b.z_d1}, {a.z_d2, b.z_d2}, {a.z_d3, b.z_d3}, {a.d2, b.d2}})
    EXPECT_LE(x, y + 1e-15);
  EXPECT_LE(b.z_d3, c.z_d3 + 1e-15);
}

TEST(Norms, Preconditions) {
  const ShearFlow f = builtin_profile(ProfileKind::CriticalBump, 1.0);
  EXPECT_THROW(weighted_norms(f, 20.0, 999), InvalidParameter);
  EXPECT_THROW(weighted_norms(f, 0.0, 1000), InvalidParameter);
}

TEST(Tabulated, CsvRoundTrip) {
  const std::string path = ::testing::TempDir() + "profile.csv";
  {
    std::ofstream out(path);
    out.precision(17);
    out << "# z,U,U',U'',U'''\n";
    for (int i = 0; i <= 400; ++i) {
      const double z = i * 0.05;
      out << z << "," << z * std::exp(-z) << "," << (1 - z) * std::exp(-z) << "," << (z - 2) * std::exp(-z) << ","
          << (3 - z) * std::exp(-z) << "\n";
    }
  }
  const ShearFlow f = load_profile_csv(path);
  EXPECT_NEAR(f.u(1.0), std::exp(-1.0), 1e-12);
  EXPECT_NEAR(f.u(1.025), 1.025 * std::exp(-1.025), 1e-3);
  std::remove(path.c_str());
  EXPECT_THROW(load_profile_csv(path), InvalidParameter);
}
