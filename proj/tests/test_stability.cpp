#include <gtest/gtest.h>

#include <cmath>

#include "mhdbl/energy.hpp"
#include "mhdbl/stability.hpp"

using namespace mhdbl;

namespace {

const ShearFlow& zero_profile() {
  static const ShearFlow z = tabulated_profile({{0, 0, 0, 0, 0}, {100, 0, 0, 0, 0}}, "zero");
  return z;
}

}  // namespace

TEST(GrowthRate, PureDiffusionMatchesDirichletSpectrum) {
  const double zm = 10.0;
  const Grid g(201, zm);
  const double mu1 = M_PI * M_PI / (zm * zm);
  // discrete Dirichlet eigenvalue of the 3-point Laplacian, uniform h
  const double h = zm / 200.0;
  const double discrete = 4.0 / (h * h) * std::pow(std::sin(M_PI * h / (2 * zm)), 2);
  const double r = growth_rate(assemble_lp(zero_profile(), 4, g));
  EXPECT_NEAR(r, -discrete, 1e-10);
  EXPECT_NEAR(r, -mu1, 1e-4);
}

TEST(GrowthRate, CriticalBumpUnstable) {
  const Grid g(300, 20.0, Stretching::tanh_cluster(2.0));
  EXPECT_GT(growth_rate(assemble_lp(builtin_profile("critical-bump", 1024.0), 64, g)), 0.0);
}

TEST(GrowthRate, LspBelowEnergyBound) {
  const Grid g(200, 20.0, Stretching::tanh_cluster(2.0));
  const ShearFlow U = builtin_profile("hartmann-like", 1.0);
  const double bound = constants_lsp(weighted_norms(U, 20.0, 2000), 1.0).c_prime;
  for (int k : {1, 4, 16, 64}) EXPECT_LE(growth_rate(assemble_lsp(U, k, g, 1.0)), bound);
}

TEST(Scan, ShiftIdentityExact) {
  const Grid g(150, 20.0, Stretching::tanh_cluster(2.0));
  const ShearFlow U = builtin_profile("critical-bump", 256.0);
  const std::vector<int> ks{4, 8, 16};
  const SpectrumScan lp = scan(ScanModel::LP, U, ks, g);
  ScanCoefficients c;
  c.kappa = 3.25;
  const SpectrumScan d = scan(ScanModel::DampedLP, U, ks, g, c);
  for (std::size_t i = 0; i < ks.size(); ++i) EXPECT_EQ(d.rates[i], lp.rates[i] - 3.25);
}

TEST(Scan, Preconditions) {
  const Grid g(40, 20.0);
  const ShearFlow U = builtin_profile("critical-bump", 1.0);
  EXPECT_THROW(scan(ScanModel::LP, U, {}, g), InvalidParameter);
  EXPECT_THROW(scan(ScanModel::LP, U, {4, 2}, g), InvalidParameter);
  EXPECT_THROW(scan(ScanModel::LP, U, {0, 2}, g), InvalidParameter);
}

TEST(Fit, RecoversExponent) {
  std::vector<int> ks{16, 32, 64, 128, 256};
  std::vector<double> r;
  for (int k : ks) r.push_back(2.5 * std::sqrt(double(k)));
  const PowerLawFit f = fit_power_law(ks, r);
  EXPECT_EQ(f.n_points, 3);
  EXPECT_NEAR(f.p, 0.5, 1e-12);
  EXPECT_NEAR(f.c, 2.5, 1e-12);
  EXPECT_LT(f.residual, 1e-12);
  r = {-1, -2, -3, -4, -5};
  EXPECT_FALSE(fit_power_law(ks, r).valid());
}

TEST(Verdict, Cases) {
  SpectrumScan s;
  s.k_list = {16};
  s.rates = {1.0};
  EXPECT_EQ(verdict(s, 10.0), Verdict::Inconclusive);

  s.k_list = {16, 32, 64, 128, 256};
  s.rates = {4, 5.66, 8, 11.3, 16};
  s.fit = fit_power_law(s.k_list, s.rates);
  EXPECT_EQ(verdict(s, 1e9), Verdict::SobolevIllPosed);

  s.rates = {-1, -2, -3, -4, -5};
  s.fit = fit_power_law(s.k_list, s.rates);
  EXPECT_EQ(verdict(s, 1.0), Verdict::SobolevBounded);
  // bound violated
  s.rates = {3, 3, 3, 3, 3};
  s.fit = fit_power_law(s.k_list, s.rates);
  EXPECT_EQ(verdict(s, 1.0), Verdict::Inconclusive);
  EXPECT_EQ(verdict(s, 3.0), Verdict::SobolevBounded);
  // tail still rising
  s.rates = {1, 1.5, 1.2, 1.1, 2.0};
  s.fit = fit_power_law(s.k_list, s.rates);
  EXPECT_EQ(verdict(s, 100.0), Verdict::Inconclusive);
}

TEST(Verdict, GridDisagreementDemotes) {
  SpectrumScan a, b;
  a.k_list = b.k_list = {16, 32, 64, 128, 256};
  a.rates = {-1, -2, -3, -4, -5};
  b.rates = {-1, -2, -3, -4, -5.5};
  a.fit = fit_power_law(a.k_list, a.rates);
  EXPECT_EQ(verdict(a, 1.0, {}, &a), Verdict::SobolevBounded);
  EXPECT_EQ(verdict(a, 1.0, {}, &b), Verdict::Inconclusive);
}

TEST(Verdict, MonotoneLpNoSqrtGrowth) {
  const Grid g(300, 20.0, Stretching::tanh_cluster(2.0));
  const SpectrumScan s = scan(ScanModel::LP, builtin_profile("hartmann-like", 1.0), {16, 32, 64, 128}, g);
  EXPECT_NE(verdict(s, std::numeric_limits<double>::infinity()), Verdict::SobolevIllPosed);
  for (double r : s.rates) EXPECT_LT(r, 0.0);
}
