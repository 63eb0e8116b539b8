#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "mhdbl/field.hpp"

using namespace mhdbl;

namespace {

RMat random_physical(const Grid& g, std::mt19937_64& rng) {
  std::normal_distribution<double> d;
  RMat p(g.n(), g.n_modes());
  for (Eigen::Index i = 0; i < p.size(); ++i) p.data()[i] = d(rng);
  return p;
}

}  // namespace

TEST(Spectral, RoundTripAndConvention) {
  const Grid g(12, 3.0, Stretching::uniform(), 16);
  const Spectral sp(g);
  // cos(3x) has coefficients 1/2 at k = +-3
  RMat p(g.n(), g.n_modes());
  for (int i = 0; i < g.n(); ++i)
    for (int j = 0; j < g.n_modes(); ++j) p(i, j) = std::cos(3 * sp.x(j)) * (1 + g.z(i));
  const CMat s = sp.to_spectral(p);
  EXPECT_NEAR(s(2, g.slot(3)).real(), 0.5 * (1 + g.z(2)), 1e-14);
  EXPECT_NEAR(s(2, g.slot(-3)).real(), 0.5 * (1 + g.z(2)), 1e-14);
  EXPECT_LT((sp.to_physical(s) - p).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(Spectral, DerivativeOfSine) {
  const Grid g(6, 1.0, Stretching::uniform(), 32);
  const Spectral sp(g);
  RMat p(g.n(), g.n_modes());
  for (int i = 0; i < g.n(); ++i)
    for (int j = 0; j < g.n_modes(); ++j) p(i, j) = std::sin(5 * sp.x(j));
  const RMat d = sp.to_physical(sp.dx(sp.to_spectral(p)));
  for (int j = 0; j < g.n_modes(); ++j) EXPECT_NEAR(d(3, j), 5 * std::cos(5 * sp.x(j)), 1e-12);
}

TEST(Spectral, Parseval) {
  std::mt19937_64 rng(1);
  const Grid g(40, 20.0, Stretching::tanh_cluster(2.0), 24);
  const Spectral sp(g);
  for (int t = 0; t < 5; ++t) {
    const RMat p = random_physical(g, rng);
    const double a = l2_norm2_physical(g, p), b = l2_norm2_modes(g, sp.to_spectral(p));
    EXPECT_LE(std::abs(a - b), 1e-10 * a);
  }
}

TEST(Spectral, RealDataIsConjugateSymmetric) {
  std::mt19937_64 rng(2);
  const Grid g(20, 5.0, Stretching::uniform(), 16);
  const Spectral sp(g);
  const CMat s = sp.to_spectral(random_physical(g, rng));
  EXPECT_LT(sp.conjugate_asymmetry(s), 1e-15);
  CMat t = s;
  t(3, g.slot(-2)) += cplx{0.0, 1.0};
  EXPECT_GT(sp.conjugate_asymmetry(t), 0.5);
  sp.symmetrize(t);
  EXPECT_LT(sp.conjugate_asymmetry(t), 1e-15);
}

TEST(Spectral, Dealias) {
  const Grid g(8, 1.0, Stretching::uniform(), 32);
  const Spectral sp(g);
  EXPECT_EQ(sp.dealias_cutoff(), 10);
  CMat s = CMat::Ones(g.n(), g.n_modes());
  sp.dealias(s);
  for (int j = 0; j < g.n_modes(); ++j)
    EXPECT_EQ(std::abs(s(0, j)) > 0.0, std::abs(g.wavenumber(j)) <= 10) << g.wavenumber(j);
}

TEST(FieldStore, Access) {
  Field f;
  f["u"] = CMat::Zero(3, 2);
  EXPECT_TRUE(f.has("u"));
  EXPECT_FALSE(f.has("b"));
  EXPECT_THROW(f.at("b"), InvalidParameter);
}
