#include <gtest/gtest.h>

#include <cmath>
#include <memory>
#include <random>

#include <unsupported/Eigen/MatrixFunctions>

#include "mhdbl/evolve.hpp"

using namespace mhdbl;

namespace {

using GridPtr = std::shared_ptr<const Grid>;

GridPtr make_grid(int n, double zm, int m, Stretching st = Stretching::uniform()) {
  return std::make_shared<const Grid>(n, zm, st, m);
}

Field single(const Grid&, const std::string& name, const CMat& m) {
  Field f;
  f[name] = m;
  return f;
}

// Manufactured damped-Prandtl solution u = A(t) sin x g(z), g = sin(pi z / L).
struct Manufactured {
  double L, kappa;
  static double A(double t) { return 1.0 + 0.5 * std::sin(2 * t); }
  static double dA(double t) { return std::cos(2 * t); }
  double g(double z) const { return std::sin(M_PI * z / L); }
  double dg(double z) const { return M_PI / L * std::cos(M_PI * z / L); }
  double d2g(double z) const { return -std::pow(M_PI / L, 2) * g(z); }
  double G(double z) const { return L / M_PI * (1 - std::cos(M_PI * z / L)); }
  double u(double t, double x, double z) const { return A(t) * std::sin(x) * g(z); }
  double source(double t, double x, double z) const {
    const double a = A(t), s = std::sin(x), c = std::cos(x);
    return dA(t) * s * g(z) + a * a * s * c * (g(z) * g(z) - G(z) * dg(z)) + kappa * a * s * (g(z) - d2g(z));
  }
};

SimState manufactured_state(const Manufactured& m, GridPtr g) {
  const Spectral sp(*g);
  RMat p(g->n(), g->n_modes());
  for (int i = 0; i < g->n(); ++i)
    for (int j = 0; j < g->n_modes(); ++j) p(i, j) = m.u(0.0, sp.x(j), g->z(i));
  EvolveCoefficients c;
  c.kappa = m.kappa;
  SimState st = make_state(EvolveModel::DampedPrandtl, g, single(*g, "u", sp.to_spectral(p)), c);
  st.sources["u"] = [m](double t, double x, double z) { return m.source(t, x, z); };
  return st;
}

double manufactured_error(const Manufactured& m, const SimState& st) {
  const Grid& g = *st.grid;
  const Spectral sp(g);
  const RMat p = sp.to_physical(st.field.at("u"));
  double e = 0.0;
  for (int i = 0; i < g.n(); ++i)
    for (int j = 0; j < g.n_modes(); ++j) e = std::max(e, std::abs(p(i, j) - m.u(st.t, sp.x(j), g.z(i))));
  return e;
}

}  // namespace

TEST(Tendency, DampedPrandtlUniformStream) {
  auto g = make_grid(30, 10.0, 8);
  CMat u = CMat::Zero(g->n(), 8);
  u.col(0).setConstant(2.0);
  EvolveCoefficients c;
  c.kappa = 0.7;
  FarField far;
  far.u_inf = [](double, double) { return 2.0; };
  const SimState st = make_state(EvolveModel::DampedPrandtl, g, single(*g, "u", u), c, far);
  const CMat t = Integrator{}.explicit_tendency(st, st.field, 0.0).at("u");
  for (int i = 1; i + 1 < g->n(); ++i) EXPECT_NEAR(std::abs(t(i, 0) + 1.4), 0.0, 1e-13);
  EXPECT_LT(t.rightCols(7).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(Tendency, ZeroStateIsFixed) {
  auto g = make_grid(30, 10.0, 8);
  const CMat z = CMat::Zero(g->n(), 8);
  for (auto m : {EvolveModel::DampedPrandtl, EvolveModel::MixedPS}) {
    SimState st = make_state(m, g, single(*g, "u", z));
    Integrator in;
    for (int s = 0; s < 10; ++s) in.step(st, 0.01);
    EXPECT_EQ(st.field.at("u").cwiseAbs().maxCoeff(), 0.0);
  }
}

TEST(Tendency, MixedPsZeroVelocity) {
  auto g = make_grid(30, 10.0, 8);
  FarField far;
  far.b_inf = [](double, double x) { return 0.4 * std::cos(2 * x); };
  far.p_inf = [](double, double x) { return 0.3 * std::sin(x); };
  EvolveCoefficients c;
  c.nu = 0.5;
  const SimState st = make_state(EvolveModel::MixedPS, g, single(*g, "u", CMat::Zero(g->n(), 8)), c, far);
  const Integrator in;
  const CMat b = Integrator::diagnose_b(st, st.field.at("u"), 0.0, st.field.at("b"));
  // linear interpolant of (0, b_inf)
  for (int i = 0; i < g->n(); ++i) EXPECT_NEAR(std::abs(b(i, g->slot(2)) - 0.2 * g->z(i) / 10.0), 0.0, 1e-13);
  const CMat t = in.explicit_tendency(st, st.field, 0.0).at("u");
  for (int i = 1; i + 1 < g->n(); ++i) {
    // -d_x p: -i * (-0.15 i) = -0.15 at k = 1;  nu d_x b at k = 2: 0.5 * 2i * b
    EXPECT_NEAR(std::abs(t(i, 1) - cplx{-0.15, 0.0}), 0.0, 1e-13);
    EXPECT_NEAR(std::abs(t(i, 2) - 0.5 * kI * 2.0 * b(i, 2)), 0.0, 1e-13);
  }
}

TEST(Tendency, MhdblReferenceStateIsSteady) {
  auto g = make_grid(60, 20.0, 16, Stretching::tanh_cluster(2.0));
  SimState st = make_state(EvolveModel::MHDBL, g, mhdbl_reference_field(*g));
  const auto t = Integrator{}.explicit_tendency(st, st.field, 0.0);
  EXPECT_LT(t.at("u").cwiseAbs().maxCoeff(), 1e-13);
  EXPECT_LT(t.at("phi").cwiseAbs().maxCoeff(), 1e-13);
  const Field f0 = st.field;
  const RunSummary r = run(st, 1.0, {0.01, true});
  EXPECT_FALSE(r.blowup);
  EXPECT_LT((st.field.at("phi") - f0.at("phi")).cwiseAbs().maxCoeff(), 1e-8);
  EXPECT_LT(st.field.at("u").cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Tendency, MhdblWithoutCouplingIsPrandtl) {
  auto g = make_grid(40, 10.0, 16, Stretching::tanh_cluster(1.5));
  std::mt19937_64 rng(2);
  std::normal_distribution<double> d;
  Field f = mhdbl_reference_field(*g);
  const Spectral sp(*g);
  RMat up(g->n(), 16), pp(g->n(), 16);
  for (int i = 0; i < g->n(); ++i)
    for (int j = 0; j < 16; ++j) {
      const double z = g->z(i), x = sp.x(j);
      up(i, j) = z * std::exp(-z) * std::sin(x + 0.3);
      pp(i, j) = -z + 0.2 * z * std::exp(-z) * std::cos(2 * x);
    }
  f["u"] = sp.to_spectral(up);
  f["phi"] = sp.to_spectral(pp);
  EvolveCoefficients c;
  c.s = 0.0;
  c.kappa = 1e-300;
  const SimState m = make_state(EvolveModel::MHDBL, g, f, c);
  Field fp;
  fp["u"] = f["u"];
  const SimState p = make_state(EvolveModel::DampedPrandtl, g, fp, c);
  const CMat a = Integrator{}.explicit_tendency(m, m.field, 0.0).at("u");
  const CMat b = Integrator{}.explicit_tendency(p, p.field, 0.0).at("u");
  EXPECT_LT((a - b).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(Step, HeatKernelDecay) {
  // LP with zero shear is the heat equation; sin(pi z / L) decays at the
  // discrete Dirichlet eigenvalue
  const double L = 10.0;
  auto g = make_grid(101, L, 2);
  CMat u = CMat::Zero(g->n(), 2);
  for (int i = 0; i < g->n(); ++i) u(i, 0) = std::sin(M_PI * g->z(i) / L);
  const ShearFlow zero = tabulated_profile({{0, 0, 0, 0, 0}, {L, 0, 0, 0, 0}});
  SimState st = make_state(EvolveModel::LP, g, single(*g, "u", u), {}, {}, zero);
  run(st, 2.0, {0.01, true});
  const double rate = -std::log(st.field.at("u")(50, 0).real() / u(50, 0).real()) / 2.0;
  EXPECT_NEAR(rate, std::pow(M_PI / L, 2), 0.01 * std::pow(M_PI / L, 2));
}

TEST(Step, RejectsCflViolationUnlessForced) {
  auto g = make_grid(40, 4.0, 8);
  Manufactured m{4.0, 1.0};
  SimState st = manufactured_state(m, g);
  EXPECT_THROW(Integrator{}.step(st, 1.0), InvalidParameter);
  EXPECT_THROW(Integrator{}.step(st, -1.0), InvalidParameter);
  EXPECT_NO_THROW(Integrator{}.step(st, 0.1, true));
}

TEST(Step, WallConditionsHoldExactly) {
  auto g = make_grid(40, 4.0, 8);
  Manufactured m{4.0, 1.0};
  SimState st = manufactured_state(m, g);
  FarField far;
  far.u_inf = [](double t, double) { return 0.1 * t; };
  st.far = far;
  for (int s = 0; s < 5; ++s) {
    Integrator{}.step(st, 0.01, true);
    EXPECT_EQ(st.field.at("u").row(0).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_NEAR(std::abs(st.field.at("u")(g->n() - 1, 0) - 0.1 * st.t), 0.0, 1e-15);
  }
}

TEST(Manufactured, SpatialOrder) {
  Manufactured m{4.0, 1.0};
  double e[2];
  for (int r = 0; r < 2; ++r) {
    SimState st = manufactured_state(m, make_grid(20 * (1 << r) + 1, 4.0, 8));
    run(st, 0.5, {2e-4, true});
    e[r] = manufactured_error(m, st);
  }
  EXPECT_GE(std::log2(e[0] / e[1]), 1.8) << e[0] << " " << e[1];
}

TEST(Manufactured, TemporalOrder) {
  Manufactured m{4.0, 1.0};
  auto g = make_grid(41, 4.0, 8);
  auto final_u = [&](double dt) {
    SimState st = manufactured_state(m, g);
    run(st, 0.5, {dt, true});
    return CMat(st.field.at("u"));
  };
  const CMat ref = final_u(0.05 / 8);
  const double e1 = (final_u(0.05) - ref).cwiseAbs().maxCoeff();
  const double e2 = (final_u(0.025) - ref).cwiseAbs().maxCoeff();
  EXPECT_GE(std::log2(e1 / e2), 1.8) << e1 << " " << e2;
}

TEST(Linear, LspMatchesMatrixExponential) {
  auto g = make_grid(120, 20.0, 4, Stretching::tanh_cluster(2.0));
  const ShearFlow U = builtin_profile("critical-bump", 1.0);
  CMat u = CMat::Zero(g->n(), 4);
  for (int i = 0; i < g->n(); ++i) u(i, 1) = g->z(i) * std::exp(-g->z(i) * g->z(i) / 4);
  SimState st = make_state(EvolveModel::LSP, g, single(*g, "u", u), {}, {}, U);
  run(st, 0.1, {1e-4, true});
  const CMat G = assemble_lsp(U, 1, *g, 1.0).matrix;
  const CVec exact = (0.1 * G).exp() * interior(CVec(u.col(1)));
  const CVec got = interior(CVec(st.field.at("u").col(1)));
  EXPECT_LE((got - exact).norm() / exact.norm(), 1e-4);
}

TEST(Linear, EnergySlopeMatchesGrowthRate) {
  auto g = make_grid(200, 20.0, 4, Stretching::tanh_cluster(2.0));
  const ShearFlow U = builtin_profile("critical-bump", 64.0);
  const int k = 1;
  const LinearOperator op = assemble_lp(U, k, *g);
  Eigen::ComplexEigenSolver<CMat> es(op.matrix);
  Eigen::Index lead = 0;
  es.eigenvalues().real().maxCoeff(&lead);
  const double rate = es.eigenvalues()[lead].real();
  ASSERT_GT(rate, 0.0);
  CMat u = CMat::Zero(g->n(), 4);
  u.col(1) = with_zero_ends(es.eigenvectors().col(lead));
  // add some of everything else so the leading mode must emerge
  for (int i = 1; i + 1 < g->n(); ++i) u(i, 1) += 0.3 * std::exp(-g->z(i));
  SimState st = make_state(EvolveModel::LP, g, single(*g, "u", u), {}, {}, U);
  const double t_decade = std::log(10.0) / (2 * rate);
  run(st, 2.0 / rate, {2e-4, true});
  const double e0 = l2_norm2_modes(*g, st.field.at("u"));
  const double t0 = st.t;
  run(st, t0 + t_decade, {2e-4, true});
  const double slope = std::log(l2_norm2_modes(*g, st.field.at("u")) / e0) / (st.t - t0);
  EXPECT_NEAR(slope, 2 * rate, 0.02 * 2 * rate);
}

TEST(Reality, ConjugateSymmetryPreserved) {
  auto g = make_grid(30, 6.0, 16, Stretching::tanh_cluster(1.5));
  const Spectral sp(*g);
  RMat p(g->n(), 16);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ph(0, 2 * M_PI);
  const double a = ph(rng), b = ph(rng);
  for (int i = 0; i < g->n(); ++i)
    for (int j = 0; j < 16; ++j) {
      const double z = g->z(i);
      p(i, j) = 0.3 * z * std::exp(-z) * (std::sin(sp.x(j) + a) + 0.5 * std::cos(3 * sp.x(j) + b));
    }
  SimState st = make_state(EvolveModel::DampedPrandtl, g, single(*g, "u", sp.to_spectral(p)));
  for (int s = 0; s < 1000; ++s) Integrator{}.step(st, 1e-3, true);
  EXPECT_LT(sp.conjugate_asymmetry(st.field.at("u")), 1e-14 * st.field.at("u").cwiseAbs().maxCoeff());
}

TEST(Damping, NormDecaysAtLeastExponentially) {
  auto g = make_grid(60, 8.0, 16, Stretching::tanh_cluster(1.5));
  const Spectral sp(*g);
  RMat p(g->n(), 16);
  for (int i = 0; i < g->n(); ++i)
    for (int j = 0; j < 16; ++j) p(i, j) = g->z(i) * std::exp(-g->z(i)) * (1 + std::sin(2 * sp.x(j)));
  EvolveCoefficients c;
  c.kappa = 0.8;
  SimState st = make_state(EvolveModel::DampedPrandtl, g, single(*g, "u", sp.to_spectral(p)), c);
  const double n0 = std::sqrt(l2_norm2_modes(*g, st.field.at("u")));
  run(st, 1.0, {1e-3, true});
  EXPECT_LE(std::sqrt(l2_norm2_modes(*g, st.field.at("u"))), n0 * std::exp(-0.8) * (1 + 1e-3));
}

TEST(Blowup, FlaggedNotThrown) {
  auto g = make_grid(40, 6.0, 16);
  const Spectral sp(*g);
  RMat p(g->n(), 16);
  for (int i = 0; i < g->n(); ++i)
    for (int j = 0; j < 16; ++j) p(i, j) = 50.0 * std::sin(M_PI * g->z(i) / 6.0) * std::sin(sp.x(j));
  SimState st = make_state(EvolveModel::DampedPrandtl, g, single(*g, "u", sp.to_spectral(p)));
  int calls = 0;
  RunSummary r;
  EXPECT_NO_THROW(r = run(st, 100.0, {0.5, true}, {[&](const SimState&, const StepReport&) { ++calls; }}));
  EXPECT_TRUE(r.blowup);
  EXPECT_TRUE(r.last.blowup);
  EXPECT_LT(r.t_final, 100.0);
  EXPECT_EQ(calls, r.steps);
}

TEST(Run, AdaptiveDtRespectsCfl) {
  Manufactured m{4.0, 1.0};
  SimState st = manufactured_state(m, make_grid(41, 4.0, 8));
  DtPolicy pol;
  pol.dt_max = 1.0;
  pol.cfl_safety = 0.5;
  std::vector<double> cfl;
  const RunSummary r = run(st, 0.2, pol, {[&](const SimState&, const StepReport& s) {
                             cfl.push_back(std::max(s.cfl_advective, s.cfl_magnetic));
                           }});
  EXPECT_NEAR(r.t_final, 0.2, 1e-12);
  for (double c : cfl) EXPECT_LE(c, 0.5 + 1e-12);
}

TEST(Run, ObserverFailureLeavesStateConsistent) {
  auto g = make_grid(20, 4.0, 8);
  Manufactured m{4.0, 1.0};
  SimState st = manufactured_state(m, g);
  EXPECT_THROW(run(st, 1.0, {0.01, true}, {[](const SimState&, const StepReport&) { throw std::runtime_error("disk"); }}),
               std::runtime_error);
  EXPECT_NEAR(st.t, 0.01, 1e-15);
  EXPECT_TRUE(std::isfinite(st.field.at("u").cwiseAbs().maxCoeff()));
}

TEST(FarField, Compatibility) {
  FarField uniform;
  uniform.u_inf = [](double, double) { return 1.5; };
  EXPECT_TRUE(check_far_field_compatibility(uniform, 0.0, 1.0).ok);
  // steady Bernoulli pair: u u_x = -p_x with p = -u^2 / 2
  FarField steady;
  steady.u_inf = [](double, double x) { return std::sin(x); };
  steady.p_inf = [](double, double x) { return -0.5 * std::sin(x) * std::sin(x); };
  EXPECT_TRUE(check_far_field_compatibility(steady, 0.0, 1.0).ok);
  FarField bad;
  bad.u_inf = [](double t, double x) { return std::sin(x) * (1 + t); };
  EXPECT_FALSE(check_far_field_compatibility(bad, 0.0, 1.0).ok);
}

TEST(Model, Strings) {
  for (auto m : {EvolveModel::DampedPrandtl, EvolveModel::MixedPS, EvolveModel::MHDBL, EvolveModel::LP,
                 EvolveModel::LSP, EvolveModel::LMHDBL})
    EXPECT_EQ(evolve_model_from_string(to_string(m)), m);
  EXPECT_THROW(evolve_model_from_string("euler"), InvalidParameter);
}
