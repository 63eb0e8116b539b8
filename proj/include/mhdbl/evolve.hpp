#pragma once

// Time integration of the 2D magnetic Prandtl models and of the linearized
// systems. z-diffusion is implicit (tridiagonal solve per mode), everything
// else explicit, combined in the two-stage IMEX Runge-Kutta scheme of
// Ascher, Ruuth and Spiteri (ARS(2,2,2)), which is second order and
// stiffly accurate.
//
// Nonlinear models (x-periodic, pseudo-spectral products, 2/3 dealiasing):
//   DampedPrandtl  d_t u + u u_x + v u_z - kappa u_zz + kappa u = -p_x
//   MixedPS        d_t u + u u_x + v u_z - nu u_zz = nu b_x - p_x,  b_zz = -u_x
//   MHDBL          d_t u + u u_x + v u_z - u_zz = S (b b_x + c b_z) - p_x
//                  d_t phi + u phi_x + v phi_z - eta phi_zz = 0,
//                  (b, c) = (-phi_z, phi_x)
// Linear models evolve the per-mode generators of linops.hpp.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "mhdbl/field.hpp"
#include "mhdbl/linops.hpp"

namespace mhdbl {

enum class EvolveModel { DampedPrandtl, MixedPS, MHDBL, LP, LSP, LMHDBL };

inline std::string_view to_string(EvolveModel m) {
  switch (m) {
    case EvolveModel::DampedPrandtl: return "damped-prandtl";
    case EvolveModel::MixedPS: return "mixed-ps";
    case EvolveModel::MHDBL: return "mhdbl";
    case EvolveModel::LP: return "lp";
    case EvolveModel::LSP: return "lsp";
    case EvolveModel::LMHDBL: return "lmhdbl";
  }
  return "lp";
}

inline EvolveModel evolve_model_from_string(std::string_view s) {
  if (s == "damped-prandtl") return EvolveModel::DampedPrandtl;
  if (s == "mixed-ps") return EvolveModel::MixedPS;
  if (s == "mhdbl") return EvolveModel::MHDBL;
  if (s == "lp") return EvolveModel::LP;
  if (s == "lsp") return EvolveModel::LSP;
  if (s == "lmhdbl") return EvolveModel::LMHDBL;
  throw InvalidParameter("unknown evolve model '" + std::string(s) +
                         "' (expected damped-prandtl|mixed-ps|mhdbl|lp|lsp|lmhdbl)");
}

inline bool is_linear(EvolveModel m) {
  return m == EvolveModel::LP || m == EvolveModel::LSP || m == EvolveModel::LMHDBL;
}

// Names of the evolved unknowns per model.
inline std::vector<std::string> unknowns(EvolveModel m) {
  switch (m) {
    case EvolveModel::MHDBL: return {"u", "phi"};
    case EvolveModel::LMHDBL: return {"ut", "b"};
    default: return {"u"};
  }
}

using Trace = std::function<double(double t, double x)>;
using Source = std::function<double(double t, double x, double z)>;

// Outer-flow traces at z -> infinity.
struct FarField {
  Trace u_inf;  // horizontal velocity
  Trace p_inf;  // pressure
  Trace b_inf;  // horizontal magnetic field
};

struct EvolveCoefficients {
  double kappa = 1.0;  // Ha^2/Re
  double nu = 1.0;     // Ha/Re
  double s = 1.0;      // coupling
  double eta = 1.0;    // Re/Rm
};

struct SimState {
  EvolveModel model = EvolveModel::LP;
  double t = 0.0;
  std::shared_ptr<const Grid> grid;
  Field field;
  FarField far;
  EvolveCoefficients coef;
  ProfileOnGrid profile;  // linear models only
  std::map<std::string, Source> sources;  // manufactured forcing per unknown
  double initial_max_norm = 0.0;
};

struct StepReport {
  double dt = 0.0;
  double cfl_advective = 0.0;
  double cfl_magnetic = 0.0;
  std::map<std::string, double> max_norms;
  bool blowup = false;
};

struct CompatibilityReport {
  double max_residual = 0.0;
  bool ok = true;
};

// Checks d_t u_inf + u_inf d_x u_inf + d_x p_inf = 0 by fourth-order central
// differences at sample points.
inline CompatibilityReport check_far_field_compatibility(const FarField& far, double t0, double t1,
                                                         double tol = 1e-8, int n_t = 5, int n_x = 16) {
  CompatibilityReport rep;
  if (!far.u_inf && !far.p_inf) return rep;
  auto u = [&](double t, double x) { return far.u_inf ? far.u_inf(t, x) : 0.0; };
  auto p = [&](double t, double x) { return far.p_inf ? far.p_inf(t, x) : 0.0; };
  const double h = 1e-3;
  auto d4 = [h](const std::function<double(double)>& f, double s) {
    return (-f(s + 2 * h) + 8 * f(s + h) - 8 * f(s - h) + f(s - 2 * h)) / (12 * h);
  };
  for (int it = 0; it < n_t; ++it) {
    const double t = t0 + (t1 - t0) * it / std::max(1, n_t - 1);
    for (int ix = 0; ix < n_x; ++ix) {
      const double x = 2.0 * M_PI * ix / n_x;
      const double ut = d4([&](double s) { return u(s, x); }, t);
      const double ux = d4([&](double s) { return u(t, s); }, x);
      const double px = d4([&](double s) { return p(t, s); }, x);
      rep.max_residual = std::max(rep.max_residual, std::abs(ut + u(t, x) * ux + px));
    }
  }
  rep.ok = rep.max_residual <= tol;
  return rep;
}

namespace detail {

inline CVec trace_modes(const Spectral& sp, const Trace& f, double t) {
  RMat row(1, sp.n_modes());
  for (int j = 0; j < sp.n_modes(); ++j) row(0, j) = f ? f(t, sp.x(j)) : 0.0;
  return sp.to_spectral(row).row(0).transpose();
}

inline double max_abs_physical(const Spectral& sp, const CMat& spec) {
  const RMat p = sp.to_physical(spec);
  double m = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    const double v = p.data()[i];
    if (!std::isfinite(v)) return std::numeric_limits<double>::infinity();
    m = std::max(m, std::abs(v));
  }
  return m;
}

}  // namespace detail

// Builds a state with the given initial unknowns (full columns, boundary
// values included). Nonlinear fields are dealiased.
inline SimState make_state(EvolveModel model, std::shared_ptr<const Grid> grid, Field initial,
                           EvolveCoefficients coef = {}, FarField far = {}, std::optional<ShearFlow> shear = {}) {
  if (!grid) throw InvalidParameter("make_state: grid is required");
  SimState st;
  st.model = model;
  st.grid = std::move(grid);
  st.coef = coef;
  st.far = std::move(far);
  st.field = std::move(initial);
  st.field.model = std::string(to_string(model));
  if (is_linear(model)) {
    if (!shear) throw InvalidParameter("make_state: linear models need a background shear flow");
    st.profile = ProfileOnGrid(*shear, *st.grid);
  }
  if (model == EvolveModel::LSP && !(coef.nu > 0.0)) throw InvalidParameter("make_state: nu must be positive");
  if ((model == EvolveModel::LMHDBL || model == EvolveModel::MHDBL) && !(coef.eta > 0.0))
    throw InvalidParameter("make_state: eta must be positive");
  if (model == EvolveModel::DampedPrandtl && !(coef.kappa > 0.0))
    throw InvalidParameter("make_state: kappa must be positive");
  if (model == EvolveModel::MixedPS && !(coef.nu > 0.0)) throw InvalidParameter("make_state: nu must be positive");

  const Spectral sp(*st.grid);
  for (const auto& name : unknowns(model)) {
    if (!st.field.has(name)) throw InvalidParameter("make_state: missing unknown '" + name + "'");
    const CMat& f = st.field.at(name);
    if (f.rows() != st.grid->n() || f.cols() != st.grid->n_modes())
      throw InvalidParameter("make_state: unknown '" + name + "' has wrong shape");
    if (!is_linear(model)) sp.dealias(st.field[name]);
    st.initial_max_norm = std::max(st.initial_max_norm, detail::max_abs_physical(sp, st.field.at(name)));
  }
  if (model == EvolveModel::MixedPS && !st.field.has("b"))
    st.field["b"] = CMat::Zero(st.grid->n(), st.grid->n_modes());
  return st;
}

// The background reference state u = 0, b = e_x of the MHD layer.
inline Field mhdbl_reference_field(const Grid& g) {
  Field f;
  f["u"] = CMat::Zero(g.n(), g.n_modes());
  CMat phi = CMat::Zero(g.n(), g.n_modes());
  for (int i = 0; i < g.n(); ++i) phi(i, 0) = -g.z(i);
  f["phi"] = phi;
  return f;
}

// Smooth real initial data: each unknown is a sum over 1 <= k <= k_max of
// random complex amplitudes times z exp(-(z/s)^2), s in [1, 3]. The profile
// is odd in z, so d_zz vanishes at the wall as well.
inline Field random_smooth_initial(const Grid& g, EvolveModel model, std::uint64_t seed, int k_max = 3,
                                   double amplitude = 1.0) {
  const int limit = is_linear(model) ? g.n_modes() / 2 - 1 : (g.n_modes() - 1) / 3;
  if (k_max < 1 || k_max > limit)
    throw InvalidParameter("random_smooth_initial: k_max must lie in [1, " + std::to_string(limit) + "]");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> width(1.0, 3.0);
  Field f;
  for (const auto& name : unknowns(model)) {
    CMat m = CMat::Zero(g.n(), g.n_modes());
    for (int k = 1; k <= k_max; ++k) {
      const cplx a = amplitude * cplx{normal(rng), normal(rng)} / static_cast<double>(k);
      const double s = width(rng);
      for (int i = 0; i < g.n(); ++i) {
        const double z = g.z(i);
        m(i, g.slot(k)) = a * z * std::exp(-(z / s) * (z / s));
      }
      m.col(g.slot(-k)) = m.col(g.slot(k)).conjugate();
    }
    m.row(g.n() - 1).setZero();
    f[name] = m;
  }
  if (model == EvolveModel::MHDBL) {
    // perturbation rides on the background flux function
    for (int i = 0; i < g.n(); ++i) f["phi"](i, 0) -= g.z(i);
  }
  return f;
}

class Integrator {
 public:
  struct Options {
    double blowup_factor = 1e6;  // ceiling relative to max(initial max-norm, 1)
    double cfl_safety = 1.0;     // step() rejects CFL numbers above this
  };

  Integrator() = default;
  explicit Integrator(Options opt) : opt_(opt) {}

  // Diffusivity of each evolved unknown.
  static double diffusivity(const SimState& st, const std::string& name) {
    switch (st.model) {
      case EvolveModel::DampedPrandtl: return st.coef.kappa;
      case EvolveModel::MixedPS: return st.coef.nu;
      case EvolveModel::MHDBL: return name == "phi" ? st.coef.eta : 1.0;
      case EvolveModel::LP: return 1.0;
      case EvolveModel::LSP: return st.coef.nu;
      case EvolveModel::LMHDBL: return name == "b" ? st.coef.eta : 1.0;
    }
    return 1.0;
  }

  // Dirichlet data (wall, far) per mode at time t.
  static std::pair<CVec, CVec> boundary_values(const SimState& st, const std::string& name, double t) {
    const Grid& g = *st.grid;
    const Spectral sp(g);
    CVec wall = CVec::Zero(g.n_modes());
    CVec far = CVec::Zero(g.n_modes());
    if (st.model == EvolveModel::DampedPrandtl || st.model == EvolveModel::MixedPS ||
        (st.model == EvolveModel::MHDBL && name == "u")) {
      if (st.far.u_inf) far = detail::trace_modes(sp, st.far.u_inf, t);
      for (int j = 0; j < g.n_modes(); ++j)
        if (std::abs(g.wavenumber(j)) > sp.dealias_cutoff()) far[j] = 0.0;
    } else if (st.model == EvolveModel::MHDBL && name == "phi") {
      // phi(z_max) = -z_max * mean(b_inf); x-variations of b_inf are not imposed
      const double b_mean = st.far.b_inf ? detail::trace_modes(sp, st.far.b_inf, t)[0].real() : 1.0;
      far[0] = -g.z_max() * b_mean;
    }
    return {wall, far};
  }

  // Explicit tendencies (no z-diffusion). Boundary rows are zero.
  std::map<std::string, CMat> explicit_tendency(const SimState& st, const Field& f, double t) const {
    switch (st.model) {
      case EvolveModel::DampedPrandtl: return rhs_damped_prandtl(st, f, t);
      case EvolveModel::MixedPS: return rhs_mixed_ps(st, f, t);
      case EvolveModel::MHDBL: return rhs_mhdbl(st, f, t);
      default: return rhs_linear(st, f);
    }
  }

  std::map<std::string, CMat> rhs_damped_prandtl(const SimState& st, const Field& f, double t) const {
    const Grid& g = *st.grid;
    const Spectral sp(g);
    const CMat& u = f.at("u");
    CMat out = -advection(sp, g, u, u);
    out -= st.coef.kappa * u;
    add_pressure_and_sources(st, sp, g, t, "u", out);
    zero_ends(out);
    return {{"u", out}};
  }

  // Shercliff field diagnosed from u; the zero mode of b keeps `b0`.
  static CMat diagnose_b(const SimState& st, const CMat& u, double t, const CMat& b0) {
    const Grid& g = *st.grid;
    const Spectral sp(g);
    const CVec b_far = st.far.b_inf ? detail::trace_modes(sp, st.far.b_inf, t) : CVec::Zero(g.n_modes());
    const InteriorTridiagonal lap(g, 0.0, -1.0);
    CMat b(g.n(), g.n_modes());
    for (int j = 0; j < g.n_modes(); ++j) {
      const int k = g.wavenumber(j);
      if (k == 0) {
        b.col(j) = b0.col(j);
        continue;
      }
      const CVec rhs = (-kI * static_cast<double>(k)) * u.col(j).segment(1, g.n_interior());
      b.col(j) = lap.solve<cplx>(rhs, cplx{0.0, 0.0}, b_far[j]);
    }
    return b;
  }

  std::map<std::string, CMat> rhs_mixed_ps(const SimState& st, const Field& f, double t) const {
    const Grid& g = *st.grid;
    const Spectral sp(g);
    const CMat& u = f.at("u");
    const CMat b = diagnose_b(st, u, t, st.field.at("b"));
    CMat out = -advection(sp, g, u, u);
    out += st.coef.nu * sp.dx(b);
    add_pressure_and_sources(st, sp, g, t, "u", out);
    zero_ends(out);
    return {{"u", out}};
  }

  std::map<std::string, CMat> rhs_mhdbl(const SimState& st, const Field& f, double t) const {
    const Grid& g = *st.grid;
    const Spectral sp(g);
    const CMat& u = f.at("u");
    const CMat& phi = f.at("phi");
    const CMat b = -dz_modes(g, phi);
    const CMat c = sp.dx(phi);

    // Lorentz force b b_x + c b_z and flux advection u phi_x + v phi_z = u c - v b
    const RMat bp = sp.to_physical(b), cp = sp.to_physical(c);
    const RMat bxp = sp.to_physical(sp.dx(b)), bzp = sp.to_physical(dz_modes(g, b));
    const RMat up = sp.to_physical(u), vp = sp.to_physical(v_modes(g, u));
    CMat lorentz = sp.to_spectral((bp.array() * bxp.array() + cp.array() * bzp.array()).matrix());
    CMat flux = sp.to_spectral((up.array() * cp.array() - vp.array() * bp.array()).matrix());
    sp.dealias(lorentz);
    sp.dealias(flux);

    CMat du = -advection(sp, g, u, u) + st.coef.s * lorentz;
    add_pressure_and_sources(st, sp, g, t, "u", du);
    CMat dphi = -flux;
    add_sources(st, sp, g, t, "phi", dphi);
    zero_ends(du);
    zero_ends(dphi);
    return {{"u", du}, {"phi", dphi}};
  }

  std::map<std::string, CMat> rhs_linear(const SimState& st, const Field& f) const {
    const Grid& g = *st.grid;
    std::map<std::string, CMat> out;
    if (st.model == EvolveModel::LMHDBL) {
      const CMat& ut = f.at("ut");
      const CMat& b = f.at("b");
      CMat dut(g.n(), g.n_modes()), db(g.n(), g.n_modes());
      for (int j = 0; j < g.n_modes(); ++j) {
        const int k = g.wavenumber(j);
        const ModifiedState r =
            lmhdbl_tendency(g, st.profile, k, {ut.col(j), b.col(j)}, st.coef.s, st.coef.eta, false);
        dut.col(j) = r.ut;
        db.col(j) = r.b;
      }
      out["ut"] = std::move(dut);
      out["b"] = std::move(db);
      return out;
    }
    const CMat& u = f.at("u");
    CMat du(g.n(), g.n_modes());
    for (int j = 0; j < g.n_modes(); ++j) {
      const int k = g.wavenumber(j);
      if (st.model == EvolveModel::LSP && k != 0) {
        du.col(j) = lsp_tendency(g, st.profile, k, u.col(j), st.coef.nu, false);
      } else {
        du.col(j) = lp_tendency(g, st.profile, k, u.col(j), 1.0, false);
      }
    }
    out["u"] = std::move(du);
    return out;
  }

  // Stability limits of the explicit part for the current state.
  std::pair<double, double> cfl_numbers(const SimState& st, const Field& f, double dt) const {
    const Grid& g = *st.grid;
    const Spectral sp(g);
    const double dx = g.x_period() / g.n_modes();
    double dz_min = std::numeric_limits<double>::infinity();
    for (int i = 0; i + 1 < g.n(); ++i) dz_min = std::min(dz_min, g.z(i + 1) - g.z(i));
    // Bound of the inverse Dirichlet Laplacian on [0, z_max].
    const double inv_lap = g.z_max() * g.z_max() / (M_PI * M_PI);

    double adv = 0.0, mag = 0.0;
    if (!is_linear(st.model)) {
      const CMat& u = f.at("u");
      const RMat up = sp.to_physical(u), vp = sp.to_physical(v_modes(g, u));
      double rate = 0.0;
      for (Eigen::Index j = 0; j < up.cols(); ++j)
        for (int i = 1; i + 1 < g.n(); ++i) {
          const double hz = std::min(g.z(i) - g.z(i - 1), g.z(i + 1) - g.z(i));
          rate = std::max(rate, std::abs(up(i, j)) / dx + std::abs(vp(i, j)) / hz);
        }
      adv = 2.0 * dt * rate;  // dt <= 0.5 / rate
      if (st.model == EvolveModel::MixedPS) {
        const int kmax = sp.dealias_cutoff();
        mag = dt * st.coef.nu * kmax * kmax * inv_lap;
      } else if (st.model == EvolveModel::MHDBL) {
        const CMat& phi = f.at("phi");
        const RMat bp = sp.to_physical(-dz_modes(g, phi)), cp = sp.to_physical(sp.dx(phi));
        double r = 0.0;
        for (Eigen::Index j = 0; j < bp.cols(); ++j)
          for (int i = 1; i + 1 < g.n(); ++i) {
            const double hz = std::min(g.z(i) - g.z(i - 1), g.z(i + 1) - g.z(i));
            r = std::max(r, std::sqrt(st.coef.s) * (std::abs(bp(i, j)) / dx + std::abs(cp(i, j)) / hz));
          }
        mag = 2.0 * dt * r;
      }
      return {adv, mag};
    }

    const int kmax = active_kmax(st, f);
    const double umax = st.profile.u.cwiseAbs().maxCoeff();
    double zd1 = 0.0;
    for (int i = 0; i < g.n(); ++i) zd1 = std::max(zd1, std::abs(g.z(i) * st.profile.d1[i]));
    adv = 2.0 * dt * kmax * (umax + 2.0 * zd1);
    if (st.model == EvolveModel::LSP) mag = dt * st.coef.nu * kmax * kmax * inv_lap;
    if (st.model == EvolveModel::LMHDBL) {
      double d2max = st.profile.d2.cwiseAbs().maxCoeff(), d1max = st.profile.d1.cwiseAbs().maxCoeff();
      mag = 2.0 * dt * (std::sqrt(st.coef.s) * kmax + (1.0 + st.coef.eta) * d1max / dz_min + 2.0 * d2max);
    }
    return {adv, mag};
  }

  // Largest dt whose CFL numbers stay at `safety`.
  double stable_dt(const SimState& st, double safety = 0.9) const {
    const auto [adv, mag] = cfl_numbers(st, st.field, 1.0);
    const double rate = std::max(adv, mag);
    return rate > 0.0 ? safety / rate : std::numeric_limits<double>::infinity();
  }

  StepReport step(SimState& st, double dt, bool force = false) const {
    if (!(dt > 0.0)) throw InvalidParameter("step: dt must be positive");
    StepReport rep;
    rep.dt = dt;
    std::tie(rep.cfl_advective, rep.cfl_magnetic) = cfl_numbers(st, st.field, dt);
    if (!force && std::max(rep.cfl_advective, rep.cfl_magnetic) > opt_.cfl_safety)
      throw InvalidParameter("step: dt=" + std::to_string(dt) + " exceeds the CFL limit (advective " +
                             std::to_string(rep.cfl_advective) + ", magnetic " + std::to_string(rep.cfl_magnetic) +
                             ")");

    const Grid& g = *st.grid;
    const double gamma = 1.0 - 1.0 / std::sqrt(2.0);
    const double delta = 1.0 - 1.0 / (2.0 * gamma);
    const std::vector<std::string> names = unknowns(st.model);
    const double t0 = st.t;

    const Field& y0 = st.field;
    const auto k1 = explicit_tendency(st, y0, t0);

    // stage 2
    Field y2 = y0;
    std::map<std::string, CMat> l2;
    for (const auto& n : names) {
      const CMat rhs = y0.at(n) + dt * gamma * k1.at(n);
      y2[n] = implicit_solve(st, n, rhs, gamma * dt, t0 + gamma * dt);
      l2[n] = (y2.at(n) - rhs) / (gamma * dt);
    }
    const auto k2 = explicit_tendency(st, y2, t0 + gamma * dt);

    // stage 3
    Field y3 = y0;
    for (const auto& n : names) {
      const CMat rhs = y0.at(n) + dt * (delta * k1.at(n) + (1.0 - delta) * k2.at(n)) + dt * (1.0 - gamma) * l2.at(n);
      y3[n] = implicit_solve(st, n, rhs, gamma * dt, t0 + dt);
    }

    for (const auto& n : names) st.field[n] = std::move(y3[n]);
    st.t = t0 + dt;
    if (st.model == EvolveModel::MixedPS) st.field["b"] = diagnose_b(st, st.field.at("u"), st.t, st.field.at("b"));

    const Spectral sp(g);
    const double ceiling = opt_.blowup_factor * std::max(st.initial_max_norm, 1.0);
    for (const auto& n : names) {
      const double m = detail::max_abs_physical(sp, st.field.at(n));
      rep.max_norms[n] = m;
      if (!std::isfinite(m) || m > ceiling) rep.blowup = true;
    }
    return rep;
  }

 private:
  static void zero_ends(CMat& m) {
    m.row(0).setZero();
    m.row(m.rows() - 1).setZero();
  }

  static CMat dz_modes(const Grid& g, const CMat& f) {
    CMat out(f.rows(), f.cols());
    for (Eigen::Index j = 0; j < f.cols(); ++j) out.col(j) = d1z<cplx>(g, f.col(j));
    return out;
  }

  static CMat v_modes(const Grid& g, const CMat& u) {
    CMat out(u.rows(), u.cols());
    for (Eigen::Index j = 0; j < u.cols(); ++j) out.col(j) = recover_v(g, u.col(j), g.wavenumber(static_cast<int>(j)));
    return out;
  }

  // u q_x + v q_z with v recovered from u, dealiased.
  static CMat advection(const Spectral& sp, const Grid& g, const CMat& u, const CMat& q) {
    const RMat up = sp.to_physical(u), vp = sp.to_physical(v_modes(g, u));
    const RMat qx = sp.to_physical(sp.dx(q)), qz = sp.to_physical(dz_modes(g, q));
    CMat out = sp.to_spectral((up.array() * qx.array() + vp.array() * qz.array()).matrix());
    sp.dealias(out);
    return out;
  }

  static void add_sources(const SimState& st, const Spectral& sp, const Grid& g, double t, const std::string& name,
                          CMat& out) {
    auto it = st.sources.find(name);
    if (it == st.sources.end() || !it->second) return;
    RMat phys(g.n(), g.n_modes());
    for (int i = 0; i < g.n(); ++i)
      for (int j = 0; j < g.n_modes(); ++j) phys(i, j) = it->second(t, sp.x(j), g.z(i));
    out += sp.to_spectral(phys);
  }

  static void add_pressure_and_sources(const SimState& st, const Spectral& sp, const Grid& g, double t,
                                       const std::string& name, CMat& out) {
    if (st.far.p_inf) {
      const CVec p = detail::trace_modes(sp, st.far.p_inf, t);
      for (int j = 0; j < g.n_modes(); ++j) {
        const int k = g.wavenumber(j);
        if (2 * std::abs(k) == g.n_modes()) continue;
        out.col(j).array() -= kI * static_cast<double>(k) * p[j];
      }
    }
    add_sources(st, sp, g, t, name, out);
  }

  static int active_kmax(const SimState& st, const Field& f) {
    const Grid& g = *st.grid;
    int kmax = 0;
    for (const auto& n : unknowns(st.model))
      for (int j = 0; j < g.n_modes(); ++j)
        if (f.at(n).col(j).cwiseAbs().maxCoeff() > 0.0) kmax = std::max(kmax, std::abs(g.wavenumber(j)));
    return kmax;
  }

  // Solves (I - a nu d_zz) y = rhs on the interior with Dirichlet data at t.
  CMat implicit_solve(const SimState& st, const std::string& name, const CMat& rhs, double a, double t) const {
    const Grid& g = *st.grid;
    const double nu = diffusivity(st, name);
    const InteriorTridiagonal& solver = factor(g, a * nu);
    const auto [wall, far] = boundary_values(st, name, t);
    CMat out(g.n(), g.n_modes());
    for (int j = 0; j < g.n_modes(); ++j) {
      const CVec r = rhs.col(j).segment(1, g.n_interior());
      out.col(j) = solver.solve<cplx>(r, wall[j], far[j]);
    }
    return out;
  }

  const InteriorTridiagonal& factor(const Grid& g, double beta) const {
    for (auto& [key, solver] : cache_)
      if (key.first == &g && key.second == beta) return *solver;
    if (cache_.size() > 16) cache_.clear();
    cache_.push_back({{&g, beta}, std::make_shared<InteriorTridiagonal>(g, 1.0, beta)});
    return *cache_.back().second;
  }

  Options opt_{};
  mutable std::vector<std::pair<std::pair<const Grid*, double>, std::shared_ptr<InteriorTridiagonal>>> cache_;
};

struct DtPolicy {
  double dt_max = 1e-3;
  bool fixed = false;       // use dt_max regardless of CFL (step still checks unless forced)
  double cfl_safety = 0.9;  // fraction of the stability limit used when adaptive
  bool force = false;
};

using Observer = std::function<void(const SimState&, const StepReport&)>;

struct RunSummary {
  int steps = 0;
  double t_final = 0.0;
  bool blowup = false;
  double dt_min = std::numeric_limits<double>::infinity();
  double dt_max = 0.0;
  StepReport last;
};

// Advances to t_end, calling each observer after every `observe_every`-th
// accepted step (and after the last one). Stops at the first blow-up.
inline RunSummary run(SimState& st, double t_end, const DtPolicy& policy, const std::vector<Observer>& observers = {},
                      int observe_every = 1, const Integrator& integ = Integrator{}) {
  if (!(t_end > st.t)) throw InvalidParameter("run: t_end must exceed the current time");
  if (!(policy.dt_max > 0.0)) throw InvalidParameter("run: dt_max must be positive");
  RunSummary sum;
  const double eps = 1e-12 * std::max(1.0, std::abs(t_end));
  while (st.t < t_end - eps) {
    double dt = policy.dt_max;
    if (!policy.fixed) dt = std::min(dt, integ.stable_dt(st, policy.cfl_safety));
    // land on t_end without a sliver step
    const double remaining = t_end - st.t;
    const double n_left = std::ceil(remaining / dt - 1e-9);
    dt = remaining / std::max(1.0, n_left);
    const StepReport rep = integ.step(st, dt, policy.force || policy.fixed);
    ++sum.steps;
    sum.dt_min = std::min(sum.dt_min, dt);
    sum.dt_max = std::max(sum.dt_max, dt);
    sum.last = rep;
    const bool last = rep.blowup || st.t >= t_end - eps;
    if (last || sum.steps % std::max(1, observe_every) == 0)
      for (const auto& obs : observers) obs(st, rep);
    if (rep.blowup) {
      sum.blowup = true;
      break;
    }
  }
  sum.t_final = st.t;
  return sum;
}

}  // namespace mhdbl
