#pragma once

// Energy functionals along trajectories and checks of the a priori
// estimates for the linearized Shercliff-Prandtl and MHD layer systems.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mhdbl/evolve.hpp"

namespace mhdbl {

struct EnergyRecord {
  double t = 0.0;
  std::map<std::string, double> norms;  // squared L2 norms, keyed by name

  double get(const std::string& name) const {
    auto it = norms.find(name);
    if (it == norms.end()) throw InvalidParameter("EnergyRecord: missing norm '" + name + "'");
    return it->second;
  }
};

namespace detail {

template <class F>
double sum_modes(const Grid& g, const CMat& spec, F&& per_column) {
  double s = 0.0;
  for (int j = 0; j < g.n_modes(); ++j) s += per_column(CVec(spec.col(j)), g.wavenumber(j));
  return 2.0 * M_PI * s;
}

}  // namespace detail

// Squared norms of the current state. Keys:
//   u, omega, dz_u, dz_omega, dx_u, b, dz_b                 (lp, lsp)
//   ut, dz_ut, u, dz_u, b, dz_b                             (lmhdbl)
//   u, dz_u, dx_u (+ b, dz_b for mixed-ps, mhdbl)           (nonlinear)
// plus parseval_defect, the relative mismatch between the mode sum and the
// physical-space sum of |u|^2.
inline EnergyRecord compute_record(const SimState& st) {
  const Grid& g = *st.grid;
  EnergyRecord r;
  r.t = st.t;
  auto q = [&](const CMat& f, auto&& op) {
    return detail::sum_modes(g, f, [&](const CVec& c, int k) { return norm2_quad(g, CVec(op(c, k))); });
  };
  auto id = [](const CVec& c, int) { return c; };
  auto dz = [&](const CVec& c, int) { return d1z(g, c); };
  auto dzz = [&](const CVec& c, int) { return d2z(g, c); };
  auto dx = [&](const CVec& c, int k) { return CVec(c * static_cast<double>(k)); };

  const CMat* velocity = nullptr;
  CMat u_prim;
  if (st.model == EvolveModel::LMHDBL) {
    const CMat& ut = st.field.at("ut");
    const CMat& b = st.field.at("b");
    u_prim.resize(g.n(), g.n_modes());
    for (int j = 0; j < g.n_modes(); ++j) {
      const PrimitiveState p = to_primitive(g, st.profile, g.wavenumber(j), {ut.col(j), b.col(j)});
      u_prim.col(j) = p.u;
    }
    r.norms["ut"] = q(ut, id);
    r.norms["dz_ut"] = q(ut, dz);
    r.norms["b"] = q(b, id);
    r.norms["dz_b"] = q(b, dz);
    velocity = &u_prim;
  } else {
    velocity = &st.field.at("u");
  }
  const CMat& u = *velocity;
  r.norms["u"] = q(u, id);
  r.norms["dz_u"] = q(u, dz);
  r.norms["dx_u"] = q(u, dx);

  if (st.model == EvolveModel::LP || st.model == EvolveModel::LSP) {
    r.norms["omega"] = r.norms["dz_u"];
    r.norms["dz_omega"] = q(u, dzz);
    CMat b = CMat::Zero(g.n(), g.n_modes());
    if (st.model == EvolveModel::LSP)
      for (int j = 0; j < g.n_modes(); ++j)
        if (g.wavenumber(j) != 0) b.col(j) = solve_b_from_u(g, u.col(j), g.wavenumber(j));
    r.norms["b"] = q(b, id);
    r.norms["dz_b"] = q(b, dz);
  } else if (st.model == EvolveModel::MixedPS) {
    r.norms["b"] = q(st.field.at("b"), id);
    r.norms["dz_b"] = q(st.field.at("b"), dz);
  } else if (st.model == EvolveModel::MHDBL) {
    CMat b(g.n(), g.n_modes());
    for (int j = 0; j < g.n_modes(); ++j) b.col(j) = -d1z(g, CVec(st.field.at("phi").col(j)));
    b.col(0).array() -= 1.0;  // perturbation of the background field
    r.norms["b"] = q(b, id);
    r.norms["dz_b"] = q(b, dz);
  }

  const Spectral sp(g);
  const double phys = l2_norm2_physical(g, sp.to_physical(u));
  const double modal = r.norms["u"];
  r.norms["parseval_defect"] = std::abs(phys - modal) / std::max(modal, 1e-300);
  return r;
}

// Observer collecting records. The time integral of |d_t u|^2 is accumulated
// from per-step differences, so it must see every step.
class EnergyRecorder {
 public:
  explicit EnergyRecorder(int record_every = 1) : every_(std::max(1, record_every)) {}

  void start(const SimState& st) {
    records_.clear();
    prev_ = velocity(st);
    prev_t_ = st.t;
    dtu_integral_ = 0.0;
    steps_ = 0;
    push(st);
  }

  void operator()(const SimState& st, const StepReport&) {
    const CMat u = velocity(st);
    const double dt = st.t - prev_t_;
    if (dt > 0.0) {
      const CMat du = (u - prev_) / dt;
      dtu_integral_ += dt * l2_norm2_modes(*st.grid, du);
    }
    prev_ = u;
    prev_t_ = st.t;
    if (++steps_ % every_ == 0) push(st);
  }

  // Records the final state if the last step was not on the cadence.
  void finish(const SimState& st) {
    if (records_.empty() || records_.back().t != st.t) push(st);
  }

  const std::vector<EnergyRecord>& records() const { return records_; }

 private:
  static CMat velocity(const SimState& st) {
    return st.model == EvolveModel::LMHDBL ? st.field.at("ut") : st.field.at("u");
  }

  void push(const SimState& st) {
    EnergyRecord r = compute_record(st);
    r.norms["int_dt_u"] = dtu_integral_;
    records_.push_back(std::move(r));
  }

  int every_;
  int steps_ = 0;
  CMat prev_;
  double prev_t_ = 0.0;
  double dtu_integral_ = 0.0;
  std::vector<EnergyRecord> records_;
};

struct LspConstants {
  double c = 0.0;
  double alpha = 0.0;
  double c_prime = 0.0;
};

inline LspConstants constants_lsp(const ShearNorms& n, double nu) {
  if (!(nu > 0.0)) throw InvalidParameter("constants_lsp: nu must be positive");
  LspConstants k;
  k.c = 2.0 * n.z_d2 * n.z_d2 / nu;
  k.alpha = 2.0 * n.z_d1 / nu;
  k.c_prime = std::max(n.z_d1, k.c * (1.0 + k.alpha));
  return k;
}

// Constant of the (u~, b) estimate, assembled from
//   |(eta - 1) U' phi_zz - U''' phi - 2 U'' phi_z| against u~
// with phi_z = -b, |phi/z| <= 2|b| and Young's inequality.
struct LmhdblConstants {
  double a = 0.0;        // coefficient of |b| |u~|
  double b = 0.0;        // coefficient of |d_z b| |u~|
  double c_prime = 0.0;
};

inline LmhdblConstants constants_lmhdbl(const ShearNorms& n, double s, double eta) {
  if (!(s > 0.0) || !(eta > 0.0)) throw InvalidParameter("constants_lmhdbl: S and eta must be positive");
  LmhdblConstants k;
  k.a = 2.0 * (n.z_d3 + n.d2);
  k.b = (1.0 + eta) * n.d1;
  k.c_prime = 0.5 * k.a + k.b * k.b / (2.0 * s * eta);
  return k;
}

struct IntervalVerdict {
  double t = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  bool pass = true;
};

struct InequalityTolerance {
  double rel = 1e-3;
  double abs_scale = 1e-8;  // absolute slack, relative to the largest term seen
  double endpoint_factor = 10.0;
};

namespace detail {

// Centered time derivative of e at record i (one-sided at the ends).
inline double time_derivative(const std::vector<EnergyRecord>& r, const std::vector<double>& e, std::size_t i) {
  const std::size_t n = r.size();
  if (i == 0) return (e[1] - e[0]) / (r[1].t - r[0].t);
  if (i + 1 == n) return (e[n - 1] - e[n - 2]) / (r[n - 1].t - r[n - 2].t);
  return (e[i + 1] - e[i - 1]) / (r[i + 1].t - r[i - 1].t);
}

inline std::vector<IntervalVerdict> differential_check(const std::vector<EnergyRecord>& r,
                                                       const std::function<double(const EnergyRecord&)>& energy,
                                                       const std::function<double(const EnergyRecord&)>& dissipation,
                                                       const std::function<double(const EnergyRecord&)>& bound,
                                                       const InequalityTolerance& tol) {
  if (r.size() < 2) throw InvalidParameter("inequality check: need at least two records");
  std::vector<double> e(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) e[i] = energy(r[i]);
  std::vector<IntervalVerdict> out(r.size());
  double scale = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    out[i].t = r[i].t;
    out[i].lhs = time_derivative(r, e, i) + dissipation(r[i]);
    out[i].rhs = bound(r[i]);
    scale = std::max({scale, std::abs(out[i].lhs), std::abs(out[i].rhs), std::abs(dissipation(r[i]))});
  }
  for (std::size_t i = 0; i < r.size(); ++i) {
    const bool end = i == 0 || i + 1 == r.size();
    const double f = end ? tol.endpoint_factor : 1.0;
    out[i].pass = out[i].lhs <= out[i].rhs * (1.0 + f * tol.rel) + f * tol.abs_scale * scale;
  }
  return out;
}

}  // namespace detail

inline bool all_pass(const std::vector<IntervalVerdict>& v) {
  return std::all_of(v.begin(), v.end(), [](const IntervalVerdict& x) { return x.pass; });
}

// 1/2 d/dt |w|^2 + nu/2 (|d_z w|^2 + |d_x u|^2) <= C |w|^2
inline std::vector<IntervalVerdict> check_ineq_omega(const std::vector<EnergyRecord>& r, double nu, double c,
                                                     const InequalityTolerance& tol = {}) {
  return detail::differential_check(
      r, [](const EnergyRecord& x) { return 0.5 * x.get("omega"); },
      [nu](const EnergyRecord& x) { return 0.5 * nu * (x.get("dz_omega") + x.get("dx_u")); },
      [c](const EnergyRecord& x) { return c * x.get("omega"); }, tol);
}

// d/dt (|u~|^2/2 + S/2 |b|^2) + |d_z u~|^2 + S eta/2 |d_z b|^2 <= C' (|u~|^2 + |b|^2)
inline std::vector<IntervalVerdict> check_lmhdbl_differential(const std::vector<EnergyRecord>& r, double c_prime,
                                                              double s, double eta,
                                                              const InequalityTolerance& tol = {}) {
  return detail::differential_check(
      r, [s](const EnergyRecord& x) { return 0.5 * x.get("ut") + 0.5 * s * x.get("b"); },
      [s, eta](const EnergyRecord& x) { return x.get("dz_ut") + 0.5 * s * eta * x.get("dz_b"); },
      [c_prime](const EnergyRecord& x) { return c_prime * (x.get("ut") + x.get("b")); }, tol);
}

enum class GronwallForm {
  LspVorticity,  // |w|^2 + |u|^2 + int(|d_z b|^2 + |d_z w|^2 + |d_x u|^2)
  LspTimeDerivative,  // int |d_t u|^2 + nu |d_z b|^2 - nu |d_z b_0|^2
  LmhdblModified,  // |u~|^2 + |b|^2 + int(|d_z u~|^2 + |d_z b|^2)
  LmhdblPrimitive,  // |u|^2 + |b|^2 + int(|d_z u|^2 + |d_z b|^2)
};

inline std::string_view to_string(GronwallForm f) {
  switch (f) {
    case GronwallForm::LspVorticity: return "lsp-vorticity";
    case GronwallForm::LspTimeDerivative: return "lsp-time-derivative";
    case GronwallForm::LmhdblModified: return "lmhdbl-modified";
    case GronwallForm::LmhdblPrimitive: return "lmhdbl-primitive";
  }
  return "lsp-vorticity";
}

struct GronwallResult {
  GronwallForm form = GronwallForm::LspVorticity;
  double m_used = 1.0;
  bool pass = true;
  double margin = 0.0;  // min over t of (bound - lhs) / bound
  bool fitted = false;
};

namespace detail {

struct GronwallSeries {
  std::vector<double> t, lhs;
  double e0 = 0.0;
};

inline GronwallSeries gronwall_series(const std::vector<EnergyRecord>& r, GronwallForm form, double nu) {
  GronwallSeries s;
  auto energy = [&](const EnergyRecord& x) {
    switch (form) {
      case GronwallForm::LspVorticity:
      case GronwallForm::LspTimeDerivative: return x.get("omega") + x.get("u");
      case GronwallForm::LmhdblModified: return x.get("ut") + x.get("b");
      case GronwallForm::LmhdblPrimitive: return x.get("u") + x.get("b");
    }
    return 0.0;
  };
  auto dissipation = [&](const EnergyRecord& x) {
    switch (form) {
      case GronwallForm::LspVorticity: return x.get("dz_b") + x.get("dz_omega") + x.get("dx_u");
      case GronwallForm::LspTimeDerivative: return 0.0;
      case GronwallForm::LmhdblModified: return x.get("dz_ut") + x.get("dz_b");
      case GronwallForm::LmhdblPrimitive: return x.get("dz_u") + x.get("dz_b");
    }
    return 0.0;
  };
  s.e0 = energy(r.front());
  double integral = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (i > 0) integral += 0.5 * (r[i].t - r[i - 1].t) * (dissipation(r[i]) + dissipation(r[i - 1]));
    s.t.push_back(r[i].t - r.front().t);
    if (form == GronwallForm::LspTimeDerivative) {
      s.lhs.push_back(r[i].get("int_dt_u") - r.front().get("int_dt_u") +
                      nu * (r[i].get("dz_b") - r.front().get("dz_b")));
    } else {
      s.lhs.push_back(energy(r[i]) + integral);
    }
  }
  return s;
}

inline double gronwall_margin(const GronwallSeries& s, double m) {
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < s.t.size(); ++i) {
    const double bound = m * s.e0 * std::exp(m * s.t[i]);
    if (bound <= 0.0) {
      worst = std::min(worst, s.lhs[i] <= 0.0 ? 0.0 : -std::numeric_limits<double>::infinity());
    } else {
      worst = std::min(worst, (bound - s.lhs[i]) / bound);
    }
  }
  return worst;
}

}  // namespace detail

// Checks lhs(t) <= M E(0) exp(M t). Without a supplied M the smallest M >= 1
// that passes is located by bisection to relative precision 1e-6.
inline GronwallResult check_gronwall(const std::vector<EnergyRecord>& r, GronwallForm form,
                                     std::optional<double> m_fit = std::nullopt, double nu = 1.0) {
  if (r.empty()) throw InvalidParameter("check_gronwall: no records");
  const detail::GronwallSeries s = detail::gronwall_series(r, form, nu);
  GronwallResult out;
  out.form = form;
  if (m_fit) {
    out.m_used = *m_fit;
  } else {
    out.fitted = true;
    auto ok = [&](double m) { return detail::gronwall_margin(s, m) >= 0.0; };
    double lo = 1.0, hi = 1.0;
    if (!ok(1.0)) {
      while (!ok(hi) && hi < 1e8) {
        lo = hi;
        hi *= 2.0;
      }
      if (ok(hi)) {
        while (hi - lo > 1e-6 * hi) {
          const double mid = 0.5 * (lo + hi);
          (ok(mid) ? hi : lo) = mid;
        }
      }
    }
    out.m_used = hi;
  }
  out.margin = detail::gronwall_margin(s, out.m_used);
  out.pass = out.margin >= 0.0;
  return out;
}

// |z^{-1} int_0^z f| / |f| in the quadrature norm; the z = 0 node uses the
// limit f(0).
inline double hardy_ratio(const Grid& g, const RVec& f) {
  const RVec phi = cumulative_z(g, f);
  RVec q(g.n());
  q[0] = f[0];
  for (int i = 1; i < g.n(); ++i) q[i] = phi[i] / g.z(i);
  const double nf = norm2_quad(g, f);
  if (nf == 0.0) return 0.0;
  return std::sqrt(norm2_quad(g, q) / nf);
}

}  // namespace mhdbl
