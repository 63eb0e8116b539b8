#pragma once

// Per-wavenumber generators of the linearized boundary-layer systems about a
// shear flow u = U(z), v = 0:
//
//   LP      d_t u = -ikU u - U' v + d_zz u,                 v = -ik int_0^z u
//   LSP     d_t u = -ikU u - U' v + nu d_zz u + nu ik b,    d_zz b = -ik u
//   LMHDBL  d_t ut = -ikU ut + d_zz ut + S ik b + eta U' d_zz phi - d_zz(U' phi)
//           d_t b  = -ikU b + ik ut + eta d_zz b,           d_z phi = -b
//
// with ut = u + U' phi the modified velocity. Homogeneous Dirichlet conditions
// hold at z = 0 and z = z_max; matrices act on interior values only.
//
// Two independent routes are provided: dense assembly from the stencil,
// cumulative and inverse-Laplacian matrices, and direct column-wise
// evaluation through the grid routines.

#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "mhdbl/grid.hpp"
#include "mhdbl/shear.hpp"

namespace mhdbl {

enum class LinearModel { LP, LSP, LMHDBL };

inline std::string_view to_string(LinearModel m) {
  switch (m) {
    case LinearModel::LP: return "lp";
    case LinearModel::LSP: return "lsp";
    case LinearModel::LMHDBL: return "lmhdbl";
  }
  return "lp";
}

inline LinearModel linear_model_from_string(std::string_view s) {
  if (s == "lp" || s == "LP") return LinearModel::LP;
  if (s == "lsp" || s == "LSP") return LinearModel::LSP;
  if (s == "lmhdbl" || s == "LMHDBL") return LinearModel::LMHDBL;
  throw InvalidParameter("unknown linear model '" + std::string(s) + "' (expected lp|lsp|lmhdbl)");
}

// Shear profile sampled on grid nodes.
struct ProfileOnGrid {
  RVec u, d1, d2, d3;

  ProfileOnGrid() = default;
  ProfileOnGrid(const ShearFlow& f, const Grid& g) : u(g.n()), d1(g.n()), d2(g.n()), d3(g.n()) {
    for (int i = 0; i < g.n(); ++i) {
      const ShearSample s = f(g.z(i));
      u[i] = s.u;
      d1[i] = s.d1;
      d2[i] = s.d2;
      d3[i] = s.d3;
    }
  }
};

struct LinearCoefficients {
  double nu_u = 1.0;  // momentum diffusivity
  double nu_b = 1.0;  // magnetic diffusivity (LMHDBL)
  double s = 1.0;     // coupling (LMHDBL)
};

struct LinearOperator {
  LinearModel model = LinearModel::LP;
  int k = 0;
  LinearCoefficients coefficients;
  CMat matrix;  // interior generator

  CVec apply(const CVec& interior_state) const { return matrix * interior_state; }
  Eigen::Index size() const { return matrix.rows(); }
};

// ---------------------------------------------------------------------------
// Direct evaluation on full columns (boundary rows of the result are zero).

inline CVec lp_tendency(const Grid& g, const ProfileOnGrid& U, int k, const CVec& u, double nu = 1.0,
                        bool with_diffusion = true) {
  const double kk = static_cast<double>(k);
  CVec out = (-kI * kk) * U.u.cwiseProduct(u);
  if (k != 0) {
    const CVec v = recover_v(g, u, k);
    out -= U.d1.cwiseProduct(v);
  }
  if (with_diffusion) out += nu * d2z(g, u);
  out[0] = 0.0;
  out[g.n() - 1] = 0.0;
  return out;
}

inline CVec lsp_tendency(const Grid& g, const ProfileOnGrid& U, int k, const CVec& u, double nu,
                         bool with_diffusion = true) {
  CVec out = lp_tendency(g, U, k, u, nu, with_diffusion);
  if (k != 0) {
    const CVec b = solve_b_from_u(g, u, k);
    out += (nu * kI * static_cast<double>(k)) * b;
  }
  out[0] = 0.0;
  out[g.n() - 1] = 0.0;
  return out;
}

struct ModifiedState {
  CVec ut;  // modified velocity u + U' phi
  CVec b;
};

inline ModifiedState lmhdbl_tendency(const Grid& g, const ProfileOnGrid& U, int k, const ModifiedState& st,
                                     double s, double eta, bool with_diffusion = true) {
  const double kk = static_cast<double>(k);
  const CVec phi = recover_phi(g, st.b);
  const CVec uphi = U.d1.cwiseProduct(phi);
  ModifiedState out;
  out.ut = (-kI * kk) * U.u.cwiseProduct(st.ut) + (s * kI * kk) * st.b +
           eta * U.d1.cwiseProduct(d2z(g, phi)) - d2z(g, uphi);
  out.b = (-kI * kk) * U.u.cwiseProduct(st.b) + (kI * kk) * st.ut;
  if (with_diffusion) {
    out.ut += d2z(g, st.ut);
    out.b += eta * d2z(g, st.b);
  }
  const int last = g.n() - 1;
  out.ut[0] = out.ut[last] = out.b[0] = out.b[last] = 0.0;
  return out;
}

// ---------------------------------------------------------------------------
// Dense assembly.

namespace detail {

inline CMat interior_block(const CMat& full) {
  const Eigen::Index n = full.rows() - 2;
  return full.block(1, 1, n, n);
}

inline CMat lp_full(const Grid& g, const ProfileOnGrid& U, int k, double nu) {
  const double kk = static_cast<double>(k);
  const CMat c = g.cumulative_matrix().cast<cplx>();
  const CMat d2 = g.d2_matrix().cast<cplx>();
  CMat m = nu * d2;
  m.diagonal() += (-kI * kk) * U.u.cast<cplx>();
  // -U' v with v = -ik C u
  m += (kI * kk) * (U.d1.cast<cplx>().asDiagonal() * c);
  return m;
}

}  // namespace detail

inline LinearOperator assemble_lp(const ShearFlow& U, int k, const Grid& g) {
  const ProfileOnGrid pg(U, g);
  return {LinearModel::LP, k, {1.0, 1.0, 0.0}, detail::interior_block(detail::lp_full(g, pg, k, 1.0))};
}

// LP with the magnetic damping -kappa u of the 2D damped Prandtl system.
inline LinearOperator assemble_damped_lp(const ShearFlow& U, int k, const Grid& g, double kappa) {
  LinearOperator op = assemble_lp(U, k, g);
  op.matrix.diagonal().array() -= kappa;
  return op;
}

inline LinearOperator assemble_lsp(const ShearFlow& U, int k, const Grid& g, double nu) {
  if (!(nu > 0.0)) throw InvalidParameter("assemble_lsp: nu must be positive");
  const ProfileOnGrid pg(U, g);
  CMat m = detail::interior_block(detail::lp_full(g, pg, k, nu));
  if (k != 0) {
    const Eigen::Index n = g.n_interior();
    const RMat lap = g.d2_matrix().block(1, 1, n, n);
    // b = lap^{-1} (-ik u) on the interior, homogeneous ends
    const RMat lap_inv = lap.partialPivLu().inverse();
    const double kk = static_cast<double>(k);
    m += (nu * kk * kk) * lap_inv.cast<cplx>();
  }
  return {LinearModel::LSP, k, {nu, 1.0, 0.0}, std::move(m)};
}

inline LinearOperator assemble_lmhdbl(const ShearFlow& U, int k, const Grid& g, double s, double eta) {
  if (!(eta > 0.0)) throw InvalidParameter("assemble_lmhdbl: eta must be positive");
  const ProfileOnGrid pg(U, g);
  const double kk = static_cast<double>(k);
  const int n_z = g.n();
  const CMat d2 = g.d2_matrix().cast<cplx>();
  const CMat phi_of_b = -g.cumulative_matrix().cast<cplx>();
  const CMat ud1 = pg.d1.cast<cplx>().asDiagonal();
  const CMat eye = CMat::Identity(n_z, n_z);

  CMat guu = d2;
  guu.diagonal() += (-kI * kk) * pg.u.cast<cplx>();
  const CMat gub = (s * kI * kk) * eye + eta * ud1 * d2 * phi_of_b - d2 * ud1 * phi_of_b;
  const CMat gbu = (kI * kk) * eye;
  CMat gbb = eta * d2;
  gbb.diagonal() += (-kI * kk) * pg.u.cast<cplx>();

  const Eigen::Index n = g.n_interior();
  CMat m(2 * n, 2 * n);
  m.block(0, 0, n, n) = detail::interior_block(guu);
  m.block(0, n, n, n) = detail::interior_block(gub);
  m.block(n, 0, n, n) = detail::interior_block(gbu);
  m.block(n, n, n, n) = detail::interior_block(gbb);
  return {LinearModel::LMHDBL, k, {1.0, eta, s}, std::move(m)};
}

// ---------------------------------------------------------------------------
// Modified / primitive variables of the linearized MHD layer.

struct PrimitiveState {
  CVec u, v, b, c, phi;
};

inline PrimitiveState to_primitive(const Grid& g, const ProfileOnGrid& U, int k, const ModifiedState& st) {
  PrimitiveState p;
  p.phi = recover_phi(g, st.b);
  p.u = st.ut - U.d1.cwiseProduct(p.phi);
  p.v = recover_v(g, p.u, k);
  p.b = st.b;
  p.c = (kI * static_cast<double>(k)) * p.phi;
  return p;
}

inline ModifiedState from_primitive(const Grid& g, const ProfileOnGrid& U, const CVec& u, const CVec& b) {
  const CVec phi = recover_phi(g, b);
  return {u + U.d1.cwiseProduct(phi), b};
}

// Interior <-> full column helpers.
inline CVec interior(const CVec& full) { return full.segment(1, full.size() - 2); }

inline CVec with_zero_ends(const CVec& interior_values) {
  CVec full = CVec::Zero(interior_values.size() + 2);
  full.segment(1, interior_values.size()) = interior_values;
  return full;
}

}  // namespace mhdbl
