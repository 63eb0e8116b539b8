#pragma once

// Truncated half-line z-grid: finite-difference derivatives, trapezoid
// quadrature, cumulative integrals and the reconstruction maps
//   v = -d/dx int_0^z u,   d_zz b = -d_x u,   d_z phi = -b.

#include <cmath>
#include <complex>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "mhdbl/errors.hpp"

namespace mhdbl {

using cplx = std::complex<double>;
using RVec = Eigen::VectorXd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using CMat = Eigen::MatrixXcd;

inline constexpr cplx kI{0.0, 1.0};

struct Stretching {
  enum class Kind { Uniform, TanhCluster };
  Kind kind = Kind::Uniform;
  double beta = 0.0;

  static Stretching uniform() { return {}; }
  static Stretching tanh_cluster(double beta) { return {Kind::TanhCluster, beta}; }
};

// Finite-difference weights for the m-th derivative at x0 from nodes xs
// (Fornberg's recursion).
inline std::vector<double> fd_weights(double x0, const std::vector<double>& xs, int m) {
  const int n = static_cast<int>(xs.size());
  std::vector<std::vector<double>> c(n, std::vector<double>(m + 1, 0.0));
  double c1 = 1.0, c4 = xs[0] - x0;
  c[0][0] = 1.0;
  for (int i = 1; i < n; ++i) {
    const int mn = std::min(i, m);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = xs[i] - x0;
    for (int j = 0; j < i; ++j) {
      const double c3 = xs[i] - xs[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k > 0; --k) c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int k = mn; k > 0; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) w[i] = c[i][m];
  return w;
}

// One stencil row: weights applied to f[start], f[start+1], ...
struct StencilRow {
  int start = 0;
  std::vector<double> w;
};

class Grid {
 public:
  Grid(int n_z, double z_max, Stretching stretching = Stretching::uniform(), int n_modes = 2)
      : stretching_(stretching), n_modes_(n_modes) {
    if (n_z < 4) throw InvalidParameter("Grid: need at least 4 z-nodes");
    if (!(z_max > 0.0) || !std::isfinite(z_max)) throw InvalidParameter("Grid: z_max must be positive");
    if (n_modes < 2 || n_modes % 2 != 0) throw InvalidParameter("Grid: number of x-modes must be even and >= 2");
    if (stretching.kind == Stretching::Kind::TanhCluster && !(stretching.beta > 0.0))
      throw InvalidParameter("Grid: tanh clustering needs beta > 0");

    z_.resize(n_z);
    for (int i = 0; i < n_z; ++i) {
      const double s = static_cast<double>(i) / (n_z - 1);
      if (stretching.kind == Stretching::Kind::Uniform) {
        z_[i] = z_max * s;
      } else {
        const double b = stretching.beta;
        z_[i] = z_max * (1.0 - std::tanh(b * (1.0 - s)) / std::tanh(b));
      }
    }
    z_[0] = 0.0;
    z_[n_z - 1] = z_max;
    for (int i = 1; i < n_z; ++i)
      if (!(z_[i] > z_[i - 1])) throw InvalidParameter("Grid: nodes are not strictly increasing");

    w_ = RVec::Zero(n_z);
    for (int i = 0; i + 1 < n_z; ++i) {
      const double h = z_[i + 1] - z_[i];
      w_[i] += 0.5 * h;
      w_[i + 1] += 0.5 * h;
    }

    d1_.resize(n_z);
    d2_.resize(n_z);
    const std::vector<double> zs(z_.data(), z_.data() + n_z);
    auto nodes = [&](int start, int count) {
      return std::vector<double>(zs.begin() + start, zs.begin() + start + count);
    };
    for (int i = 0; i < n_z; ++i) {
      if (i == 0) {
        d1_[i] = {0, fd_weights(z_[0], nodes(0, 3), 1)};
        d2_[i] = {0, fd_weights(z_[0], nodes(0, 4), 2)};
      } else if (i == n_z - 1) {
        d1_[i] = {n_z - 3, fd_weights(z_[i], nodes(n_z - 3, 3), 1)};
        d2_[i] = {n_z - 4, fd_weights(z_[i], nodes(n_z - 4, 4), 2)};
      } else {
        d1_[i] = {i - 1, fd_weights(z_[i], nodes(i - 1, 3), 1)};
        d2_[i] = {i - 1, fd_weights(z_[i], nodes(i - 1, 3), 2)};
      }
    }
  }

  int n() const { return static_cast<int>(z_.size()); }
  int n_interior() const { return n() - 2; }
  double z_max() const { return z_[n() - 1]; }
  double z(int i) const { return z_[i]; }
  const RVec& nodes() const { return z_; }
  const RVec& weights() const { return w_; }
  const Stretching& stretching() const { return stretching_; }
  int n_modes() const { return n_modes_; }
  double x_period() const { return 2.0 * M_PI; }

  // Wavenumber of FFT slot j: 0, 1, ..., M/2, -M/2+1, ..., -1.
  int wavenumber(int j) const { return j <= n_modes_ / 2 ? j : j - n_modes_; }
  int slot(int k) const { return k >= 0 ? k : k + n_modes_; }

  const StencilRow& d1_row(int i) const { return d1_[i]; }
  const StencilRow& d2_row(int i) const { return d2_[i]; }

  // Dense matrices of the stencils (used for operator assembly).
  RMat d1_matrix() const { return stencil_matrix(d1_); }
  RMat d2_matrix() const { return stencil_matrix(d2_); }

  // Lower-triangular trapezoid matrix: (C f)_i = int_0^{z_i} f.
  RMat cumulative_matrix() const {
    const int n_z = n();
    RMat c = RMat::Zero(n_z, n_z);
    for (int i = 1; i < n_z; ++i) {
      c.row(i) = c.row(i - 1);
      const double h = z_[i] - z_[i - 1];
      c(i, i - 1) += 0.5 * h;
      c(i, i) += 0.5 * h;
    }
    return c;
  }

 private:
  RMat stencil_matrix(const std::vector<StencilRow>& rows) const {
    RMat m = RMat::Zero(n(), n());
    for (int i = 0; i < n(); ++i)
      for (std::size_t j = 0; j < rows[i].w.size(); ++j) m(i, rows[i].start + static_cast<int>(j)) = rows[i].w[j];
    return m;
  }

  RVec z_;
  RVec w_;
  Stretching stretching_;
  int n_modes_;
  std::vector<StencilRow> d1_, d2_;
};

namespace detail {

template <class Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> apply_stencil(const Grid& g, bool second,
                                                       const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& f) {
  if (f.size() != g.n()) throw InvalidParameter("column length does not match grid");
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> out(f.size());
  for (int i = 0; i < g.n(); ++i) {
    const StencilRow& row = second ? g.d2_row(i) : g.d1_row(i);
    Scalar acc{0};
    for (std::size_t j = 0; j < row.w.size(); ++j) acc += row.w[j] * f[row.start + static_cast<int>(j)];
    out[i] = acc;
  }
  return out;
}

}  // namespace detail

template <class Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> d1z(const Grid& g, const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& f) {
  return detail::apply_stencil(g, false, f);
}

template <class Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> d2z(const Grid& g, const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& f) {
  return detail::apply_stencil(g, true, f);
}

// Trapezoid running integral from z = 0.
template <class Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> cumulative_z(const Grid& g, const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& f) {
  if (f.size() != g.n()) throw InvalidParameter("column length does not match grid");
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> out(f.size());
  out[0] = Scalar{0};
  for (int i = 1; i < g.n(); ++i) out[i] = out[i - 1] + 0.5 * (g.z(i) - g.z(i - 1)) * (f[i] + f[i - 1]);
  return out;
}

// Trapezoid integral of |f|^2.
template <class Scalar>
double norm2_quad(const Grid& g, const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& f) {
  double acc = 0.0;
  for (int i = 0; i < g.n(); ++i) acc += g.weights()[i] * std::norm(f[i]);
  return acc;
}

// Trapezoid inner product int f conj(g).
inline cplx inner_quad(const Grid& g, const CVec& f, const CVec& h) {
  cplx acc{0.0, 0.0};
  for (int i = 0; i < g.n(); ++i) acc += g.weights()[i] * f[i] * std::conj(h[i]);
  return acc;
}

// Sum of |f_{i+1} - f_i|^2 / h_i: the gradient norm that is exactly dual to the
// three-point second difference under trapezoid weights.
template <class Scalar>
double gradient_norm2_staggered(const Grid& g, const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& f) {
  double acc = 0.0;
  for (int i = 0; i + 1 < g.n(); ++i) acc += std::norm(f[i + 1] - f[i]) / (g.z(i + 1) - g.z(i));
  return acc;
}

inline CVec recover_v(const Grid& g, const CVec& u_k, int k) {
  if (k == 0) return CVec::Zero(u_k.size());
  return (-kI * static_cast<double>(k)) * cumulative_z(g, u_k);
}

inline CVec recover_phi(const Grid& g, const CVec& b_k) { return -cumulative_z(g, b_k); }

// Factored tridiagonal system on the interior nodes 1..N-2 of
//   alpha * f - beta * d2z f
// (alpha = 0, beta = -1 gives the plain second difference).
class InteriorTridiagonal {
 public:
  InteriorTridiagonal(const Grid& g, double alpha, double beta) : n_(g.n_interior()) {
    lower_.resize(n_);
    diag_.resize(n_);
    upper_.resize(n_);
    wall_coef_ = 0.0;
    far_coef_ = 0.0;
    for (int r = 0; r < n_; ++r) {
      const int i = r + 1;
      const StencilRow& row = g.d2_row(i);
      // interior rows of d2 are three-point stencils starting at i-1
      lower_[r] = -beta * row.w[0];
      diag_[r] = alpha - beta * row.w[1];
      upper_[r] = -beta * row.w[2];
    }
    wall_coef_ = lower_[0];
    far_coef_ = upper_[n_ - 1];
    // forward elimination, stored for repeated solves
    cprime_.resize(n_);
    denom_.resize(n_);
    double prev_c = 0.0;
    for (int r = 0; r < n_; ++r) {
      const double d = diag_[r] - (r > 0 ? lower_[r] * prev_c : 0.0);
      if (d == 0.0 || !std::isfinite(d)) throw NumericalError("InteriorTridiagonal: singular system");
      denom_[r] = d;
      cprime_[r] = (r + 1 < n_) ? upper_[r] / d : 0.0;
      prev_c = cprime_[r];
    }
  }

  // Solves for the interior values given right-hand side on the interior and
  // Dirichlet values at both ends. Returns the full column.
  template <class Scalar>
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> solve(const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& rhs_interior,
                                                 Scalar wall, Scalar far) const {
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> d(n_);
    for (int r = 0; r < n_; ++r) d[r] = rhs_interior[r];
    d[0] -= wall_coef_ * wall;
    d[n_ - 1] -= far_coef_ * far;
    d[0] /= denom_[0];
    for (int r = 1; r < n_; ++r) d[r] = (d[r] - lower_[r] * d[r - 1]) / denom_[r];
    for (int r = n_ - 2; r >= 0; --r) d[r] -= cprime_[r] * d[r + 1];
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> out(n_ + 2);
    out[0] = wall;
    out.segment(1, n_) = d;
    out[n_ + 1] = far;
    return out;
  }

  int size() const { return n_; }

 private:
  int n_;
  std::vector<double> lower_, diag_, upper_, cprime_, denom_;
  double wall_coef_, far_coef_;
};

// Solves d_zz b = -i k u with b(0) = 0 and b(z_max) = far.
inline CVec solve_b_from_u(const Grid& g, const CVec& u_k, int k, cplx far = {0.0, 0.0}) {
  if (k == 0) throw InvalidParameter("solve_b_from_u: the zero mode has no Shercliff relation");
  const InteriorTridiagonal lap(g, 0.0, -1.0);
  CVec rhs = (-kI * static_cast<double>(k)) * u_k.segment(1, g.n_interior());
  CVec b = lap.solve<cplx>(rhs, cplx{0.0, 0.0}, far);
  return b;
}

}  // namespace mhdbl
