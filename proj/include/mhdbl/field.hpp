#pragma once

// x-periodic fields stored per Fourier mode: an N x M complex matrix whose
// column j is the z-profile of wavenumber grid.wavenumber(j), with
//   f(x, z) = sum_k f_k(z) exp(i k x),  x in [0, 2 pi).

#include <complex>
#include <map>
#include <string>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "mhdbl/grid.hpp"

namespace mhdbl {

struct Field {
  std::string model;
  std::map<std::string, CMat> columns;

  CMat& operator[](const std::string& name) { return columns[name]; }
  const CMat& at(const std::string& name) const {
    auto it = columns.find(name);
    if (it == columns.end()) throw InvalidParameter("Field: no unknown named '" + name + "'");
    return it->second;
  }
  bool has(const std::string& name) const { return columns.count(name) != 0; }
};

class Spectral {
 public:
  explicit Spectral(const Grid& g) : n_z_(g.n()), m_(g.n_modes()) {
    k_.resize(m_);
    for (int j = 0; j < m_; ++j) k_[j] = g.wavenumber(j);
  }

  int n_modes() const { return m_; }
  int wavenumber(int j) const { return k_[j]; }
  // Largest retained |k| under the 2/3 rule.
  int dealias_cutoff() const { return (m_ - 1) / 3; }

  double x(int j) const { return 2.0 * M_PI * j / m_; }

  RMat to_physical(const CMat& spec) const {
    RMat out(spec.rows(), m_);
    std::vector<cplx> in(m_), tmp(m_);
    for (Eigen::Index i = 0; i < spec.rows(); ++i) {
      for (int j = 0; j < m_; ++j) in[j] = spec(i, j);
      fft_.inv(tmp, in);
      for (int j = 0; j < m_; ++j) out(i, j) = tmp[j].real() * m_;
    }
    return out;
  }

  CMat to_spectral(const RMat& phys) const {
    CMat out(phys.rows(), m_);
    std::vector<double> in(m_);
    std::vector<cplx> tmp(m_);
    for (Eigen::Index i = 0; i < phys.rows(); ++i) {
      for (int j = 0; j < m_; ++j) in[j] = phys(i, j);
      fft_.fwd(tmp, in);
      for (int j = 0; j < m_; ++j) out(i, j) = tmp[j] / static_cast<double>(m_);
    }
    return out;
  }

  // Spectral x-derivative; the Nyquist slot is dropped.
  CMat dx(const CMat& spec) const {
    CMat out = spec;
    for (int j = 0; j < m_; ++j) {
      const int k = k_[j];
      out.col(j) *= (2 * std::abs(k) == m_) ? cplx{0.0, 0.0} : kI * static_cast<double>(k);
    }
    return out;
  }

  void dealias(CMat& spec) const {
    const int cut = dealias_cutoff();
    for (int j = 0; j < m_; ++j)
      if (std::abs(k_[j]) > cut) spec.col(j).setZero();
  }

  // Replaces the negative-k half by conjugates of the positive half so the
  // physical field is real.
  void symmetrize(CMat& spec) const {
    spec.col(0) = spec.col(0).real().cast<cplx>();
    for (int j = 1; j < m_; ++j) {
      const int k = k_[j];
      if (2 * std::abs(k) == m_) {
        spec.col(j) = spec.col(j).real().cast<cplx>();
      } else if (k < 0) {
        spec.col(j) = spec.col(-k).conjugate();
      }
    }
  }

  // max |f_{-k} - conj(f_k)| over all modes.
  double conjugate_asymmetry(const CMat& spec) const {
    double worst = 0.0;
    for (int j = 1; j < m_; ++j) {
      const int k = k_[j];
      if (k > 0 && 2 * k != m_) {
        const int jm = m_ - j;
        worst = std::max(worst, (spec.col(jm) - spec.col(j).conjugate()).cwiseAbs().maxCoeff());
      }
    }
    worst = std::max(worst, spec.col(0).imag().cwiseAbs().maxCoeff());
    return worst;
  }

 private:
  int n_z_;
  int m_;
  std::vector<int> k_;
  mutable Eigen::FFT<double> fft_;
};

// L^2(T x (0, z_max)) norm squared computed mode-wise: 2 pi sum_k |f_k|^2_quad.
inline double l2_norm2_modes(const Grid& g, const CMat& spec) {
  double acc = 0.0;
  for (Eigen::Index j = 0; j < spec.cols(); ++j) acc += norm2_quad<cplx>(g, spec.col(j));
  return 2.0 * M_PI * acc;
}

// Same norm from physical samples: (2 pi / M) sum_j |f(x_j, .)|^2_quad.
inline double l2_norm2_physical(const Grid& g, const RMat& phys) {
  double acc = 0.0;
  for (Eigen::Index j = 0; j < phys.cols(); ++j)
    for (int i = 0; i < g.n(); ++i) acc += g.weights()[i] * phys(i, j) * phys(i, j);
  return 2.0 * M_PI * acc / static_cast<double>(phys.cols());
}

// Applies a column operation to every mode.
template <class Op>
CMat map_modes(const Grid& g, const CMat& spec, Op&& op) {
  CMat out(spec.rows(), spec.cols());
  for (Eigen::Index j = 0; j < spec.cols(); ++j) out.col(j) = op(CVec(spec.col(j)), g.wavenumber(static_cast<int>(j)));
  return out;
}

}  // namespace mhdbl
