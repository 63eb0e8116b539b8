#pragma once

// Explicit boundary-layer solutions: the Hartmann profiles and the
// Fourier-space Shercliff profiles, with residual checks against their
// defining ODE systems
//   Hartmann:  u'' + b' = 0,  u' + b'' = 0
//   Shercliff: i xi (b - b_inf) + u'' = 0,  i xi u + b'' = 0.

#include <algorithm>
#include <cmath>
#include <complex>
#include <utility>

#include "mhdbl/grid.hpp"

namespace mhdbl {

struct HartmannValue {
  double u = 0.0, b = 0.0;
};

// Profiles in layer variables; pass scale = Ha to evaluate in the original
// wall-normal coordinate (z -> Ha z).
inline HartmannValue hartmann_eval(double u_inf, double z, double scale = 1.0) {
  if (!(z >= 0.0)) throw DomainError("hartmann_eval: z must be non-negative");
  if (std::isinf(z)) return {u_inf, u_inf};
  const double f = -std::expm1(-scale * z);
  return {f * u_inf, f * u_inf};
}

struct HartmannProfile {
  double u_inf = 1.0;

  HartmannValue operator()(double z) const { return hartmann_eval(u_inf, z); }
  double du(double z) const { return u_inf * std::exp(-z); }
  double d2u(double z) const { return -u_inf * std::exp(-z); }
  // b coincides with u
  double db(double z) const { return du(z); }
  double d2b(double z) const { return d2u(z); }
};

struct ResidualNorms {
  double first = 0.0;   // max |residual of the first equation|
  double second = 0.0;  // max |residual of the second equation|
  double max() const { return std::max(first, second); }
};

enum class DerivativeMode { Analytic, FiniteDifference };

inline ResidualNorms hartmann_residual(const HartmannProfile& p, const Grid& g,
                                       DerivativeMode mode = DerivativeMode::Analytic) {
  ResidualNorms r;
  if (mode == DerivativeMode::Analytic) {
    for (int i = 0; i < g.n(); ++i) {
      const double z = g.z(i);
      r.first = std::max(r.first, std::abs(p.d2u(z) + p.db(z)));
      r.second = std::max(r.second, std::abs(p.du(z) + p.d2b(z)));
    }
    return r;
  }
  RVec u(g.n()), b(g.n());
  for (int i = 0; i < g.n(); ++i) {
    const auto v = p(g.z(i));
    u[i] = v.u;
    b[i] = v.b;
  }
  const RVec du = d1z(g, u), d2u = d2z(g, u), db = d1z(g, b), d2b = d2z(g, b);
  for (int i = 1; i + 1 < g.n(); ++i) {
    r.first = std::max(r.first, std::abs(d2u[i] + db[i]));
    r.second = std::max(r.second, std::abs(du[i] + d2b[i]));
  }
  return r;
}

struct ShercliffValue {
  cplx u_hat, b_hat;
};

inline ShercliffValue shercliff_eval(cplx b_inf_hat, double xi, double z) {
  if (xi == 0.0) throw DomainError("shercliff_eval: the zero mode carries no Shercliff layer");
  if (!(z >= 0.0)) throw DomainError("shercliff_eval: z must be non-negative");
  const double q = std::sqrt(std::abs(xi) / 2.0);
  const double sgn = xi > 0.0 ? 1.0 : -1.0;
  const double e = std::exp(-q * z);
  return {-kI * sgn * b_inf_hat * e * std::sin(q * z), b_inf_hat * (1.0 - e * std::cos(q * z))};
}

struct ShercliffProfile {
  cplx b_inf_hat{1.0, 0.0};

  ShercliffValue operator()(double xi, double z) const { return shercliff_eval(b_inf_hat, xi, z); }

  cplx d2u(double xi, double z) const {
    const double q = std::sqrt(std::abs(xi) / 2.0);
    const double sgn = xi > 0.0 ? 1.0 : -1.0;
    return -kI * sgn * b_inf_hat * (-2.0 * q * q * std::exp(-q * z) * std::cos(q * z));
  }
  cplx d2b(double xi, double z) const {
    const double q = std::sqrt(std::abs(xi) / 2.0);
    return -b_inf_hat * 2.0 * q * q * std::exp(-q * z) * std::sin(q * z);
  }
};

inline ResidualNorms shercliff_residual(const ShercliffProfile& p, double xi, const Grid& g,
                                        DerivativeMode mode = DerivativeMode::Analytic) {
  if (xi == 0.0) throw DomainError("shercliff_residual: xi must be non-zero");
  ResidualNorms r;
  CVec u(g.n()), b(g.n());
  for (int i = 0; i < g.n(); ++i) {
    const auto v = p(xi, g.z(i));
    u[i] = v.u_hat;
    b[i] = v.b_hat;
  }
  if (mode == DerivativeMode::Analytic) {
    for (int i = 0; i < g.n(); ++i) {
      const double z = g.z(i);
      r.first = std::max(r.first, std::abs(kI * xi * (b[i] - p.b_inf_hat) + p.d2u(xi, z)));
      r.second = std::max(r.second, std::abs(kI * xi * u[i] + p.d2b(xi, z)));
    }
    return r;
  }
  const CVec d2u = d2z(g, u), d2b = d2z(g, b);
  for (int i = 1; i + 1 < g.n(); ++i) {
    r.first = std::max(r.first, std::abs(kI * xi * (b[i] - p.b_inf_hat) + d2u[i]));
    r.second = std::max(r.second, std::abs(kI * xi * u[i] + d2b[i]));
  }
  return r;
}

}  // namespace mhdbl
