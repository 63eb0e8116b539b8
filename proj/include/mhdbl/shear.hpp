#pragma once

// Background shear flows U(z) with analytic derivatives, and the weighted
// sup-norms that enter the energy constants.

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "mhdbl/errors.hpp"

namespace mhdbl {

enum class ProfileKind { HartmannLike, CriticalBump, Linear, Tabulated };

inline std::string_view to_string(ProfileKind k) {
  switch (k) {
    case ProfileKind::HartmannLike: return "hartmann-like";
    case ProfileKind::CriticalBump: return "critical-bump";
    case ProfileKind::Linear: return "linear";
    case ProfileKind::Tabulated: return "tabulated";
  }
  return "tabulated";
}

inline ProfileKind profile_kind_from_string(std::string_view s) {
  if (s == "hartmann-like" || s == "HartmannLike") return ProfileKind::HartmannLike;
  if (s == "critical-bump" || s == "CriticalBump") return ProfileKind::CriticalBump;
  if (s == "linear" || s == "Linear") return ProfileKind::Linear;
  throw InvalidParameter("unknown profile '" + std::string(s) +
                         "' (expected hartmann-like|critical-bump|linear)");
}

// Values of U, U', U'', U''' at one height.
struct ShearSample {
  double u = 0.0, d1 = 0.0, d2 = 0.0, d3 = 0.0;
};

struct ShearNorms {
  double d1 = 0.0;     // |U'|_inf
  double d2 = 0.0;     // |U''|_inf
  double z_d1 = 0.0;   // |z U'|_inf
  double z_d2 = 0.0;   // |z U''|_inf
  double z_d3 = 0.0;   // |z U'''|_inf
  double min_d1 = 0.0; // min U' over samples (monotonicity indicator)
};

class ShearFlow {
 public:
  using Evaluator = std::function<ShearSample(double)>;

  ShearFlow(std::string name, double amplitude, double u_infinity, Evaluator eval)
      : name_(std::move(name)), amplitude_(amplitude), u_infinity_(u_infinity), eval_(std::move(eval)) {}

  ShearSample operator()(double z) const { return eval_(z); }
  double u(double z) const { return eval_(z).u; }
  double d1(double z) const { return eval_(z).d1; }
  double d2(double z) const { return eval_(z).d2; }
  double d3(double z) const { return eval_(z).d3; }

  const std::string& name() const { return name_; }
  double amplitude() const { return amplitude_; }
  double u_infinity() const { return u_infinity_; }

  // u(0) = 0 and u(z_max) close to the far-field limit.
  bool satisfies_end_conditions(double z_max) const {
    const double tol = 1e-6 * std::max(1.0, std::abs(u_infinity_));
    return std::abs(u(0.0)) <= tol && std::abs(u(z_max) - u_infinity_) <= tol;
  }

 private:
  std::string name_;
  double amplitude_;
  double u_infinity_;
  Evaluator eval_;
};

namespace detail {

// C^3 septic smoothstep on [0, 1]: values and first three derivatives.
inline std::array<double, 4> smoothstep7(double t) {
  if (t <= 0.0) return {0.0, 0.0, 0.0, 0.0};
  if (t >= 1.0) return {1.0, 0.0, 0.0, 0.0};
  const double t2 = t * t, t3 = t2 * t, t4 = t3 * t, t5 = t4 * t, t6 = t5 * t, t7 = t6 * t;
  return {35 * t4 - 84 * t5 + 70 * t6 - 20 * t7,
          140 * t3 - 420 * t4 + 420 * t5 - 140 * t6,
          420 * t2 - 1680 * t3 + 2100 * t4 - 840 * t5,
          840 * t - 5040 * t2 + 8400 * t3 - 4200 * t4};
}

}  // namespace detail

// Cutoff used by the Linear profile: chi = 1 on [0, 2], 0 beyond 4.
inline constexpr double kLinearCutoffStart = 2.0;
inline constexpr double kLinearCutoffEnd = 4.0;

inline ShearFlow builtin_profile(ProfileKind kind, double a) {
  if (a == 0.0 || !std::isfinite(a)) throw InvalidParameter("builtin_profile: amplitude must be non-zero and finite");
  switch (kind) {
    case ProfileKind::HartmannLike:
      return ShearFlow("hartmann-like", a, a, [a](double z) {
        const double e = std::exp(-z);
        return ShearSample{a * (1.0 - e), a * e, -a * e, a * e};
      });
    case ProfileKind::CriticalBump:
      // a z e^{-z}: U'(1) = 0, U''(1) = -a/e.
      return ShearFlow("critical-bump", a, 0.0, [a](double z) {
        const double e = std::exp(-z);
        return ShearSample{a * z * e, a * (1.0 - z) * e, a * (z - 2.0) * e, a * (3.0 - z) * e};
      });
    case ProfileKind::Linear:
      return ShearFlow("linear", a, 0.0, [a](double z) {
        const double w = kLinearCutoffEnd - kLinearCutoffStart;
        const auto s = detail::smoothstep7((z - kLinearCutoffStart) / w);
        const double chi = 1.0 - s[0];
        const double c1 = -s[1] / w, c2 = -s[2] / (w * w), c3 = -s[3] / (w * w * w);
        return ShearSample{a * z * chi, a * (chi + z * c1), a * (2.0 * c1 + z * c2), a * (3.0 * c2 + z * c3)};
      });
    case ProfileKind::Tabulated:
      break;
  }
  throw InvalidParameter("builtin_profile: tabulated profiles are loaded from CSV");
}

inline ShearFlow builtin_profile(std::string_view name, double a) {
  return builtin_profile(profile_kind_from_string(name), a);
}

// Piecewise-linear interpolation of user-supplied columns z, U, U', U'', U'''.
// Beyond the last row the last values are held.
inline ShearFlow tabulated_profile(std::vector<std::array<double, 5>> rows, std::string name = "tabulated") {
  if (rows.size() < 2) throw InvalidParameter("tabulated profile needs at least two rows");
  std::sort(rows.begin(), rows.end(), [](const auto& l, const auto& r) { return l[0] < r[0]; });
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (!(rows[i][0] > rows[i - 1][0])) throw InvalidParameter("tabulated profile: duplicate z values");
  const double u_inf = rows.back()[1];
  return ShearFlow(std::move(name), 1.0, u_inf, [rows = std::move(rows)](double z) {
    if (z <= rows.front()[0]) {
      const auto& r = rows.front();
      return ShearSample{r[1], r[2], r[3], r[4]};
    }
    if (z >= rows.back()[0]) {
      const auto& r = rows.back();
      return ShearSample{r[1], r[2], r[3], r[4]};
    }
    auto it = std::upper_bound(rows.begin(), rows.end(), z, [](double v, const auto& r) { return v < r[0]; });
    const auto& hi = *it;
    const auto& lo = *(it - 1);
    const double t = (z - lo[0]) / (hi[0] - lo[0]);
    auto lerp = [t](double x0, double x1) { return x0 + t * (x1 - x0); };
    return ShearSample{lerp(lo[1], hi[1]), lerp(lo[2], hi[2]), lerp(lo[3], hi[3]), lerp(lo[4], hi[4])};
  });
}

inline ShearFlow load_profile_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidParameter("cannot open profile CSV '" + path + "'");
  std::vector<std::array<double, 5>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    std::array<double, 5> r{};
    if (!(ss >> r[0] >> r[1] >> r[2] >> r[3] >> r[4])) continue;  // header row
    rows.push_back(r);
  }
  return tabulated_profile(std::move(rows), path);
}

// Composite geometric + uniform sample set on [0, z_max].
inline std::vector<double> norm_sample_points(double z_max, int n_samples) {
  std::vector<double> zs;
  zs.reserve(static_cast<std::size_t>(n_samples) + 1);
  const int n_geo = n_samples / 4;
  const int n_uni = n_samples - n_geo;
  zs.push_back(0.0);
  const double z_min_geo = std::min(1e-6, z_max * 1e-6);
  for (int i = 0; i < n_geo; ++i) {
    const double t = static_cast<double>(i) / std::max(1, n_geo - 1);
    zs.push_back(z_min_geo * std::pow(z_max / z_min_geo, t));
  }
  for (int i = 0; i <= n_uni; ++i) zs.push_back(z_max * static_cast<double>(i) / n_uni);
  std::sort(zs.begin(), zs.end());
  zs.erase(std::unique(zs.begin(), zs.end()), zs.end());
  return zs;
}

namespace detail {

// Golden-section maximization of g on [lo, hi].
template <class G>
double polish_max(const G& g, double lo, double hi) {
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo, b = hi;
  double c = b - r * (b - a), d = a + r * (b - a);
  double gc = g(c), gd = g(d);
  for (int it = 0; it < 80 && b - a > 1e-14 * std::max(1.0, std::abs(b)); ++it) {
    if (gc > gd) {
      b = d; d = c; gd = gc; c = b - r * (b - a); gc = g(c);
    } else {
      a = c; c = d; gc = gd; d = a + r * (b - a); gd = g(d);
    }
  }
  return std::max({g(lo), g(hi), gc, gd});
}

}  // namespace detail

// Suprema over the composite sample set, each refined by a local
// golden-section search around the best sample.
inline ShearNorms weighted_norms(const ShearFlow& f, double z_max, int n_samples) {
  if (!(z_max > 0.0)) throw InvalidParameter("weighted_norms: z_max must be positive");
  if (n_samples < 1000) throw InvalidParameter("weighted_norms: need at least 1000 samples");
  const std::vector<double> zs = norm_sample_points(z_max, n_samples);
  const std::array<std::function<double(double)>, 5> quantities = {
      [&](double z) { return std::abs(f(z).d1); },
      [&](double z) { return std::abs(f(z).d2); },
      [&](double z) { return std::abs(z * f(z).d1); },
      [&](double z) { return std::abs(z * f(z).d2); },
      [&](double z) { return std::abs(z * f(z).d3); }};
  std::array<double, 5> best{};
  ShearNorms n;
  n.min_d1 = f.d1(0.0);
  for (std::size_t q = 0; q < quantities.size(); ++q) {
    std::size_t arg = 0;
    for (std::size_t i = 0; i < zs.size(); ++i) {
      const double v = quantities[q](zs[i]);
      if (v > best[q]) {
        best[q] = v;
        arg = i;
      }
    }
    const double lo = zs[arg == 0 ? 0 : arg - 1];
    const double hi = zs[std::min(arg + 1, zs.size() - 1)];
    if (hi > lo) best[q] = std::max(best[q], detail::polish_max(quantities[q], lo, hi));
  }
  for (double z : zs) n.min_d1 = std::min(n.min_d1, f.d1(z));
  n.d1 = best[0];
  n.d2 = best[1];
  n.z_d1 = best[2];
  n.z_d2 = best[3];
  n.z_d3 = best[4];
  return n;
}

}  // namespace mhdbl
