#pragma once

// Growth-rate scans over wavenumber for the linearized models, power-law fits
// of rate against k, and the ill-posed / bounded verdicts.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mhdbl/dense_eigen.hpp"
#include "mhdbl/linops.hpp"

namespace mhdbl {

enum class ScanModel { LP, DampedLP, LSP, LMHDBL };

inline std::string_view to_string(ScanModel m) {
  switch (m) {
    case ScanModel::LP: return "lp";
    case ScanModel::DampedLP: return "damped-lp";
    case ScanModel::LSP: return "lsp";
    case ScanModel::LMHDBL: return "lmhdbl";
  }
  return "lp";
}

inline ScanModel scan_model_from_string(std::string_view s) {
  if (s == "lp") return ScanModel::LP;
  if (s == "damped-lp" || s == "damped") return ScanModel::DampedLP;
  if (s == "lsp") return ScanModel::LSP;
  if (s == "lmhdbl") return ScanModel::LMHDBL;
  throw InvalidParameter("unknown spectrum model '" + std::string(s) + "' (expected lp|damped-lp|lsp|lmhdbl)");
}

struct ScanCoefficients {
  double nu = 1.0;     // Ha/Re for LSP
  double kappa = 0.0;  // Ha^2/Re for the damped variant
  double s = 1.0;      // coupling for LMHDBL
  double eta = 1.0;    // Re/Rm for LMHDBL
};

struct PowerLawFit {
  double p = std::numeric_limits<double>::quiet_NaN();
  double c = std::numeric_limits<double>::quiet_NaN();
  double residual = std::numeric_limits<double>::quiet_NaN();  // RMS of log residuals
  int n_points = 0;

  bool valid() const { return n_points >= 2 && std::isfinite(p); }
};

struct SpectrumScan {
  ScanModel model = ScanModel::LP;
  std::string profile;
  std::vector<int> k_list;
  std::vector<double> rates;
  PowerLawFit fit;
};

inline double growth_rate(const LinearOperator& op) {
  const std::string ctx = std::string(to_string(op.model)) + " k=" + std::to_string(op.k);
  return max_real_part(dense_eigenvalues(op.matrix, ctx));
}

inline LinearOperator assemble(ScanModel model, const ShearFlow& U, int k, const Grid& g, const ScanCoefficients& c) {
  switch (model) {
    case ScanModel::LP: return assemble_lp(U, k, g);
    case ScanModel::DampedLP: return assemble_damped_lp(U, k, g, c.kappa);
    case ScanModel::LSP: return assemble_lsp(U, k, g, c.nu);
    case ScanModel::LMHDBL: return assemble_lmhdbl(U, k, g, c.s, c.eta);
  }
  throw InvalidParameter("assemble: unknown model");
}

// Least squares of log(rate) on log(k) over the upper half of the list,
// keeping strictly positive rates only.
inline PowerLawFit fit_power_law(const std::vector<int>& k_list, const std::vector<double>& rates) {
  PowerLawFit fit;
  std::vector<double> xs, ys;
  for (std::size_t i = k_list.size() / 2; i < k_list.size(); ++i) {
    if (rates[i] > 0.0 && std::isfinite(rates[i])) {
      xs.push_back(std::log(static_cast<double>(k_list[i])));
      ys.push_back(std::log(rates[i]));
    }
  }
  fit.n_points = static_cast<int>(xs.size());
  if (xs.size() < 2) return fit;
  const double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double den = n * sxx - sx * sx;
  if (den == 0.0) return fit;
  fit.p = (n * sxy - sx * sy) / den;
  const double logc = (sy - fit.p * sx) / n;
  fit.c = std::exp(logc);
  double ss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (logc + fit.p * xs[i]);
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / n);
  return fit;
}

// Growth rate of one wavenumber; the damped variant is the LP rate shifted by -kappa.
inline double scan_rate(ScanModel model, const ShearFlow& U, int k, const Grid& g, const ScanCoefficients& c = {}) {
  if (model == ScanModel::DampedLP) return growth_rate(assemble_lp(U, k, g)) - c.kappa;
  return growth_rate(assemble(model, U, k, g, c));
}

// Rates over a wavenumber list.
inline SpectrumScan scan(ScanModel model, const ShearFlow& U, const std::vector<int>& k_list, const Grid& g,
                         const ScanCoefficients& c = {}) {
  if (k_list.empty()) throw InvalidParameter("scan: empty wavenumber list");
  for (std::size_t i = 0; i < k_list.size(); ++i) {
    if (k_list[i] <= 0) throw InvalidParameter("scan: wavenumbers must be positive");
    if (i > 0 && k_list[i] <= k_list[i - 1]) throw InvalidParameter("scan: wavenumbers must be strictly increasing");
  }
  SpectrumScan out;
  out.model = model;
  out.profile = U.name();
  out.k_list = k_list;
  out.rates.reserve(k_list.size());
  for (int k : k_list) out.rates.push_back(scan_rate(model, U, k, g, c));
  out.fit = fit_power_law(out.k_list, out.rates);
  return out;
}

enum class Verdict { SobolevIllPosed, SobolevBounded, Inconclusive };

inline std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::SobolevIllPosed: return "SobolevIllPosed";
    case Verdict::SobolevBounded: return "SobolevBounded";
    case Verdict::Inconclusive: return "Inconclusive";
  }
  return "Inconclusive";
}

struct VerdictThresholds {
  double min_exponent = 0.35;
  double max_fit_residual = 0.1;
  double plateau = 0.10;          // allowed rise of the last rate over the previous one
  double bound_tolerance = 0.05;  // sup rate <= bound (1 + tol)
  double grid_agreement = 0.02;   // max relative rate change under (N, z_max) doubling
};

// Largest rate difference between two scans on the same k list, relative to
// the largest |rate| of either scan (rates crossing zero make a per-k ratio
// meaningless).
inline double max_relative_change(const SpectrumScan& a, const SpectrumScan& b) {
  if (a.k_list != b.k_list) throw InvalidParameter("max_relative_change: scans use different wavenumbers");
  double scale = 0.0, worst = 0.0;
  for (std::size_t i = 0; i < a.rates.size(); ++i) {
    scale = std::max({scale, std::abs(a.rates[i]), std::abs(b.rates[i])});
    worst = std::max(worst, std::abs(a.rates[i] - b.rates[i]));
  }
  return scale > 0.0 ? worst / scale : 0.0;
}

inline bool rates_increasing(const std::vector<double>& r, std::size_t from) {
  for (std::size_t i = from + 1; i < r.size(); ++i)
    if (!(r[i] > r[i - 1])) return false;
  return true;
}

// Tail does not rise: the last rate exceeds the previous one by at most
// `plateau` times its magnitude.
inline bool tail_not_rising(const std::vector<double>& r, double plateau) {
  if (r.size() < 2) return false;
  const double last = r.back(), prev = r[r.size() - 2];
  return last - prev <= plateau * std::abs(prev);
}

inline Verdict verdict(const SpectrumScan& s, double energy_bound, const VerdictThresholds& th = {},
                       const SpectrumScan* refined = nullptr) {
  if (s.k_list.size() < 2) return Verdict::Inconclusive;
  Verdict v = Verdict::Inconclusive;
  const double sup = *std::max_element(s.rates.begin(), s.rates.end());
  if (s.fit.valid() && s.fit.p >= th.min_exponent && s.fit.residual <= th.max_fit_residual &&
      rates_increasing(s.rates, s.k_list.size() / 2)) {
    v = Verdict::SobolevIllPosed;
  } else if (std::isfinite(energy_bound) && sup <= energy_bound * (1.0 + th.bound_tolerance) &&
             tail_not_rising(s.rates, th.plateau)) {
    v = Verdict::SobolevBounded;
  }
  if (refined != nullptr && v != Verdict::Inconclusive && max_relative_change(s, *refined) > th.grid_agreement)
    v = Verdict::Inconclusive;
  return v;
}

}  // namespace mhdbl
