#pragma once

// Dimensionless parameters and the boundary-layer regime classifier.
//
// Ha = sqrt(S Re Rm). Transverse fields (background e_z) give Hartmann-type
// layers of thickness 1/Ha, tangent fields (background e_x) give Shercliff-type
// layers of thickness Ha^{-1/2}, and the fully coupled layer has thickness
// Re^{-1/2}. Asymptotic relations ">>" and "~" are realized through the
// ratio thresholds in RatioThresholds.

#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mhdbl/errors.hpp"

namespace mhdbl {

enum class Orientation { Transverse, Tangent };

enum class Regime {
  Hartmann,
  DampedPrandtl,
  Shercliff,
  MixedPrandtlShercliff,
  FullyNonlinearMHD,
  ClassicalPrandtl,
  Indeterminate
};

inline std::string_view to_string(Orientation o) {
  return o == Orientation::Transverse ? "transverse" : "tangent";
}

inline Orientation orientation_from_string(std::string_view s) {
  if (s == "transverse") return Orientation::Transverse;
  if (s == "tangent") return Orientation::Tangent;
  throw InvalidParameter("unknown orientation '" + std::string(s) + "' (expected transverse|tangent)");
}

inline std::string_view to_string(Regime r) {
  switch (r) {
    case Regime::Hartmann: return "Hartmann";
    case Regime::DampedPrandtl: return "DampedPrandtl";
    case Regime::Shercliff: return "Shercliff";
    case Regime::MixedPrandtlShercliff: return "MixedPrandtlShercliff";
    case Regime::FullyNonlinearMHD: return "FullyNonlinearMHD";
    case Regime::ClassicalPrandtl: return "ClassicalPrandtl";
    case Regime::Indeterminate: return "Indeterminate";
  }
  return "Indeterminate";
}

struct Parameters {
  double re = 1.0;  // hydrodynamic Reynolds number
  double rm = 1.0;  // magnetic Reynolds number
  double s = 1.0;   // coupling parameter
  Orientation orientation = Orientation::Transverse;

  // Builds parameters from a prescribed Hartmann number, S = Ha^2 / (Re Rm).
  static Parameters from_hartmann(double re, double rm, double ha, Orientation o) {
    if (!(re > 0.0) || !(rm > 0.0) || !(ha > 0.0))
      throw InvalidParameter("re, rm and ha must be positive");
    return Parameters{re, rm, ha * ha / (re * rm), o};
  }
};

// ">>" means ratio >= big; "~" means ratio in [1/same, same].
struct RatioThresholds {
  double big = 100.0;
  double same = 10.0;
};

inline double hartmann_number(const Parameters& p) {
  if (!(p.re > 0.0) || !(p.rm > 0.0) || !(p.s > 0.0) || !std::isfinite(p.re) ||
      !std::isfinite(p.rm) || !std::isfinite(p.s))
    throw InvalidParameter("hartmann_number: re, rm and s must be positive and finite");
  return std::sqrt(p.s * p.re * p.rm);
}

enum class Relation { MuchGreater, Comparable, MuchLess, Intermediate };

inline std::string_view to_string(Relation r) {
  switch (r) {
    case Relation::MuchGreater: return "much_greater";
    case Relation::Comparable: return "comparable";
    case Relation::MuchLess: return "much_less";
    case Relation::Intermediate: return "intermediate";
  }
  return "intermediate";
}

inline Relation relate(double ratio, const RatioThresholds& th) {
  // Priority: ">>" before "~" so that overlapping bands resolve deterministically.
  if (ratio >= th.big) return Relation::MuchGreater;
  if (ratio >= 1.0 / th.same && ratio <= th.same) return Relation::Comparable;
  if (ratio <= 1.0 / th.big) return Relation::MuchLess;
  return Relation::Intermediate;
}

struct ConstraintCheck {
  std::string name;
  double ratio = 0.0;
  Relation verdict = Relation::Intermediate;
};

struct RegimeReport {
  Regime regime = Regime::Indeterminate;
  Orientation orientation = Orientation::Transverse;
  double ha = 0.0;
  double lambda = 0.0;
  std::optional<double> delta;
  std::vector<ConstraintCheck> constraints_checked;
};

// Validity of the boundary-layer setting: Re >> 1 and Rm <~ Re.
inline std::vector<ConstraintCheck> validity_checks(const Parameters& p, const RatioThresholds& th) {
  std::vector<ConstraintCheck> out;
  out.push_back({"Re>>1", p.re, relate(p.re, th)});
  const double rm_re = p.rm / p.re;
  out.push_back({"Rm<~Re", rm_re, relate(rm_re, th)});
  return out;
}

inline bool is_valid(const Parameters& p, const RatioThresholds& th) {
  if (!(p.re > 0.0) || !(p.rm > 0.0) || !(p.s > 0.0)) return false;
  if (!std::isfinite(p.re) || !std::isfinite(p.rm) || !std::isfinite(p.s)) return false;
  return p.re >= th.big && p.rm / p.re <= th.same;
}

inline RegimeReport classify(const Parameters& p, const RatioThresholds& th = {}) {
  const double ha = hartmann_number(p);
  if (!(th.big > 1.0) || !(th.same >= 1.0))
    throw InvalidParameter("classify: thresholds must satisfy big > 1 and same >= 1");
  if (!is_valid(p, th))
    throw InvalidParameter("classify: parameters violate Re >> 1 or Rm <~ Re");

  RegimeReport rep;
  rep.orientation = p.orientation;
  rep.ha = ha;
  rep.constraints_checked = validity_checks(p, th);
  auto record = [&](std::string name, double ratio) {
    Relation r = relate(ratio, th);
    rep.constraints_checked.push_back({std::move(name), ratio, r});
    return r;
  };

  if (p.orientation == Orientation::Transverse) {
    const double lambda = 1.0 / ha;
    const double delta = p.rm / ha;
    // S delta / lambda reduces to Ha^2 / Re.
    const Relation balance = record("Ha^2/Re", ha * ha / p.re);
    record("S*delta/lambda", p.s * delta / lambda);
    record("Ha^2/Rm", ha * ha / p.rm);
    record("Ha>>1", ha);
    if (balance == Relation::MuchGreater) {
      rep.regime = Regime::Hartmann;
    } else if (balance == Relation::Comparable) {
      rep.regime = Regime::DampedPrandtl;
    } else if (balance == Relation::MuchLess) {
      rep.regime = Regime::ClassicalPrandtl;
    } else {
      rep.regime = Regime::Indeterminate;
    }
    if (rep.regime == Regime::ClassicalPrandtl) {
      rep.lambda = 1.0 / std::sqrt(p.re);
    } else {
      rep.lambda = lambda;
      rep.delta = delta;
    }
    return rep;
  }

  const double lambda = 1.0 / std::sqrt(ha);
  const double delta = p.rm / ha;
  // S delta reduces to Ha / Re.
  const Relation ha_re = record("Ha/Re", ha / p.re);
  const Relation re_rm = record("Re/Rm", p.re / p.rm);
  record("S*delta", p.s * delta);
  record("delta=Rm/Ha", delta);
  record("Ha>>1", ha);

  if (ha_re == Relation::MuchGreater) {
    rep.regime = Regime::Shercliff;
  } else if (ha_re == Relation::Comparable && re_rm == Relation::MuchGreater) {
    rep.regime = Regime::MixedPrandtlShercliff;
  } else if (ha_re == Relation::Comparable && re_rm == Relation::Comparable) {
    rep.regime = Regime::FullyNonlinearMHD;
  } else if (ha_re == Relation::MuchLess) {
    rep.regime = Regime::ClassicalPrandtl;
  } else {
    rep.regime = Regime::Indeterminate;
  }

  switch (rep.regime) {
    case Regime::FullyNonlinearMHD:
    case Regime::ClassicalPrandtl:
      rep.lambda = 1.0 / std::sqrt(p.re);
      break;
    default:
      rep.lambda = lambda;
      rep.delta = delta;
      break;
  }
  return rep;
}

}  // namespace mhdbl
