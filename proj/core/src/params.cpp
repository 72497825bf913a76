#include "bchlab/params.hpp"

#include <cmath>
#include <sstream>

namespace bchlab {

std::optional<std::string> admissibility_violation(const WaveParams& p) {
  std::ostringstream os;
  if (!std::isfinite(p.b) || !std::isfinite(p.c) || !std::isfinite(p.kappa)) {
    return std::string("parameters must be finite");
  }
  if (!(p.b > 0.0)) {
    os << "b > 0 violated (b = " << p.b << ")";
    return os.str();
  }
  if (!(p.c > 0.0)) {
    os << "c > 0 violated (c = " << p.c << ")";
    return os.str();
  }
  if (!(p.kappa > 0.0)) {
    os << "kappa > 0 violated (kappa = " << p.kappa << ")";
    return os.str();
  }
  if (!(p.kappa < p.c / (p.b + 1.0))) {
    os << "kappa < c/(b+1) violated (kappa = " << p.kappa << ", c/(b+1) = " << p.c / (p.b + 1.0)
       << ")";
    return os.str();
  }
  // For b < 1 the potential stays finite at phi = c; below this bound the
  // homoclinic orbit reaches the singular line before turning (no smooth crest).
  if (p.b < 1.0 && !(p.kappa > p.c * (1.0 - p.b) / (1.0 + p.b))) {
    os << "kappa > c(1-b)/(1+b) violated for b < 1 (kappa = " << p.kappa
       << ", c(1-b)/(1+b) = " << p.c * (1.0 - p.b) / (1.0 + p.b) << ")";
    return os.str();
  }
  return std::nullopt;
}

void require_admissible(const WaveParams& p) {
  if (auto why = admissibility_violation(p)) {
    throw DomainError("inadmissible wave parameters: " + *why);
  }
}

void require_b1(const WaveParams& p, const char* what) {
  if (!p.is_b1()) {
    throw DomainError(std::string(what) + " is only defined for b = 1 (got " + describe(p) + ")");
  }
}

std::string describe(const WaveParams& p) {
  std::ostringstream os;
  os.precision(17);
  os << "b=" << p.b << ", c=" << p.c << ", kappa=" << p.kappa;
  return os.str();
}

}  // namespace bchlab
