#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace bchlab {

/// Raised when an input lies outside the domain where a quantity is defined
/// (inadmissible wave parameters, a point on or past the singular line, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Raised when a numerical procedure fails to deliver its contract
/// (bracket failure, non-convergent quadrature, eigensolver failure).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parameters (b, c, kappa) of a solitary wave of the b-family on a
/// constant background kappa travelling with speed c.
struct WaveParams {
  double b = 1.0;
  double c = 2.0;
  double kappa = 0.4;

  /// Amplitude scale c - kappa.
  [[nodiscard]] double gamma() const { return c - kappa; }
  [[nodiscard]] bool is_b1() const { return b == 1.0; }
};

/// Returns a human readable description of the first violated admissibility
/// inequality, or nullopt when 0 < kappa < c/(b+1), c > 0 and b > 0, and,
/// for b < 1, kappa > c(1-b)/(1+b) (otherwise the crest is not smooth).
[[nodiscard]] std::optional<std::string> admissibility_violation(const WaveParams& p);

/// Throws DomainError naming the violated inequality.
void require_admissible(const WaveParams& p);

/// Throws DomainError unless b == 1.
void require_b1(const WaveParams& p, const char* what);

[[nodiscard]] std::string describe(const WaveParams& p);

}  // namespace bchlab
