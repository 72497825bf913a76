#pragma once

// Cancellation-free evaluation of the logarithmic and binomial remainders
// that appear near the saddle (phi -> kappa) and near the left end of the
// transformed level curve (phi -> 0).

namespace bchlab::series {

/// Sum_{n >= order} x^n / n = -log(1-x) - Sum_{n < order} x^n / n,
/// accurate to full relative precision for 0 <= x < 1 and order in {1,2,3}.
[[nodiscard]] double log1m_tail(double x, int order);

/// 1 - (1-x)^p - p x + p (p-1) x^2 / 2 for 0 <= x < 1: the cubic remainder
/// of the binomial series, accurate for small x.
[[nodiscard]] double binomial_tail3(double x, double p);

}  // namespace bchlab::series
