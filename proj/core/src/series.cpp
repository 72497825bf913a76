#include "bchlab/series.hpp"

#include <cmath>

namespace bchlab::series {

namespace {
constexpr double kSeriesSwitch = 0.1;
constexpr int kMaxTerms = 200;
}  // namespace

double log1m_tail(double x, int order) {
  if (std::fabs(x) < kSeriesSwitch) {
    double power = std::pow(x, order);
    double sum = 0.0;
    for (int n = order; n < order + kMaxTerms; ++n) {
      const double term = power / n;
      sum += term;
      if (std::fabs(term) <= 1e-18 * std::fabs(sum)) break;
      power *= x;
    }
    return sum;
  }
  double head = 0.0;
  double power = x;
  for (int n = 1; n < order; ++n) {
    head += power / n;
    power *= x;
  }
  return -std::log1p(-x) - head;
}

double binomial_tail3(double x, double p) {
  if (std::fabs(x) < kSeriesSwitch) {
    // -Sum_{n>=3} C(p,n) (-x)^n via the ratio C(p,n)/C(p,n-1) = (p-n+1)/n.
    double term = p * (p - 1.0) * (p - 2.0) / 6.0 * (-x * x * x);
    double sum = 0.0;
    for (int n = 3; n < 3 + kMaxTerms; ++n) {
      sum -= term;
      if (std::fabs(term) <= 1e-18 * std::fabs(sum) || term == 0.0) break;
      term *= (p - n) / (n + 1.0) * (-x);
    }
    return sum;
  }
  return -std::expm1(p * std::log1p(-x)) - p * x + 0.5 * p * (p - 1.0) * x * x;
}

}  // namespace bchlab::series
