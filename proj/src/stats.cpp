#include "ctrecov/stats.hpp"

#include <cmath>
#include <stdexcept>

namespace ctrecov {

MeanStd mean_std(std::span<const double> xs) {
  MeanStd out;
  out.count = static_cast<long>(xs.size());
  if (out.count == 0) return out;
  double sum = 0.0;
  for (double x : xs) sum += x;
  out.mean = sum / out.count;
  if (out.count > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - out.mean) * (x - out.mean);
    out.stddev = std::sqrt(ss / (out.count - 1));
  }
  return out;
}

namespace {

// Lentz continued fraction for the incomplete beta function
double betacf(double a, double b, double x) {
  constexpr int kMaxIter = 300;
  constexpr double kEps = 3e-16;
  constexpr double kFpMin = 1e-300;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kFpMin) d = kFpMin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::abs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::abs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return h;
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ln_front = std::lgamma(a + b) - std::lgamma(a) -
                          std::lgamma(b) + a * std::log(x) +
                          b * std::log1p(-x);
  const double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * betacf(a, b, x) / a;
  return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

double student_t_critical(double level, int df) {
  if (df < 1) throw std::invalid_argument("degrees of freedom must be >= 1");
  if (level <= 0.0 || level >= 1.0)
    throw std::invalid_argument("confidence level must be in (0,1)");
  // P(|T| <= t) = 1 - I_{df/(df+t^2)}(df/2, 1/2); bisect on t
  const double target = 1.0 - level;
  double lo = 0.0, hi = 1.0;
  const auto tail = [&](double t) {
    return incomplete_beta(0.5 * df, 0.5, df / (df + t * t));
  };
  while (tail(hi) > target) hi *= 2.0;
  for (int iter = 0; iter < 200 && hi - lo > 1e-12 * (1.0 + hi); ++iter) {
    const double mid = 0.5 * (lo + hi);
    (tail(mid) > target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double t_confidence_halfwidth(std::span<const double> xs, double level) {
  const MeanStd ms = mean_std(xs);
  if (ms.count < 2) return 0.0;
  return student_t_critical(level, static_cast<int>(ms.count) - 1) *
         ms.stddev / std::sqrt(static_cast<double>(ms.count));
}

}  // namespace ctrecov
