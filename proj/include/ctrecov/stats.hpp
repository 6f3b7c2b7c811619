#pragma once

#include <span>

namespace ctrecov {

struct MeanStd {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation
  long count = 0;
};

MeanStd mean_std(std::span<const double> xs);

// regularized incomplete beta function I_x(a, b)
double incomplete_beta(double a, double b, double x);

// two-sided Student-t critical value: P(|T| <= t) = level for df degrees of
// freedom, e.g. level = 0.99 for a 99% confidence interval
double student_t_critical(double level, int df);

// half-width of the two-sided confidence interval for the mean
double t_confidence_halfwidth(std::span<const double> xs, double level);

}  // namespace ctrecov
