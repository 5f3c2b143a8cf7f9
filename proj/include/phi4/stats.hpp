#pragma once

#include <span>
#include <utility>
#include <vector>

namespace phi4::stats {

/// P(X > x) for X ~ N(0, 1).
double normal_upper_tail(double x);
/// log P(X > x), accurate far into the tail.
double log_normal_upper_tail(double x);

/// Regularized incomplete beta I_x(a, b).
double incomplete_beta(double a, double b, double x);
/// Solves I_x(a, b) = p for x.
double incomplete_beta_inverse(double a, double b, double p);

struct Interval {
  double low;
  double high;
};

/// Exact binomial confidence interval for hits / trials.
Interval clopper_pearson(long hits, long trials, double confidence = 0.95);

struct KsResult {
  double statistic;
  double p_value;
};

/// Two-sample Kolmogorov-Smirnov test with the asymptotic Kolmogorov law.
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);
/// Kolmogorov survival function Q(lambda) = 2 sum (-1)^{j-1} exp(-2 j^2 lambda^2).
double kolmogorov_survival(double lambda);

struct LinearFit {
  double slope;
  double intercept;
  double slope_stderr;
};

/// Ordinary least squares y = intercept + slope x.
LinearFit least_squares(std::span<const double> x, std::span<const double> y);

double mean(std::span<const double> xs);
double variance(std::span<const double> xs);
/// Lower median for even sizes is averaged with the upper one.
double median(std::vector<double> xs);

}  // namespace phi4::stats
