#pragma once

#include <functional>
#include <vector>

namespace exitlab::stats {

// Half-width of the Dvoretzky-Kiefer-Wolfowitz confidence band:
// sqrt(ln(2/alpha) / (2n)). The empirical CDF stays within this of the truth
// uniformly with probability 1 - alpha.
double dkw_halfwidth(size_t n, double alpha);

// Asymptotic Kolmogorov-Smirnov critical coefficient c(alpha) with
// sqrt(-ln(alpha/2)/2); the two-sample threshold is c * sqrt((n+m)/(n m)).
double ks_critical(double alpha);

struct KsResult {
  double statistic = 0.0;
  double threshold = 0.0;
  bool reject = false;
};

// Two-sample KS test; inputs need not be sorted.
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b,
                       double alpha);

// One-sample KS test against a CDF.
KsResult ks_one_sample(std::vector<double> data,
                       const std::function<double(double)>& cdf, double alpha);

// Simple least squares y ~ a + b x; returns {intercept, slope}.
struct LineFit {
  double intercept = 0.0;
  double slope = 0.0;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);
// Quadratic fit y ~ a + b x + c x^2; returns {a, b, c}.
struct QuadFit {
  double a = 0.0, b = 0.0, c = 0.0;
};
QuadFit fit_quadratic(const std::vector<double>& x,
                      const std::vector<double>& y);

double mean(const std::vector<double>& v);
double sample_stddev(const std::vector<double>& v);

}  // namespace exitlab::stats
