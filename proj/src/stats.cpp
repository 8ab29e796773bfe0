#include "exitlab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace exitlab::stats {

double dkw_halfwidth(size_t n, double alpha) {
  if (n == 0 || !(alpha > 0.0) || !(alpha < 1.0))
    throw std::invalid_argument("dkw_halfwidth: n > 0, alpha in (0,1)");
  return std::sqrt(std::log(2.0 / alpha) / (2.0 * static_cast<double>(n)));
}

double ks_critical(double alpha) {
  if (!(alpha > 0.0) || !(alpha < 1.0))
    throw std::invalid_argument("ks_critical: alpha in (0,1)");
  return std::sqrt(-std::log(alpha / 2.0) / 2.0);
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b,
                       double alpha) {
  if (a.empty() || b.empty())
    throw std::invalid_argument("ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / na -
                              static_cast<double>(j) / nb));
  }
  KsResult r;
  r.statistic = d;
  r.threshold = ks_critical(alpha) * std::sqrt((na + nb) / (na * nb));
  r.reject = r.statistic > r.threshold;
  return r;
}

KsResult ks_one_sample(std::vector<double> data,
                       const std::function<double(double)>& cdf, double alpha) {
  if (data.empty()) throw std::invalid_argument("ks_one_sample: empty sample");
  std::sort(data.begin(), data.end());
  double n = static_cast<double>(data.size());
  double d = 0.0;
  for (size_t i = 0; i < data.size(); ++i) {
    double f = cdf(data[i]);
    d = std::max(d, std::fabs(f - static_cast<double>(i) / n));
    d = std::max(d, std::fabs(static_cast<double>(i + 1) / n - f));
  }
  KsResult r;
  r.statistic = d;
  r.threshold = ks_critical(alpha) / std::sqrt(n);
  r.reject = r.statistic > r.threshold;
  return r;
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("fit_line: need matched samples, >= 2 points");
  double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  double det = n * sxx - sx * sx;
  if (det == 0.0) throw std::invalid_argument("fit_line: degenerate abscissae");
  LineFit f;
  f.slope = (n * sxy - sx * sy) / det;
  f.intercept = (sy - f.slope * sx) / n;
  return f;
}

QuadFit fit_quadratic(const std::vector<double>& x,
                      const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 3)
    throw std::invalid_argument("fit_quadratic: need >= 3 points");
  // Normal equations for the 3-parameter fit; well-conditioned for the
  // short, centered abscissae used here.
  double s0 = static_cast<double>(x.size());
  double s1 = 0, s2 = 0, s3 = 0, s4 = 0, t0 = 0, t1 = 0, t2 = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    double xi = x[i], xi2 = xi * xi;
    s1 += xi;
    s2 += xi2;
    s3 += xi2 * xi;
    s4 += xi2 * xi2;
    t0 += y[i];
    t1 += xi * y[i];
    t2 += xi2 * y[i];
  }
  // Solve the 3x3 system by Cramer's rule.
  auto det3 = [](double a11, double a12, double a13, double a21, double a22,
                 double a23, double a31, double a32, double a33) {
    return a11 * (a22 * a33 - a23 * a32) - a12 * (a21 * a33 - a23 * a31) +
           a13 * (a21 * a32 - a22 * a31);
  };
  double D = det3(s0, s1, s2, s1, s2, s3, s2, s3, s4);
  if (D == 0.0) throw std::invalid_argument("fit_quadratic: degenerate");
  QuadFit q;
  q.a = det3(t0, s1, s2, t1, s2, s3, t2, s3, s4) / D;
  q.b = det3(s0, t0, s2, s1, t1, s3, s2, t2, s4) / D;
  q.c = det3(s0, s1, t0, s1, s2, t1, s2, s3, t2) / D;
  return q;
}

double mean(const std::vector<double>& v) {
  if (v.empty()) throw std::invalid_argument("mean: empty");
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double sample_stddev(const std::vector<double>& v) {
  if (v.size() < 2) throw std::invalid_argument("sample_stddev: need >= 2");
  double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

}  // namespace exitlab::stats
