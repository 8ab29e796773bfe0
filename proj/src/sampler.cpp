#include "exitlab/sampler.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "exitlab/kernels.hpp"
#include "exitlab/stats.hpp"

namespace exitlab::sampler {

ExitSample em_exit(const Domain& dom, const Point& x0, double dt,
                   rng::Philox& g, long max_steps) {
  if (!(dt > 0.0)) throw std::invalid_argument("em_exit: dt > 0");
  if (!dom.sampling_inside(x0))
    throw std::invalid_argument("em_exit: start outside domain");
  const int n = dom.dim();
  const double sdt = std::sqrt(dt);
  Point x = x0;
  double t = 0.0;
  double d1 = dom.sampling_distance(x);
  for (long s = 0; s < max_steps; ++s) {
    Point y = x;
    for (int i = 0; i < n; ++i) y[i] += sdt * g.next_gaussian();
    if (!dom.sampling_inside(y)) {
      auto pr = dom.probe(y);
      return {t + dt, pr.foot, s + 1, true};
    }
    double d2 = dom.sampling_distance(y);
    // Brownian bridge against the tangent plane of the nearest boundary
    // piece; the exponent is exact for a flat wall.
    double prod = d1 * d2 / dt;
    if (prod < 40.0 && g.next_unit() < std::exp(-2.0 * prod)) {
      auto pr = dom.probe((x + y) * 0.5);
      return {t + 0.5 * dt, pr.foot, s + 1, true};
    }
    x = y;
    d1 = d2;
    t += dt;
  }
  return {t, x, max_steps, false};
}

ExitSample wos_exit(const Domain& dom, const Point& x0, double eps,
                    rng::Philox& g, long max_steps) {
  if (!(eps > 0.0)) throw std::invalid_argument("wos_exit: eps > 0");
  if (!dom.has_exact_distance())
    throw std::invalid_argument("wos_exit: domain lacks exact distances");
  if (!dom.sampling_inside(x0))
    throw std::invalid_argument("wos_exit: start outside domain");
  const int n = dom.dim();
  Point x = x0;
  double t = 0.0;
  for (long s = 0; s < max_steps; ++s) {
    double d = dom.sampling_distance(x);
    if (!(d < 1e200)) {
      // From the start this means the boundary is all polar; later it means
      // the walk wandered beyond floating range (heavy-tailed recurrent
      // domains). Such walks are failures, not errors: their exit times are
      // astronomically beyond any usable window.
      if (s == 0)
        throw std::invalid_argument("wos_exit: no reachable boundary");
      return {t, x, s, false};
    }
    if (d < eps) {
      auto pr = dom.probe(x);
      return {t, pr.foot, s, true};
    }
    t += d * d * kernels::ball_exit_quantile(g.next_unit(), n);
    auto dir = g.next_direction(n);
    for (int i = 0; i < n; ++i) x[i] += d * dir[i];
  }
  return {t, x, max_steps, false};
}

namespace {

template <typename Fn>
void parallel_indices(size_t count, int threads, Fn&& fn) {
  int T = std::max(1, threads);
  if (T == 1) {
    for (size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  auto worker = [&]() {
    constexpr size_t kChunk = 64;
    for (;;) {
      size_t lo = next.fetch_add(kChunk);
      if (lo >= count) break;
      size_t hi = std::min(count, lo + kChunk);
      for (size_t i = lo; i < hi; ++i) fn(i);
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(T));
  for (int k = 0; k < T; ++k) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}

}  // namespace

ExitSampleBatch run_batch(const Domain& dom, const Point& x0,
                          const BatchOptions& opt) {
  if (opt.count == 0) throw std::invalid_argument("run_batch: empty batch");
  ExitSampleBatch batch;
  batch.domain_id = dom.describe();
  batch.engine = opt.engine == BatchOptions::Engine::Em ? "em" : "wos";
  batch.param = opt.param;
  batch.seed = opt.seed;
  batch.dim = dom.dim();

  std::vector<double> times(opt.count);
  std::vector<Point> points(opt.count);
  std::vector<uint8_t> ok(opt.count, 0);

  parallel_indices(opt.count, opt.threads, [&](size_t i) {
    rng::Philox g(opt.seed, static_cast<uint64_t>(i));
    ExitSample s;
    if (opt.engine == BatchOptions::Engine::Em) {
      long cap = opt.max_steps > 0 ? opt.max_steps : 500'000'000L;
      s = em_exit(dom, x0, opt.param, g, cap);
    } else {
      long cap = opt.max_steps > 0 ? opt.max_steps : 20'000'000L;
      s = wos_exit(dom, x0, opt.param, g, cap);
    }
    times[i] = s.t;
    points[i] = s.where;
    ok[i] = s.ok ? 1 : 0;
  });

  batch.times.reserve(opt.count);
  batch.points.reserve(opt.count);
  for (size_t i = 0; i < opt.count; ++i) {
    if (ok[i]) {
      batch.times.push_back(times[i]);
      batch.points.push_back(points[i]);
    } else {
      ++batch.failures;
    }
  }
  return batch;
}

CdfEstimate empirical_cdf(const std::vector<double>& times,
                          const std::vector<double>& t_grid, double alpha) {
  if (times.empty()) throw std::invalid_argument("empirical_cdf: empty sample");
  std::vector<double> sorted = times;
  std::sort(sorted.begin(), sorted.end());
  CdfEstimate e;
  e.t = t_grid;
  e.n = sorted.size();
  e.dkw = stats::dkw_halfwidth(sorted.size(), alpha);
  e.cdf.reserve(t_grid.size());
  for (double t : t_grid) {
    auto it = std::upper_bound(sorted.begin(), sorted.end(), t);
    e.cdf.push_back(static_cast<double>(it - sorted.begin()) /
                    static_cast<double>(sorted.size()));
  }
  return e;
}

namespace {

// Survival points on a log-spaced grid, dropping depleted tail points.
struct SurvivalPoints {
  std::vector<double> logt, logS;
};

SurvivalPoints survival_grid(const std::vector<double>& sorted, double t_lo,
                             double t_hi, size_t min_count) {
  SurvivalPoints sp;
  const int kPts = 25;
  double n = static_cast<double>(sorted.size());
  for (int k = 0; k < kPts; ++k) {
    double t = t_lo * std::pow(t_hi / t_lo, double(k) / (kPts - 1));
    auto it = std::upper_bound(sorted.begin(), sorted.end(), t);
    size_t alive = sorted.size() - static_cast<size_t>(it - sorted.begin());
    if (alive < min_count) break;
    sp.logt.push_back(std::log(t));
    sp.logS.push_back(std::log(static_cast<double>(alive) / n));
  }
  return sp;
}

}  // namespace

TailFit fit_tail_exponent(const std::vector<double>& times, double t_lo,
                          double t_hi) {
  if (times.size() < 100)
    throw std::invalid_argument("fit_tail_exponent: need >= 100 samples");
  if (!(t_lo > 0.0) || !(t_hi > t_lo))
    throw std::invalid_argument("fit_tail_exponent: bad window");
  std::vector<double> sorted = times;
  std::sort(sorted.begin(), sorted.end());

  SurvivalPoints sp = survival_grid(sorted, t_lo, t_hi, 16);
  if (sp.logt.size() < 5)
    throw std::invalid_argument("fit_tail_exponent: window depletes the sample");

  TailFit f;
  f.points = static_cast<int>(sp.logt.size());
  f.exponent = -stats::fit_line(sp.logt, sp.logS).slope;
  f.curvature = stats::fit_quadratic(sp.logt, sp.logS).c;

  // Spread over 8 interleaved subsamples.
  std::vector<double> exps, curvs;
  for (int k = 0; k < 8; ++k) {
    std::vector<double> sub;
    for (size_t i = k; i < times.size(); i += 8) sub.push_back(times[i]);
    std::sort(sub.begin(), sub.end());
    SurvivalPoints s = survival_grid(sub, t_lo, t_hi, 2);
    if (s.logt.size() >= 5) {
      exps.push_back(-stats::fit_line(s.logt, s.logS).slope);
      curvs.push_back(stats::fit_quadratic(s.logt, s.logS).c);
    }
  }
  if (exps.size() >= 4) {
    f.se = stats::sample_stddev(exps) / std::sqrt(double(exps.size()));
    f.curvature_se = stats::sample_stddev(curvs) / std::sqrt(double(curvs.size()));
  } else {
    f.se = 0.0;
    f.curvature_se = 0.0;
  }
  // Downward log-log curvature beyond noise: tail decays faster than any
  // power in the window.
  double cse = f.curvature_se > 0.0 ? f.curvature_se : 0.05;
  f.superpolynomial = f.curvature < -std::max(0.15, 3.0 * cse);
  return f;
}

LambdaFit fit_lambda(const std::vector<double>& times, double t_lo,
                     double t_hi) {
  if (times.size() < 100)
    throw std::invalid_argument("fit_lambda: need >= 100 samples");
  std::vector<double> sorted = times;
  std::sort(sorted.begin(), sorted.end());
  SurvivalPoints sp = survival_grid(sorted, t_lo, t_hi, 16);
  if (sp.logt.size() < 5)
    throw std::invalid_argument("fit_lambda: window depletes the sample");
  std::vector<double> t(sp.logt.size()), y(sp.logt.size());
  for (size_t i = 0; i < sp.logt.size(); ++i) {
    t[i] = std::exp(sp.logt[i]);
    y[i] = -2.0 * sp.logS[i];
  }
  LambdaFit f;
  f.points = static_cast<int>(t.size());
  f.lambda = stats::fit_line(t, y).slope;
  f.curvature = stats::fit_quadratic(t, y).c;

  std::vector<double> lams;
  for (int k = 0; k < 8; ++k) {
    std::vector<double> sub;
    for (size_t i = k; i < times.size(); i += 8) sub.push_back(times[i]);
    std::sort(sub.begin(), sub.end());
    SurvivalPoints s = survival_grid(sub, t_lo, t_hi, 2);
    if (s.logt.size() >= 5) {
      std::vector<double> ts(s.logt.size()), ys(s.logt.size());
      for (size_t i = 0; i < s.logt.size(); ++i) {
        ts[i] = std::exp(s.logt[i]);
        ys[i] = -2.0 * s.logS[i];
      }
      lams.push_back(stats::fit_line(ts, ys).slope);
    }
  }
  f.se = lams.size() >= 4
             ? stats::sample_stddev(lams) / std::sqrt(double(lams.size()))
             : 0.0;
  return f;
}

LambdaFit fit_lambda_curve(const std::vector<double>& t,
                           const std::vector<double>& survival) {
  if (t.size() != survival.size() || t.size() < 3)
    throw std::invalid_argument("fit_lambda_curve: need matched points");
  std::vector<double> ts, ys;
  for (size_t i = 0; i < t.size(); ++i) {
    if (survival[i] > 0.0 && t[i] > 0.0) {
      ts.push_back(t[i]);
      ys.push_back(-2.0 * std::log(survival[i]));
    }
  }
  if (ts.size() < 3)
    throw std::invalid_argument("fit_lambda_curve: no usable points");
  LambdaFit f;
  f.points = static_cast<int>(ts.size());
  f.lambda = stats::fit_line(ts, ys).slope;
  f.curvature = stats::fit_quadratic(ts, ys).c;
  return f;
}

HitEstimate hit_before_exit(const Domain& outer, const CompactSet& target,
                            const Point& x0, size_t count, uint64_t seed,
                            double eps, int threads) {
  if (count == 0) throw std::invalid_argument("hit_before_exit: count > 0");
  if (!outer.sampling_inside(x0))
    throw std::invalid_argument("hit_before_exit: start outside domain");
  if (target.dist_nonpolar(x0) <= 0.0)
    throw std::invalid_argument("hit_before_exit: start inside target");

  HitEstimate est;
  est.n = count;

  // Hit detection: nonpolar parts by eps shell; polar parts (points) only by
  // exact coincidence. An eps disk around a point has positive hitting
  // probability, so the shell rule would not test what it claims to test.
  std::atomic<size_t> hits{0};
  parallel_indices(count, threads, [&](size_t i) {
    rng::Philox g(seed, static_cast<uint64_t>(i));
    Point x = x0;
    const int n = outer.dim();
    for (long s = 0; s < 10'000'000L; ++s) {
      double d_out = outer.sampling_distance(x);
      double d_tgt = target.dist_nonpolar(x);
      if (d_tgt < eps || target.dist_to(x) <= 0.0) {
        hits.fetch_add(1, std::memory_order_relaxed);
        return;
      }
      if (d_out < eps) return;  // left through the outer boundary
      double d = std::min(d_out, d_tgt);
      auto dir = g.next_direction(n);
      for (int c = 0; c < n; ++c) x[c] += d * dir[c];
    }
  });
  est.p = static_cast<double>(hits.load()) / static_cast<double>(count);
  // 99% normal band
  est.half_width =
      2.5758 * std::sqrt(std::max(est.p * (1.0 - est.p), 1e-12 / 4.0) /
                         static_cast<double>(count));
  return est;
}

}  // namespace exitlab::sampler
