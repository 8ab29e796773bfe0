#include "exitlab/experiments.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <functional>
#include <memory>
#include <cmath>
#include <stdexcept>

#include "exitlab/kernels.hpp"
#include "exitlab/sampler.hpp"

namespace exitlab::harness {

double ExperimentResult::scalar(const std::string& key) const {
  for (const auto& [k, v] : scalars)
    if (k == key) return v;
  throw std::out_of_range("ExperimentResult::scalar: " + key);
}

double extrapolate_smalltime(const std::vector<double>& t,
                             const std::vector<double>& y) {
  const int N = static_cast<int>(t.size());
  if (N < 3 || y.size() != t.size())
    throw std::invalid_argument("extrapolate_smalltime: need >= 3 points");
  Eigen::MatrixXd A(N, 3);
  Eigen::VectorXd b(N);
  for (int i = 0; i < N; ++i) {
    A(i, 0) = 1.0;
    A(i, 1) = t[i];
    A(i, 2) = t[i] * std::log(t[i]);
    b[i] = y[i];
  }
  Eigen::Vector3d c = (A.transpose() * A).ldlt().solve(A.transpose() * b);
  return c[0];
}

namespace {

// Free heat kernel at distance r, n dimensions.
double free_kernel(double t, double r, int n) {
  return std::pow(2.0 * M_PI * t, -0.5 * n) * std::exp(-r * r / (2.0 * t));
}

// Integral over (0, t] of the free kernel at distance sqrt(b2): closed forms
// via the exponential integral (n = 2) and erfc (n = 3).
double kernel_time_integral(double t, double b2, int n) {
  double x = b2 / (2.0 * t);
  if (n == 2) return -std::expint(-x) / (2.0 * M_PI);
  return std::erfc(std::sqrt(x)) / (2.0 * M_PI * std::sqrt(b2));
}

// Boundary cells of the lens K intersect closed-ball(a, rho). Supports ball
// and segment components; `a` must lie on the component's boundary.
std::vector<capacity::BoundaryCell> lens_cells(const CompactSet& k,
                                               const Point& a, double rho,
                                               int per_arc) {
  using capacity::BoundaryCell;
  std::vector<BoundaryCell> cells;

  const CompactSet* leaf = &k;
  if (k.kind() == CompactSet::Kind::Union) {
    std::vector<const CompactSet*> ls;
    k.leaves(ls);
    leaf = nullptr;
    for (auto* cand : ls)
      if (cand->dist_to(a) <= 1e-9 * (1.0 + a.norm())) {
        leaf = cand;
        break;
      }
    if (!leaf) throw std::invalid_argument("lemma1_bound: a not on K");
  }

  if (leaf->kind() == CompactSet::Kind::ClosedBall) {
    const Point& ck = leaf->center();
    double rk = leaf->radius();
    if (std::fabs(geometry::dist(a, ck) - rk) > 1e-9 * rk)
      throw std::invalid_argument("lemma1_bound: a not on the sphere of K");
    if (rho >= 2.0 * rk)
      throw std::invalid_argument("lemma1_bound: delta too large for K");
    double phi_a = std::atan2(a[1] - ck[1], a[0] - ck[0]);
    // Arc of the K sphere inside B(a, rho).
    double phi1 = std::acos(1.0 - rho * rho / (2.0 * rk * rk));
    for (int i = 0; i < per_arc; ++i) {
      double u = (i + 0.5) / per_arc;           // (0,1)
      double phi = phi_a + (2.0 * u - 1.0) * phi1;
      cells.push_back({Point(ck[0] + rk * std::cos(phi),
                             ck[1] + rk * std::sin(phi)),
                       2.0 * phi1 * rk / per_arc});
    }
    // Arc of the rho sphere inside K: directions u with
    // dot(u, a - ck) <= -rho rk / 2, i.e. within acos(rho/(2 rk)) of -(a-ck).
    double psi_a = std::atan2(ck[1] - a[1], ck[0] - a[0]);
    double psi1 = std::acos(rho / (2.0 * rk));
    for (int i = 0; i < per_arc; ++i) {
      double u = (i + 0.5) / per_arc;
      double psi = psi_a + (2.0 * u - 1.0) * psi1;
      cells.push_back({Point(a[0] + rho * std::cos(psi),
                             a[1] + rho * std::sin(psi)),
                       2.0 * psi1 * rho / per_arc});
    }
    return cells;
  }

  if (leaf->kind() == CompactSet::Kind::Segment) {
    const Point& pa = leaf->seg_a();
    const Point& pb = leaf->seg_b();
    double len = geometry::dist(pa, pb);
    double ta = dot(a - pa, pb - pa) / (len * len);
    double lo = std::max(0.0, ta - rho / len);
    double hi = std::min(1.0, ta + rho / len);
    int cnt = 2 * per_arc;
    for (int i = 0; i < cnt; ++i) {
      double u = lo + (hi - lo) * (i + 0.5) / cnt;
      cells.push_back({pa + (pb - pa) * u, (hi - lo) * len / cnt});
    }
    return cells;
  }

  throw std::invalid_argument("lemma1_bound: unsupported component kind at a");
}

}  // namespace

Lemma1Constants lemma1_bound(const CompactSet& k, const Point& a,
                             double delta) {
  if (k.dim() != 2)
    throw std::invalid_argument("lemma1_bound: planar sets only");
  if (!(delta > 0.0)) throw std::invalid_argument("lemma1_bound: delta > 0");
  if (k.dist_to(a) > 1e-9 * (1.0 + a.norm()))
    throw std::invalid_argument("lemma1_bound: a not on K");
  if (k.dist_to(Point(0.0, 0.0)) <= 0.0)
    throw std::invalid_argument("lemma1_bound: origin inside K");

  Lemma1Constants out;
  out.a = a;
  out.delta = delta;
  double rho = delta / 5.0;
  double rstar = a.norm() + rho;
  out.omega_radius = 3.0 * a.norm() + delta;
  out.exponent = 0.5 * (a.norm() + delta) * (a.norm() + delta);

  out.lens = lens_cells(k, a, rho, 128);
  auto mu = capacity::equilibrium_on_cells(
      Domain::ball(Point(0.0, 0.0), out.omega_radius), out.lens);
  out.mass = mu.total();
  out.c = out.mass / 4.0;

  // T1: last time the killed density in Omega at radius |a|+rho is still at
  // least half the free density. The probe record is dense in t, so a scan
  // with linear interpolation between records is enough.
  pde::RadialOptions ro;
  ro.n = 2;
  ro.radius = out.omega_radius;
  ro.cells = 1200;
  ro.t_final = out.omega_radius * out.omega_radius;
  ro.step_ratio = 1e-3;
  ro.probe_radius = rstar;
  auto field = pde::radial_solve(ro);
  double t1 = 0.0;
  for (size_t i = field.probe.size(); i-- > 0;) {
    auto [t, u] = field.probe[i];
    if (u >= 0.5 * free_kernel(t, rstar, 2)) {
      t1 = t;
      break;
    }
  }
  if (t1 == 0.0) throw std::runtime_error("lemma1_bound: no ratio crossing");
  out.t1 = t1;

  // T: last time the accumulated free kernel at |a|+rho still dominates
  // half the bound exponential. Log-grid scan, then bisection on the last
  // sign change.
  double b5 = rstar * rstar;
  auto gap = [&](double t) {
    return kernel_time_integral(t, b5, 2) -
           0.5 * std::exp(-out.exponent / t);
  };
  double t_cross = 0.0;
  double prev_t = 1e-6 * t1;
  double prev_g = gap(prev_t);
  for (int i = 1; i <= 256; ++i) {
    double t = 1e-6 * t1 * std::pow(t1 / (1e-6 * t1), i / 256.0);
    double g = gap(t);
    if (prev_g >= 0.0 && g < 0.0) t_cross = prev_t;  // last time still >= 0
    prev_t = t;
    prev_g = g;
  }
  if (prev_g >= 0.0) {
    out.t_horizon = t1;  // holds through the whole scanned range
  } else {
    if (t_cross == 0.0)
      throw std::runtime_error("lemma1_bound: comparison never holds");
    double lo = t_cross, hi = std::min(t1, t_cross * std::pow(t1 / (1e-6 * t1), 1.0 / 256.0));
    for (int it = 0; it < 80; ++it) {
      double mid = 0.5 * (lo + hi);
      (gap(mid) >= 0.0 ? lo : hi) = mid;
    }
    out.t_horizon = lo;
  }
  out.t_horizon = std::min(out.t_horizon, out.t1);
  return out;
}

ExperimentResult verify_lemma1(const CompactSet& k, const Point& a,
                               double delta, int t_points, double h) {
  auto cst = lemma1_bound(k, a, delta);

  ExperimentResult res;
  res.name = "hit-probability lower bound";
  res.criterion =
      "flux into K >= C exp(-exponent/t) at every log-spaced t below T";

  // Flux into K for the walk stopped at the Omega sphere: a lower bound for
  // the free hitting probability, computed on the truncated complement.
  pde::SolveOptions opt;
  opt.t_final = cst.t_horizon;
  opt.truncation = cst.omega_radius;
  opt.h = h > 0.0 ? h : delta / 25.0;
  auto field =
      pde::solve_killed_density(Domain::complement_of(k), Point(0.0, 0.0), opt);

  // Bound falls below PDE resolution fast; keep t where it is above 1e-12.
  double t_floor = cst.exponent / std::log(std::max(cst.c, 1e-6) * 1e12);
  t_floor = std::max(t_floor, cst.t_horizon / 50.0);
  double t_lo = std::min(t_floor, 0.9 * cst.t_horizon);

  res.table.cols = {"t", "flux_into_k", "bound"};
  bool all = true;
  for (int i = 0; i < t_points; ++i) {
    double t =
        t_lo * std::pow(cst.t_horizon / t_lo,
                        t_points == 1 ? 1.0 : i / double(t_points - 1));
    double flux = field.exit_cdf(t, 0);
    double bound = cst.c * std::exp(-cst.exponent / t);
    if (!(flux >= bound)) all = false;
    res.table.rows.push_back({t, flux, bound});
  }
  res.pass = all;
  res.scalars = {{"mass", cst.mass},        {"c", cst.c},
                 {"t1", cst.t1},            {"t_horizon", cst.t_horizon},
                 {"exponent", cst.exponent}, {"omega_radius", cst.omega_radius},
                 {"h", opt.h},              {"t_floor", t_lo}};
  res.notes.push_back("flux stopped at the truncation sphere (lower bound)");
  res.notes.push_back("lens cells: " + std::to_string(cst.lens.size()));
  return res;
}

ExperimentResult verify_fast_exit(const Domain& u, const Domain& w,
                                  const std::vector<double>& t_grid,
                                  double margin, double trunc_u,
                                  double trunc_w) {
  if (t_grid.size() < 3)
    throw std::invalid_argument("verify_fast_exit: need >= 3 grid times");
  double t_max = *std::max_element(t_grid.begin(), t_grid.end());

  auto solve = [&](const Domain& d, double trunc) {
    pde::SolveOptions opt;
    opt.t_final = t_max;
    if (trunc > 0.0) opt.truncation = trunc;
    return pde::solve_killed_density(d, Point(0.0, 0.0), opt);
  };
  auto fu = solve(u, trunc_u);
  auto fw = solve(w, trunc_w);

  // Only the true boundary counts when truncated (label 0); the truncation
  // sphere would inflate the exit CDF.
  auto cdf = [](const pde::KilledHeatField& f, double t, bool truncated) {
    return truncated ? f.exit_cdf(t, 0) : f.exit_cdf(t);
  };

  ExperimentResult res;
  res.name = "small-time exit-rate comparison";
  res.criterion = "extrapolated 2t log ratio >= margin";
  res.table.cols = {"t", "cdf_u", "cdf_w", "two_t_log_ratio"};
  std::vector<double> ts, ys;
  for (double t : t_grid) {
    double a = cdf(fu, t, trunc_u > 0.0);
    double b = cdf(fw, t, trunc_w > 0.0);
    if (!(a > 1e-12) || !(b > 1e-12))
      throw std::invalid_argument(
          "verify_fast_exit: flux below 1e-12 on the grid");
    double y = 2.0 * t * (std::log(a) - std::log(b));
    ts.push_back(t);
    ys.push_back(y);
    res.table.rows.push_back({t, a, b, y});
  }
  double limit = extrapolate_smalltime(ts, ys);
  res.pass = limit >= margin;
  res.scalars = {{"extrapolated", limit}, {"margin", margin}};
  return res;
}

ExperimentResult verify_long_stay(const SchlichtEntry& entry, double t_lo,
                                  double t_hi, int points, size_t mc_count,
                                  uint64_t seed, int threads) {
  if (entry.id == "disk")
    throw std::invalid_argument("verify_long_stay: entry must differ from disk");
  if (!(t_lo > 0.0) || !(t_hi > t_lo) || points < 2)
    throw std::invalid_argument("verify_long_stay: bad grid");

  ExperimentResult res;
  res.name = "long-stay comparison vs disk";
  res.criterion = "survival(entry) > survival(disk) from crossover to t_hi";

  // Entry survival on the grid. Bounded entries go through the PDE; the
  // half-plane through its closed form; the rest through Monte Carlo.
  std::vector<double> grid(points);
  for (int i = 0; i < points; ++i)
    grid[i] = t_lo + (t_hi - t_lo) * i / double(points - 1);

  std::vector<double> s_entry(points);
  std::function<double(double)> eval;  // continuous evaluator when available
  std::vector<double> mc_times;
  if (entry.id == "strip") {
    pde::SolveOptions opt;
    opt.t_final = t_hi;
    auto field = pde::solve_killed_density(entry.domain, Point(0.0, 0.0), opt);
    auto shared = std::make_shared<pde::KilledHeatField>(std::move(field));
    eval = [shared](double t) { return shared->survival(t); };
    res.notes.push_back("strip survival by 1D cross-section PDE");
  } else if (entry.has_closed_survival) {
    eval = [&entry](double t) { return entry.survival(t); };
    res.notes.push_back("entry survival in closed form");
  } else {
    sampler::BatchOptions bo;
    bo.engine = sampler::BatchOptions::Engine::Wos;
    bo.count = mc_count;
    bo.seed = seed;
    bo.threads = threads;
    auto batch = sampler::run_batch(entry.domain, Point(0.0, 0.0), bo);
    mc_times = std::move(batch.times);
    std::sort(mc_times.begin(), mc_times.end());
    eval = [&mc_times](double t) {
      auto it = std::upper_bound(mc_times.begin(), mc_times.end(), t);
      return 1.0 -
             double(it - mc_times.begin()) / double(mc_times.size());
    };
    res.notes.push_back("entry survival by walk-on-spheres, n=" +
                        std::to_string(mc_times.size()));
  }
  for (int i = 0; i < points; ++i) s_entry[i] = eval(grid[i]);

  std::vector<double> s_disk(points);
  for (int i = 0; i < points; ++i)
    s_disk[i] = kernels::ball_survival(grid[i], 1.0, 2);

  // Smallest grid crossover such that the inequality holds through t_hi.
  int i0 = -1;
  for (int i = points; i-- > 0;) {
    if (s_entry[i] > s_disk[i]) i0 = i;
    else break;
  }
  res.table.cols = {"t", "survival_entry", "survival_disk"};
  for (int i = 0; i < points; ++i)
    res.table.rows.push_back({grid[i], s_entry[i], s_disk[i]});

  if (i0 < 0) {
    res.pass = false;
    res.inconclusive = true;
    double worst = 0.0;
    for (int i = 0; i < points; ++i)
      worst = std::max(worst, s_entry[i] / std::max(s_disk[i], 1e-300));
    res.scalars = {{"largest_ratio", worst}};
    res.notes.push_back("no crossover below t_hi");
    return res;
  }

  // Refine the crossover between the last failing node and i0; ties resolve
  // toward larger t0.
  double t0 = grid[i0];
  if (i0 > 0) {
    double lo = grid[i0 - 1], hi = grid[i0];
    for (int it = 0; it < 60; ++it) {
      double mid = 0.5 * (lo + hi);
      double gap = eval(mid) - kernels::ball_survival(mid, 1.0, 2);
      (gap > 0.0 ? hi : lo) = mid;
    }
    t0 = hi;
  }
  res.pass = true;

  // Decay-rate ordering: the fitted rate of the entry must stay below the
  // disk's eigenvalue.
  double lam_fit;
  if (!mc_times.empty()) {
    lam_fit = sampler::fit_lambda(mc_times, grid.front(), grid.back()).lambda;
  } else {
    std::vector<double> sv(points);
    for (int i = 0; i < points; ++i) sv[i] = s_entry[i];
    lam_fit = sampler::fit_lambda_curve(grid, sv).lambda;
  }
  double lam_disk = 5.783185962947;
  res.pass = res.pass && lam_fit < lam_disk;
  res.scalars = {{"t0", t0},
                 {"lambda_fit", lam_fit},
                 {"lambda_disk", lam_disk},
                 {"crossover_index", double(i0)}};
  return res;
}

ExperimentResult verify_hardy_tails(const SchlichtEntry& u,
                                    const SchlichtEntry& w, size_t count,
                                    uint64_t seed, int threads) {
  if (u.lambda_ref > 0.0 || w.lambda_ref > 0.0)
    throw std::invalid_argument(
        "verify_hardy_tails: exponential-tail entries rejected");

  auto sample = [&](const SchlichtEntry& e, uint64_t s) {
    sampler::BatchOptions bo;
    bo.engine = sampler::BatchOptions::Engine::Wos;
    bo.count = count;
    bo.seed = s;
    bo.threads = threads;
    auto batch = sampler::run_batch(e.domain, Point(0.0, 0.0), bo);
    std::sort(batch.times.begin(), batch.times.end());
    return batch.times;
  };
  auto tu = sample(u, seed);
  auto tw = sample(w, seed ^ 0x9e3779b97f4a7c15ULL);

  // Fit window per entry: the upper half of the law down to the last 32
  // exits, so the estimate uses the actual tail.
  auto window = [](const std::vector<double>& t) {
    double lo = t[t.size() / 2];
    double hi = t[t.size() - 32];
    return std::pair{lo, hi};
  };
  auto [ulo, uhi] = window(tu);
  auto [wlo, whi] = window(tw);
  auto fit_u = sampler::fit_tail_exponent(tu, ulo, uhi);
  auto fit_w = sampler::fit_tail_exponent(tw, wlo, whi);

  auto surv = [](const std::vector<double>& t, double at) {
    auto it = std::upper_bound(t.begin(), t.end(), at);
    return 1.0 - double(it - t.begin()) / double(t.size());
  };

  ExperimentResult res;
  res.name = "polynomial tail ordering";
  res.criterion =
      "fitted exponents ordered with disjoint 95% CIs; survival ratio grows "
      ">= 5x over a >= 25x window";

  double t_a = std::max(ulo, wlo);
  double t_b = std::min(uhi, whi);
  double span = t_b / t_a;
  double growth = 0.0;
  if (span >= 25.0) {
    double r_a = surv(tw, t_a) / std::max(surv(tu, t_a), 1e-300);
    double r_b = surv(tw, t_b) / std::max(surv(tu, t_b), 1e-300);
    growth = r_b / r_a;
  } else {
    res.inconclusive = true;
    res.notes.push_back("shared window shorter than factor 25");
  }

  bool ordered = fit_u.exponent - 1.96 * fit_u.se >
                 fit_w.exponent + 1.96 * fit_w.se;
  res.pass = !res.inconclusive && ordered && growth >= 5.0;
  res.scalars = {{"h_u", fit_u.exponent},   {"se_u", fit_u.se},
                 {"h_w", fit_w.exponent},   {"se_w", fit_w.se},
                 {"h_ref_u", u.h_ref},      {"h_ref_w", w.h_ref},
                 {"window_lo", t_a},        {"window_hi", t_b},
                 {"ratio_growth", growth}};
  res.table.cols = {"t", "survival_u", "survival_w"};
  for (int i = 0; i <= 16; ++i) {
    double t = t_a * std::pow(std::max(span, 1.0 + 1e-9), i / 16.0);
    res.table.rows.push_back({t, surv(tu, t), surv(tw, t)});
  }
  res.notes.push_back("windowed ratio growth is a finite-window proxy for "
                      "an unbounded-limit statement");
  return res;
}

int monotone_violations(const pde::RadialField& f, double tol_factor) {
  int bad = 0;
  double tol = tol_factor * f.h * f.h;
  for (const auto& [t, u] : f.snapshots) {
    for (size_t i = 0; i + 1 < u.size(); ++i)
      if (u[i + 1] > u[i] + tol) ++bad;
  }
  return bad;
}

}  // namespace exitlab::harness
