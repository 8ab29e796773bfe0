#include "exitlab/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <stdexcept>

#include "exitlab/radial_heat.hpp"

namespace exitlab::kernels {

namespace {

double bessel_j(double nu, double x) { return std::cyl_bessel_j(nu, x); }

BesselTable build_table(double nu) {
  BesselTable tab;
  tab.nu = nu;
  int found = 0;
  double step = 0.25;
  double x0 = step, f0 = bessel_j(nu, x0);
  while (found < BesselTable::kCount) {
    double x1 = x0 + step, f1 = bessel_j(nu, x1);
    if ((f0 < 0.0) != (f1 < 0.0)) {
      double lo = x0, hi = x1, flo = f0;
      for (int it = 0; it < 96; ++it) {
        double mid = 0.5 * (lo + hi);
        double fm = bessel_j(nu, mid);
        if ((fm < 0.0) == (flo < 0.0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      double z = 0.5 * (lo + hi);
      tab.zero[found] = z;
      tab.weight[found] = bessel_j(nu + 1.0, z);
      ++found;
    }
    x0 = x1;
    f0 = f1;
  }
  return tab;
}

const BesselTable& table_for(int n) {
  static const BesselTable t2 = build_table(0.0);
  static const BesselTable t3 = build_table(0.5);
  if (n == 2) return t2;
  if (n == 3) return t3;
  throw std::invalid_argument("bessel_table: n must be 2 or 3");
}

// Series coefficient a_k = 2 j^(nu-1) / (2^nu Gamma(nu+1) J_{nu+1}(j)), from
// phi_k(0) * int(phi_k) / int(phi_k^2) for the radial eigenfunctions
// r^(-nu) J_nu(j r).
double series_coeff(const BesselTable& tab, int k) {
  double j = tab.zero[k];
  return 2.0 * std::pow(j, tab.nu - 1.0) /
         (std::pow(2.0, tab.nu) * std::tgamma(tab.nu + 1.0) * tab.weight[k]);
}

// Cached fine radial solve used below the series/PDE switch, R = 1.
struct SurvivalCache {
  pde::RadialField field;
  double seam;  // series(switch) / field(switch)
};

const SurvivalCache& survival_cache(int n) {
  static std::once_flag once2, once3;
  static SurvivalCache c2, c3;
  auto build = [](int dim, SurvivalCache& c) {
    pde::RadialOptions opt;
    opt.n = dim;
    opt.radius = 1.0;
    opt.cells = 1200;
    opt.t_final = kBallSurvivalSwitch * 1.02;
    opt.step_ratio = 2e-4;
    c.field = pde::radial_solve(opt);
    c.seam = ball_survival_series(kBallSurvivalSwitch, 1.0, dim) /
             c.field.mass_at(kBallSurvivalSwitch);
  };
  if (n == 2) {
    std::call_once(once2, build, 2, std::ref(c2));
    return c2;
  }
  if (n == 3) {
    std::call_once(once3, build, 3, std::ref(c3));
    return c3;
  }
  throw std::invalid_argument("ball_survival: n must be 2 or 3");
}

}  // namespace

const BesselTable& bessel_table(int n) { return table_for(n); }

double heat_kernel(double t, const Point& x, const Point& y) {
  if (!(t > 0.0)) throw std::invalid_argument("heat_kernel: t > 0");
  if (x.n != y.n) throw std::invalid_argument("heat_kernel: dim mismatch");
  double d2 = (x - y).norm2();
  double c = std::pow(2.0 * M_PI * t, -0.5 * x.n);
  return c * std::exp(-d2 / (2.0 * t));
}

double ball_survival_series(double t, double R, int n, SeriesTail* tail) {
  if (!(t > 0.0) || !(R > 0.0))
    throw std::invalid_argument("ball_survival_series: t, R > 0");
  const BesselTable& tab = table_for(n);
  double tau = t / (R * R);
  double sum = 0.0;
  int used = 0;
  double last = 0.0;
  for (int k = 0; k < BesselTable::kCount; ++k) {
    double term = series_coeff(tab, k) *
                  std::exp(-0.5 * tab.zero[k] * tab.zero[k] * tau);
    sum += term;
    last = std::fabs(term);
    used = k + 1;
    if (last < 1e-17 * std::max(std::fabs(sum), 0.1)) break;
  }
  if (tail) {
    tail->terms_used = used;
    tail->truncation_bound = 2.0 * last;
  }
  return std::clamp(sum, 0.0, 1.0);
}

double ball_survival(double t, double R, int n) {
  if (!(t > 0.0) || !(R > 0.0))
    throw std::invalid_argument("ball_survival: t, R > 0");
  double tau = t / (R * R);
  if (tau >= kBallSurvivalSwitch) return ball_survival_series(tau, 1.0, n);
  const SurvivalCache& c = survival_cache(n);
  if (tau <= c.field.times.front()) return 1.0;
  return std::clamp(c.seam * c.field.mass_at(tau), 0.0, 1.0);
}

namespace {

// Exit-time CDF of the unit ball and its t-derivative, from the series.
double exit_cdf(int n, double t) { return 1.0 - ball_survival_series(t, 1.0, n); }

double exit_pdf(int n, double t) {
  const BesselTable& tab = table_for(n);
  double sum = 0.0;
  for (int k = 0; k < BesselTable::kCount; ++k) {
    double j2 = tab.zero[k] * tab.zero[k];
    double term = series_coeff(tab, k) * 0.5 * j2 * std::exp(-0.5 * j2 * t);
    sum += term;
    if (std::fabs(term) < 1e-17 * std::max(std::fabs(sum), 1e-280)) break;
  }
  return sum;
}

struct QuantileTable {
  static constexpr int kSize = 2048;
  std::array<double, kSize> t;  // t[i] solves F(t) = (i+1)/(kSize+1)
  double t_floor;               // F(t_floor) ~ 1e-12
};

double invert_cdf(int n, double u, double lo, double hi) {
  for (int it = 0; it < 90; ++it) {
    double mid = 0.5 * (lo + hi);
    if (exit_cdf(n, mid) < u) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

const QuantileTable& quantile_table(int n) {
  static std::once_flag once2, once3;
  static QuantileTable q2, q3;
  auto build = [](int dim, QuantileTable& q) {
    double lo = 2e-3, hi = 80.0;
    for (int i = 0; i < QuantileTable::kSize; ++i) {
      double u = double(i + 1) / (QuantileTable::kSize + 1);
      q.t[i] = invert_cdf(dim, u, lo, hi);
      lo = q.t[i];  // monotone targets let the bracket shrink
    }
    q.t_floor = invert_cdf(dim, 1e-12, 2e-3, 1.0);
  };
  if (n == 2) {
    std::call_once(once2, build, 2, std::ref(q2));
    return q2;
  }
  if (n == 3) {
    std::call_once(once3, build, 3, std::ref(q3));
    return q3;
  }
  throw std::invalid_argument("ball_exit_quantile: n must be 2 or 3");
}

}  // namespace

double ball_exit_quantile(double u, int n) {
  if (!(u > 0.0) || !(u < 1.0))
    throw std::invalid_argument("ball_exit_quantile: u in (0,1)");
  const QuantileTable& q = quantile_table(n);

  // Far tail, below CDF resolution: keep monotone with an asymptotic ramp;
  // the probability of landing here is < 1e-12 per draw.
  if (u < 1e-12) return q.t_floor * std::log(1e-12) / std::log(u);

  double scaled = u * (QuantileTable::kSize + 1);
  int i = std::clamp(int(scaled) - 1, 0, QuantileTable::kSize - 1);
  double lo = i > 0 ? q.t[i - 1] : q.t_floor * 0.5;
  double hi = i < QuantileTable::kSize - 1 ? q.t[i + 1] : 0.0;
  if (hi <= 0.0) {
    // Above the table: exponential tail seed from the leading series term.
    const BesselTable& tab = table_for(n);
    double j2 = tab.zero[0] * tab.zero[0];
    double a0 = series_coeff(tab, 0);
    hi = std::max(q.t[QuantileTable::kSize - 1] * 2.0,
                  -2.0 / j2 * std::log((1.0 - u) / a0));
  }
  double t = std::clamp(q.t[i], lo, hi);

  for (int it = 0; it < 60; ++it) {
    double f = exit_cdf(n, t) - u;
    if (f > 0.0) hi = t;
    else lo = t;
    double d = exit_pdf(n, t);
    double step = d > 0.0 ? f / d : 0.0;
    double next = t - step;
    if (!(next > lo) || !(next < hi)) next = 0.5 * (lo + hi);
    if (std::fabs(next - t) < 1e-12 * std::max(1.0, t)) {
      t = next;
      break;
    }
    t = next;
  }
  return t;
}

double halfspace_exit_cdf(double t, double d) {
  if (!(t > 0.0) || d < 0.0)
    throw std::invalid_argument("halfspace_exit_cdf: t > 0, d >= 0");
  if (d == 0.0) return 1.0;
  return std::erfc(d / std::sqrt(2.0 * t));
}

double ball_hit_prob(double r, const Point& x) {
  if (!(r > 0.0)) throw std::invalid_argument("ball_hit_prob: r > 0");
  double a = x.norm();
  if (a < r * (1.0 - 1e-12))
    throw std::invalid_argument("ball_hit_prob: |x| >= r required");
  if (x.n == 2) return 1.0;
  return std::min(1.0, r / a);
}

double green_closed_form(const Domain& dom, const Point& x, const Point& y) {
  if (x.n != dom.dim() || y.n != dom.dim())
    throw std::invalid_argument("green_closed_form: dim mismatch");
  if (!dom.inside(x) || !dom.inside(y))
    throw std::invalid_argument("green_closed_form: points must be inside");
  double sep = geometry::dist(x, y);
  if (sep == 0.0) throw std::invalid_argument("green_closed_form: x == y");

  switch (dom.kind()) {
    case Domain::Kind::Ball: {
      double R = dom.radius();
      Point a = x - dom.center(), b = y - dom.center();
      if (dom.dim() == 2) {
        // |R^2 - a conj(b)| with the planar points read as complex numbers.
        double d = R * R - geometry::dot(a, b);
        double cr = a[1] * b[0] - a[0] * b[1];
        double num = std::hypot(d, cr);
        return std::log(num / (R * sep)) / M_PI;
      }
      double bn = b.norm();
      if (bn == 0.0) return (1.0 / sep - 1.0 / R) / (2.0 * M_PI);
      Point bstar = b * (R * R / (bn * bn));
      return (1.0 / sep - R / (bn * geometry::dist(a, bstar))) / (2.0 * M_PI);
    }
    case Domain::Kind::HalfSpace: {
      double sy = dom.offset() - geometry::dot(dom.normal(), y);
      Point ystar = y + dom.normal() * (2.0 * sy);
      double refl = geometry::dist(x, ystar);
      if (dom.dim() == 2) return std::log(refl / sep) / M_PI;
      return (1.0 / sep - 1.0 / refl) / (2.0 * M_PI);
    }
    default:
      throw std::invalid_argument(
          "green_closed_form: closed form only for Ball and HalfSpace");
  }
}

double mcconnell_rate(int m) {
  if (m < 3) throw std::invalid_argument("mcconnell_rate: m >= 3");
  double c = std::cos(M_PI / m);
  return 0.5 * c * c;
}

BesselDump bessel_dump(int n) {
  const BesselTable& tab = table_for(n);
  BesselDump d;
  d.n = n;
  d.zeros.assign(tab.zero.begin(), tab.zero.end());
  d.weights.assign(tab.weight.begin(), tab.weight.end());
  return d;
}

}  // namespace exitlab::kernels
