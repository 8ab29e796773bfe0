#include "exitlab/radial_heat.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace exitlab::pde {

namespace {

// Solves the tridiagonal system in place: diag b, sub a, super c.
void thomas(std::vector<double>& a, std::vector<double>& b,
            std::vector<double>& c, std::vector<double>& x) {
  size_t m = b.size();
  for (size_t i = 1; i < m; ++i) {
    double w = a[i] / b[i - 1];
    b[i] -= w * c[i - 1];
    x[i] -= w * x[i - 1];
  }
  x[m - 1] /= b[m - 1];
  for (size_t i = m - 1; i-- > 0;) x[i] = (x[i] - c[i] * x[i + 1]) / b[i];
}

double surface_coeff(int n) {
  if (n == 1) return 2.0;
  return n == 2 ? 2.0 * M_PI : 4.0 * M_PI;
}

}  // namespace

double RadialField::mass_at(double t) const {
  if (times.empty()) throw std::logic_error("mass_at: empty field");
  if (t <= times.front()) return mass.front();
  if (t >= times.back()) return mass.back();
  auto it = std::lower_bound(times.begin(), times.end(), t);
  size_t i = static_cast<size_t>(it - times.begin());
  double w = (t - times[i - 1]) / (times[i] - times[i - 1]);
  return mass[i - 1] + w * (mass[i] - mass[i - 1]);
}

double RadialField::flux_at(double t) const {
  if (times.empty()) throw std::logic_error("flux_at: empty field");
  if (t <= times.front()) return flux.front();
  if (t >= times.back()) return flux.back();
  auto it = std::lower_bound(times.begin(), times.end(), t);
  size_t i = static_cast<size_t>(it - times.begin());
  double w = (t - times[i - 1]) / (times[i] - times[i - 1]);
  return flux[i - 1] + w * (flux[i] - flux[i - 1]);
}

double RadialField::conservation_gap() const {
  double g = 0.0;
  for (size_t i = 0; i < times.size(); ++i)
    g = std::max(g, std::fabs(1.0 - mass[i] - flux[i]));
  return g;
}

RadialField radial_solve(const RadialOptions& opt) {
  if (opt.n < 1 || opt.n > 3) throw std::invalid_argument("radial_solve: n");
  if (!(opt.radius > 0.0) || opt.cells < 8 || !(opt.t_final > 0.0))
    throw std::invalid_argument("radial_solve: bad options");

  const int M = opt.cells;
  const double R = opt.radius;
  const double h = R / M;
  const double sn = surface_coeff(opt.n);

  RadialField f;
  f.n = opt.n;
  f.radius = R;
  f.h = h;
  f.t0 = opt.t0 > 0.0 ? opt.t0 : 16.0 * h * h;

  f.centers.resize(M);
  f.volumes.resize(M);
  // trans[i]: transmissibility of the face at r = i*h (between cells i-1, i);
  // trans[M] couples the last cell to the Dirichlet boundary over h/2.
  std::vector<double> trans(M + 1);
  for (int i = 0; i < M; ++i) {
    double r0 = i * h, r1 = (i + 1) * h;
    f.centers[i] = (i + 0.5) * h;
    f.volumes[i] = sn / opt.n * (std::pow(r1, opt.n) - std::pow(r0, opt.n));
    trans[i] = sn * std::pow(r0, opt.n - 1) / h;
  }
  trans[0] = 0.0;  // no flux through the center (pow(0,0) = 1 when n = 1)
  trans[M] = sn * std::pow(R, opt.n - 1) / (h / 2.0);

  // Initial data: free Gaussian at t0, normalized to unit discrete mass.
  // The spread sqrt(t0) = 4h resolves on the grid, and the mass already
  // absorbed by t0 is below any representable scale.
  std::vector<double> u(M);
  double m0 = 0.0;
  for (int i = 0; i < M; ++i) {
    u[i] = std::exp(-f.centers[i] * f.centers[i] / (2.0 * f.t0));
    m0 += f.volumes[i] * u[i];
  }
  for (int i = 0; i < M; ++i) u[i] /= m0;

  double t = f.t0;
  double cum_flux = 0.0;
  double mass = 1.0;
  const double dt_floor = f.t0 / 8.0;

  auto record = [&]() {
    f.times.push_back(t);
    f.mass.push_back(mass);
    f.flux.push_back(cum_flux);
    if (opt.probe_radius >= 0.0) {
      double r = std::clamp(opt.probe_radius, f.centers.front(), f.centers.back());
      size_t j = std::min<size_t>(
          M - 2, static_cast<size_t>(std::max(0.0, r / h - 0.5)));
      double w = (r - f.centers[j]) / h;
      w = std::clamp(w, 0.0, 1.0);
      f.probe.emplace_back(t, (1.0 - w) * u[j] + w * u[j + 1]);
    }
  };
  record();

  std::vector<double> snaps = opt.snapshot_times;
  std::sort(snaps.begin(), snaps.end());
  size_t next_snap = 0;
  while (next_snap < snaps.size() && snaps[next_snap] <= t) ++next_snap;

  std::vector<double> a(M), b(M), c(M), rhs(M);
  while (t < opt.t_final - 1e-300) {
    double dt = std::max(dt_floor, opt.step_ratio * t);
    if (t + dt > opt.t_final) dt = opt.t_final - t;
    if (next_snap < snaps.size() && t + dt > snaps[next_snap])
      dt = snaps[next_snap] - t;

    // Crank-Nicolson: (V + k L) u+ = (V - k L) u with k = dt/4 and
    // L the (positive) flux-difference operator, the 1/2 of the generator
    // folded into k.
    double k = dt / 4.0;
    for (int i = 0; i < M; ++i) {
      double tl = trans[i], tr = trans[i + 1];
      a[i] = -k * tl;
      c[i] = -k * tr;
      b[i] = f.volumes[i] + k * (tl + tr);
      double left = i > 0 ? u[i - 1] : 0.0;
      double right = i < M - 1 ? u[i + 1] : 0.0;  // Dirichlet ghost = 0
      rhs[i] = f.volumes[i] * u[i] - k * (tl + tr) * u[i] + k * tl * left +
               k * tr * right;
    }
    std::vector<double> unew = rhs;
    thomas(a, b, c, unew);

    // Boundary flux over the step; telescoping against the volume update
    // keeps mass + flux = 1 exactly.
    cum_flux += k * trans[M] * (u[M - 1] + unew[M - 1]);
    u.swap(unew);
    mass = 0.0;
    for (int i = 0; i < M; ++i) mass += f.volumes[i] * u[i];

    t += dt;
    record();
    if (next_snap < snaps.size() && t >= snaps[next_snap] - 1e-300) {
      f.snapshots.emplace_back(t, u);
      ++next_snap;
    }
  }
  return f;
}

double interval_eigenvalue(double length, int cells) {
  if (!(length > 0.0) || cells < 8)
    throw std::invalid_argument("interval_eigenvalue: bad arguments");
  const int M = cells;
  const double h = length / M;
  std::vector<double> x(M, 1.0), y(M);
  double lambda = 0.0;
  // T has interior transmissibility 1/h and half-cell boundary coupling 2/h;
  // V = h per cell.
  auto tl = [&](int i) { return i == 0 ? 2.0 / h : 1.0 / h; };
  auto tr = [&](int i) { return i == M - 1 ? 2.0 / h : 1.0 / h; };
  for (int it = 0; it < 200; ++it) {
    std::vector<double> a(M), b(M), c(M);
    for (int i = 0; i < M; ++i) {
      a[i] = -tl(i);
      c[i] = -tr(i);
      b[i] = tl(i) + tr(i);
      y[i] = h * x[i];
    }
    thomas(a, b, c, y);
    double nrm = 0.0;
    for (int i = 0; i < M; ++i) nrm += h * y[i] * y[i];
    nrm = std::sqrt(nrm);
    for (int i = 0; i < M; ++i) y[i] /= nrm;
    double num = 0.0, den = 0.0;
    for (int i = 0; i < M; ++i) {
      double left = i > 0 ? y[i - 1] : 0.0;
      double right = i < M - 1 ? y[i + 1] : 0.0;
      num += y[i] * (tl(i) * (y[i] - left) + tr(i) * (y[i] - right));
      den += h * y[i] * y[i];
    }
    double next = num / den;
    bool done = it > 3 && std::fabs(next - lambda) < 1e-13 * next;
    lambda = next;
    x = y;
    if (done) break;
  }
  return lambda;
}

double radial_eigenvalue(int n, double r_inner, double r_outer, int cells) {
  if (n != 2 && n != 3) throw std::invalid_argument("radial_eigenvalue: n");
  if (!(r_outer > r_inner) || r_inner < 0.0 || cells < 8)
    throw std::invalid_argument("radial_eigenvalue: bad interval");

  const int M = cells;
  const double h = (r_outer - r_inner) / M;
  const double sn = surface_coeff(n);

  std::vector<double> vol(M), trans(M + 1), center(M);
  for (int i = 0; i < M; ++i) {
    double r0 = r_inner + i * h, r1 = r0 + h;
    center[i] = r0 + 0.5 * h;
    vol[i] = sn / n * (std::pow(r1, n) - std::pow(r0, n));
    trans[i] = sn * std::pow(r0, n - 1) / h;
  }
  trans[M] = sn * std::pow(r_outer, n - 1) / (h / 2.0);
  if (r_inner > 0.0) trans[0] = sn * std::pow(r_inner, n - 1) / (h / 2.0);
  else trans[0] = 0.0;  // Neumann at the center of a solid ball

  // Inverse power iteration on T x = lambda V x for the -Laplacian operator
  // (no 1/2 here; callers quote Dirichlet eigenvalues of -Laplacian).
  std::vector<double> x(M, 1.0), y(M);
  double lambda = 0.0;
  for (int it = 0; it < 200; ++it) {
    std::vector<double> a(M), b(M), c(M);
    for (int i = 0; i < M; ++i) {
      a[i] = -trans[i];
      c[i] = -trans[i + 1];
      b[i] = trans[i] + trans[i + 1];
      y[i] = vol[i] * x[i];
    }
    thomas(a, b, c, y);
    // Rayleigh quotient: x^T T x / x^T V x computed on the new iterate.
    double num = 0.0, den = 0.0, nrm = 0.0;
    for (int i = 0; i < M; ++i) nrm += vol[i] * y[i] * y[i];
    nrm = std::sqrt(nrm);
    for (int i = 0; i < M; ++i) y[i] /= nrm;
    for (int i = 0; i < M; ++i) {
      double left = i > 0 ? y[i - 1] : 0.0;
      double right = i < M - 1 ? y[i + 1] : 0.0;
      num += y[i] * (trans[i] * (y[i] - left) + trans[i + 1] * (y[i] - right));
      den += vol[i] * y[i] * y[i];
    }
    double next = num / den;
    bool done = it > 3 && std::fabs(next - lambda) < 1e-13 * next;
    lambda = next;
    x = y;
    if (done) break;
  }
  return lambda;
}

}  // namespace exitlab::pde
