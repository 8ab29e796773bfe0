#include "exitlab/grid_heat.hpp"

#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace exitlab::pde {

using geometry::Point;

namespace {

double interp_series(const std::vector<double>& ts, const std::vector<double>& vs,
                     double t) {
  if (ts.empty()) throw std::logic_error("grid field: empty record");
  if (t <= ts.front()) return vs.front();
  if (t >= ts.back()) return vs.back();
  auto it = std::lower_bound(ts.begin(), ts.end(), t);
  size_t i = static_cast<size_t>(it - ts.begin());
  double w = (t - ts[i - 1]) / (ts[i] - ts[i - 1]);
  return vs[i - 1] + w * (vs[i] - vs[i - 1]);
}

}  // namespace

double GridField::mass_at(double t) const { return interp_series(times, mass, t); }

double GridField::flux_at(double t, int label) const {
  return interp_series(times, flux.at(static_cast<size_t>(label)), t);
}

double GridField::conservation_gap() const {
  double g = 0.0;
  for (size_t i = 0; i < times.size(); ++i) {
    double s = mass[i];
    for (const auto& f : flux) s += f[i];
    g = std::max(g, std::fabs(1.0 - s));
  }
  return g;
}

double GridField::snapshot_value(size_t snap, const Point& p) const {
  const auto& u = snapshots.at(snap).second;
  double best = 1e300;
  size_t arg = 0;
  for (size_t i = 0; i < nodes.size(); ++i) {
    double d = geometry::dist(nodes[i], p);
    if (d < best) {
      best = d;
      arg = i;
    }
  }
  return u[arg];
}

GridField grid_solve(const GridRegion& region, const GridOptions& opt) {
  if (!(opt.h > 0.0) || opt.phases.empty())
    throw std::invalid_argument("grid_solve: need h > 0 and phases");
  for (size_t i = 0; i < opt.phases.size(); ++i) {
    if (!(opt.phases[i].dt > 0.0) ||
        (i > 0 && opt.phases[i].t_end <= opt.phases[i - 1].t_end))
      throw std::invalid_argument("grid_solve: phases must be increasing");
  }
  const double h = opt.h;
  const Point& x0 = opt.x0;
  if (!region.inside(x0))
    throw std::invalid_argument("grid_solve: start point outside region");

  // Lattice indices covering [lo, hi], anchored so that x0 = index (0,0).
  int i_lo = static_cast<int>(std::floor((region.lo[0] - x0[0]) / h)) - 1;
  int i_hi = static_cast<int>(std::ceil((region.hi[0] - x0[0]) / h)) + 1;
  int j_lo = static_cast<int>(std::floor((region.lo[1] - x0[1]) / h)) - 1;
  int j_hi = static_cast<int>(std::ceil((region.hi[1] - x0[1]) / h)) + 1;
  int nx = i_hi - i_lo + 1, ny = j_hi - j_lo + 1;
  if (nx <= 0 || ny <= 0 || static_cast<long long>(nx) * ny > 80'000'000LL)
    throw std::invalid_argument("grid_solve: lattice too large");

  auto node_point = [&](int i, int j) {
    return Point(x0[0] + i * h, x0[1] + j * h);
  };

  std::vector<int> index(static_cast<size_t>(nx) * ny, -1);
  auto flat = [&](int i, int j) {
    return static_cast<size_t>(j - j_lo) * nx + (i - i_lo);
  };

  GridField f;
  f.h = h;
  f.t0 = opt.t0 > 0.0 ? opt.t0 : 16.0 * h * h;
  for (int j = j_lo; j <= j_hi; ++j)
    for (int i = i_lo; i <= i_hi; ++i) {
      Point p = node_point(i, j);
      if (region.inside(p)) {
        index[flat(i, j)] = static_cast<int>(f.nodes.size());
        f.nodes.push_back(p);
      }
    }
  const int N = static_cast<int>(f.nodes.size());
  if (N == 0) throw std::invalid_argument("grid_solve: empty region");

  // Adjacency: per node, neighbor index or ~label for absorbing edges.
  struct Stencil {
    int nb[4];  // >= 0: interior neighbor; < 0: absorbed with label ~nb
  };
  std::vector<Stencil> st(static_cast<size_t>(N));
  std::vector<std::pair<int, int>> absorbing;  // (node, label) per edge
  {
    const int di[4] = {1, -1, 0, 0};
    const int dj[4] = {0, 0, 1, -1};
    for (int j = j_lo; j <= j_hi; ++j)
      for (int i = i_lo; i <= i_hi; ++i) {
        int me = index[flat(i, j)];
        if (me < 0) continue;
        for (int d = 0; d < 4; ++d) {
          int ii = i + di[d], jj = j + dj[d];
          int nb = (ii >= i_lo && ii <= i_hi && jj >= j_lo && jj <= j_hi)
                       ? index[flat(ii, jj)]
                       : -1;
          if (nb >= 0) {
            st[static_cast<size_t>(me)].nb[d] = nb;
          } else {
            int lab = region.label ? region.label(node_point(ii, jj)) : 0;
            if (lab < 0 || lab >= region.n_labels)
              throw std::logic_error("grid_solve: label out of range");
            st[static_cast<size_t>(me)].nb[d] = ~lab;
            absorbing.emplace_back(me, lab);
          }
        }
      }
  }

  // Gaussian start, normalized to unit discrete mass.
  Eigen::VectorXd u(N);
  for (int k = 0; k < N; ++k) {
    double d2 = (f.nodes[k] - x0).norm2();
    u[k] = std::exp(-d2 / (2.0 * f.t0));
  }
  u *= 1.0 / (u.sum() * h * h);

  double t = f.t0;
  double mass = 1.0;
  std::vector<double> cum_flux(static_cast<size_t>(region.n_labels), 0.0);
  f.flux.assign(static_cast<size_t>(region.n_labels), {});

  auto record = [&]() {
    f.times.push_back(t);
    f.mass.push_back(mass);
    for (int l = 0; l < region.n_labels; ++l)
      f.flux[static_cast<size_t>(l)].push_back(cum_flux[static_cast<size_t>(l)]);
  };
  record();

  std::vector<double> snaps = opt.snapshot_times;
  std::sort(snaps.begin(), snaps.end());
  size_t next_snap = 0;
  while (next_snap < snaps.size() && snaps[next_snap] <= t) ++next_snap;

  Eigen::SparseMatrix<double> M1(N, N);
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver;

  for (const auto& phase : opt.phases) {
    if (phase.t_end <= t) continue;
    double beta = phase.dt / (4.0 * h * h);

    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<size_t>(N) * 5);
    for (int k = 0; k < N; ++k) {
      double diag = 1.0 + 4.0 * beta;
      for (int d = 0; d < 4; ++d) {
        int nb = st[static_cast<size_t>(k)].nb[d];
        if (nb >= 0) trip.emplace_back(k, nb, -beta);
        // absorbing edges keep the full diagonal contribution
      }
      trip.emplace_back(k, k, diag);
    }
    M1.setZero();
    M1.setFromTriplets(trip.begin(), trip.end());
    solver.compute(M1);
    if (solver.info() != Eigen::Success)
      throw std::runtime_error("grid_solve: factorization failed");

    Eigen::VectorXd rhs(N), unew(N);
    while (t < phase.t_end - 1e-300) {
      double dt = std::min(phase.dt, phase.t_end - t);
      double b = dt / (4.0 * h * h);
      bool shortened = std::fabs(dt - phase.dt) > 1e-12 * phase.dt;
      // rhs = (I - beta L) u, assembled from the stencil
      for (int k = 0; k < N; ++k) {
        double acc = (1.0 - 4.0 * b) * u[k];
        for (int d = 0; d < 4; ++d) {
          int nb = st[static_cast<size_t>(k)].nb[d];
          if (nb >= 0) acc += b * u[nb];
        }
        rhs[k] = acc;
      }
      if (!shortened) {
        unew = solver.solve(rhs);
      } else {
        // Final fractional step of a phase: refactor once for it.
        Eigen::SparseMatrix<double> Mf(N, N);
        std::vector<Eigen::Triplet<double>> tf;
        tf.reserve(static_cast<size_t>(N) * 5);
        for (int k = 0; k < N; ++k) {
          for (int d = 0; d < 4; ++d) {
            int nb = st[static_cast<size_t>(k)].nb[d];
            if (nb >= 0) tf.emplace_back(k, nb, -b);
          }
          tf.emplace_back(k, k, 1.0 + 4.0 * b);
        }
        Mf.setFromTriplets(tf.begin(), tf.end());
        Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> s2;
        s2.compute(Mf);
        unew = s2.solve(rhs);
      }

      // Per-label flux over the step; exact against the mass update.
      for (const auto& [k, lab] : absorbing)
        cum_flux[static_cast<size_t>(lab)] += (dt / 4.0) * (u[k] + unew[k]);
      u = unew;
      mass = u.sum() * h * h;
      t += dt;
      record();
      while (next_snap < snaps.size() && t + 0.5 * dt >= snaps[next_snap]) {
        f.snapshots.emplace_back(t, std::vector<double>(u.data(), u.data() + N));
        ++next_snap;
      }
    }
  }
  return f;
}

GridRegion region_from_domain(const geometry::Domain& dom,
                              std::optional<double> trunc_radius) {
  GridRegion r;
  const geometry::Domain* d = &dom;
  if (trunc_radius) {
    double R = *trunc_radius;
    r.inside = [d, R](const Point& p) {
      return p.norm() < R && d->sampling_inside(p);
    };
    r.label = [d](const Point& p) { return d->sampling_inside(p) ? 1 : 0; };
    r.n_labels = 2;
    r.lo = Point(-R, -R);
    r.hi = Point(R, R);
  } else {
    if (!dom.is_bounded())
      throw std::invalid_argument(
          "region_from_domain: unbounded domain needs a truncation radius");
    r.inside = [d](const Point& p) { return d->sampling_inside(p); };
    r.label = [](const Point&) { return 0; };
    r.n_labels = 1;
    auto bb = dom.bounding_box();
    r.lo = bb[0];
    r.hi = bb[1];
  }
  return r;
}

}  // namespace exitlab::pde
