#include "exitlab/pde.hpp"

#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace exitlab::pde {

using geometry::Domain;
using geometry::Point;

double KilledHeatField::survival(double t) const {
  return method == Method::Radial ? radial.mass_at(t) : grid.mass_at(t);
}

double KilledHeatField::exit_cdf(double t, int label) const {
  if (method == Method::Radial) return radial.flux_at(t);
  if (label >= 0) return grid.flux_at(t, label);
  double s = 0.0;
  for (size_t l = 0; l < grid.flux.size(); ++l)
    s += grid.flux_at(t, static_cast<int>(l));
  return s;
}

double KilledHeatField::conservation_gap() const {
  return method == Method::Radial ? radial.conservation_gap()
                                  : grid.conservation_gap();
}

KilledHeatField solve_killed_density(const Domain& dom, const Point& x0,
                                     const SolveOptions& opt) {
  if (!(opt.t_final > 0.0))
    throw std::invalid_argument("solve_killed_density: t_final > 0");
  if (x0.n != dom.dim())
    throw std::invalid_argument("solve_killed_density: dim mismatch");
  if (!dom.sampling_inside(x0))
    throw std::invalid_argument("solve_killed_density: start outside domain");

  KilledHeatField f;

  // Rotation-invariant case: centered ball seen from its center (punctures
  // are invisible, so a punctured ball qualifies through its base).
  const Domain* d = &dom;
  if (d->kind() == Domain::Kind::Punctured) d = &d->base();
  if (d->kind() == Domain::Kind::Ball &&
      geometry::dist(x0, d->center()) < 1e-14 * d->radius()) {
    RadialOptions ro;
    ro.n = d->dim();
    ro.radius = d->radius();
    ro.cells = opt.h > 0.0 ? std::max(8, int(std::lround(d->radius() / opt.h)))
                           : 1500;
    ro.t_final = opt.t_final;
    ro.step_ratio = 5e-4;
    ro.snapshot_times = opt.snapshot_times;
    f.method = KilledHeatField::Method::Radial;
    f.radial = radial_solve(ro);
    return f;
  }

  // Strip from the centerline: the longitudinal coordinate never exits, so
  // the exit law is exactly the 1D symmetric-interval law.
  if (d->kind() == Domain::Kind::Strip &&
      std::fabs(x0[1]) < 1e-14 * d->halfwidth()) {
    RadialOptions ro;
    ro.n = 1;
    ro.radius = d->halfwidth();
    ro.cells =
        opt.h > 0.0 ? std::max(8, int(std::lround(d->halfwidth() / opt.h)))
                    : 1500;
    ro.t_final = opt.t_final;
    ro.step_ratio = 5e-4;
    ro.snapshot_times = opt.snapshot_times;
    f.method = KilledHeatField::Method::Radial;
    f.radial = radial_solve(ro);
    return f;
  }

  if (dom.dim() != 2)
    throw std::invalid_argument(
        "solve_killed_density: 3D solves only for centered balls");
  if (!dom.is_bounded() && !opt.truncation)
    throw std::invalid_argument(
        "solve_killed_density: unbounded domain needs truncation");

  GridRegion region = region_from_domain(dom, opt.truncation);
  GridOptions go;
  go.x0 = x0;
  double extent = std::max(region.hi[0] - region.lo[0],
                           region.hi[1] - region.lo[1]);
  go.h = opt.h > 0.0 ? opt.h : extent / 300.0;
  double dt = opt.dt > 0.0 ? opt.dt : go.h * go.h / 2.0;
  // Two phases: a fine start while the density is still sharp, then a
  // coarser march. Keeps one factorization per phase.
  double t_switch = std::min(opt.t_final, std::max(64.0 * go.h * go.h, 400.0 * dt));
  if (t_switch < opt.t_final) {
    go.phases = {{t_switch, dt}, {opt.t_final, std::max(dt, opt.t_final / 400.0)}};
  } else {
    go.phases = {{opt.t_final, dt}};
  }
  go.snapshot_times = opt.snapshot_times;
  f.method = KilledHeatField::Method::Grid;
  f.grid = grid_solve(region, go);
  return f;
}

std::vector<double> exit_cdf_flux(const KilledHeatField& field,
                                  const std::vector<double>& t_grid,
                                  int label) {
  std::vector<double> out;
  out.reserve(t_grid.size());
  for (double t : t_grid) out.push_back(field.exit_cdf(t, label));
  return out;
}

namespace {

// Cut-cell FV assembly for the planar Dirichlet eigenproblem. Cells are
// centered on a lattice; a face toward an outside neighbor is shortened to
// the boundary crossing (bisection on the inside predicate) and the cell
// volume is scaled by its inside arms.
EigenResult eigen_cutcell(const Domain& dom, double h) {
  auto bb = dom.bounding_box();
  double lox = bb[0][0] - 1.5 * h, loy = bb[0][1] - 1.5 * h;
  int nx = static_cast<int>(std::ceil((bb[1][0] - bb[0][0]) / h)) + 3;
  int ny = static_cast<int>(std::ceil((bb[1][1] - bb[0][1]) / h)) + 3;
  if (static_cast<long long>(nx) * ny > 40'000'000LL)
    throw std::invalid_argument("eigen_lambda: lattice too large");

  auto center = [&](int i, int j) {
    return Point(lox + (i + 0.5) * h, loy + (j + 0.5) * h);
  };
  auto inside = [&](const Point& p) { return dom.sampling_inside(p); };

  std::vector<int> index(static_cast<size_t>(nx) * ny, -1);
  std::vector<Point> nodes;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      Point p = center(i, j);
      if (inside(p)) {
        index[static_cast<size_t>(j) * nx + i] = static_cast<int>(nodes.size());
        nodes.push_back(p);
      }
    }
  const int N = static_cast<int>(nodes.size());
  if (N < 16) throw std::invalid_argument("eigen_lambda: grid too coarse");

  auto cut = [&](const Point& from, int axis, double dir) {
    double lo = 0.0, hi = h;
    for (int it = 0; it < 60; ++it) {
      double mid = 0.5 * (lo + hi);
      Point p = from;
      p[axis] += dir * mid;
      if (inside(p)) lo = mid;
      else hi = mid;
    }
    return std::max(0.5 * (lo + hi), 1e-6 * h);
  };

  std::vector<Eigen::Triplet<double>> trip;
  Eigen::VectorXd vol(N);
  const int di[4] = {1, -1, 0, 0};
  const int dj[4] = {0, 0, 1, -1};
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      int me = index[static_cast<size_t>(j) * nx + i];
      if (me < 0) continue;
      Point p = center(i, j);
      double diag = 0.0;
      double arm[4];
      for (int d = 0; d < 4; ++d) {
        int ii = i + di[d], jj = j + dj[d];
        int nb = (ii >= 0 && ii < nx && jj >= 0 && jj < ny)
                     ? index[static_cast<size_t>(jj) * nx + ii]
                     : -1;
        if (nb >= 0) {
          trip.emplace_back(me, nb, -1.0);  // transmissibility h/h
          diag += 1.0;
          arm[d] = 0.5 * h;
        } else {
          int axis = d < 2 ? 0 : 1;
          double dir = (d == 0 || d == 2) ? 1.0 : -1.0;
          double s = cut(p, axis, dir);
          diag += h / s;
          arm[d] = std::min(s, 0.5 * h);
        }
      }
      trip.emplace_back(me, me, diag);
      vol[me] = (arm[0] + arm[1]) * (arm[2] + arm[3]);
    }

  Eigen::SparseMatrix<double> T(N, N);
  T.setFromTriplets(trip.begin(), trip.end());
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver;
  solver.compute(T);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("eigen_lambda: factorization failed");

  Eigen::VectorXd x = Eigen::VectorXd::Ones(N);
  double lambda = 0.0;
  for (int it = 0; it < 400; ++it) {
    Eigen::VectorXd y = solver.solve(vol.cwiseProduct(x));
    y /= std::sqrt(y.cwiseProduct(vol.cwiseProduct(y)).sum());
    Eigen::VectorXd Ty = T * y;
    double next = y.dot(Ty) / y.cwiseProduct(vol.cwiseProduct(y)).sum();
    bool done = it > 3 && std::fabs(next - lambda) < 1e-12 * next;
    lambda = next;
    x = y;
    if (done) break;
  }
  if (x.sum() < 0.0) x = -x;

  EigenResult res;
  res.lambda = lambda;
  res.h = h;
  Eigen::VectorXd r = T * x - lambda * vol.cwiseProduct(x);
  res.residual = r.norm() / vol.cwiseProduct(x).norm();
  res.nodes = std::move(nodes);
  res.mode.assign(x.data(), x.data() + N);
  return res;
}

}  // namespace

EigenResult eigen_lambda(const Domain& dom, double h) {
  const Domain* d = &dom;
  if (d->kind() == Domain::Kind::Punctured) d = &d->base();

  switch (d->kind()) {
    case Domain::Kind::HalfSpace:
    case Domain::Kind::Sector:
    case Domain::Kind::ComplementOfCompact: {
      EigenResult r;
      r.unbounded = true;
      return r;
    }
    case Domain::Kind::Strip: {
      EigenResult r;
      r.lambda = interval_eigenvalue(2.0 * d->halfwidth(), 4000);
      return r;
    }
    case Domain::Kind::Ball:
      if (d->dim() == 3) {
        EigenResult r;
        r.lambda = radial_eigenvalue(3, 0.0, d->radius(), 6000);
        return r;
      }
      break;
    case Domain::Kind::Annulus:
      if (d->dim() == 3) {
        EigenResult r;
        r.lambda =
            radial_eigenvalue(3, d->inner_radius(), d->outer_radius(), 6000);
        return r;
      }
      break;
    default:
      break;
  }

  auto bb = d->bounding_box();
  double extent =
      std::max(bb[1][0] - bb[0][0], bb[1][1] - bb[0][1]);
  double hh = h > 0.0 ? h : extent / 400.0;
  return eigen_cutcell(*d, hh);
}

}  // namespace exitlab::pde
