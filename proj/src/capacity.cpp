#include "exitlab/capacity.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "exitlab/kernels.hpp"

namespace exitlab::capacity {

double DiscretizedMeasure::total() const {
  double s = 0.0;
  for (double w : weight) s += w;
  return s;
}

namespace {

// Boundary cells for the supported compact shapes. Segments use
// Chebyshev-clustered cells (the equilibrium density blows up like an
// inverse square root at the tips).
std::vector<BoundaryCell> cells_for(const CompactSet& k, int points) {
  std::vector<BoundaryCell> cells;
  switch (k.kind()) {
    case CompactSet::Kind::ClosedBall: {
      const Point& c = k.center();
      double r = k.radius();
      if (k.dim() == 2) {
        double ell = 2.0 * M_PI * r / points;
        for (int i = 0; i < points; ++i) {
          double a = 2.0 * M_PI * (i + 0.5) / points;
          cells.push_back(
              {Point(c[0] + r * std::cos(a), c[1] + r * std::sin(a)), ell});
        }
      } else {
        // Fibonacci sphere: near-uniform patches.
        double area = 4.0 * M_PI * r * r / points;
        double golden = M_PI * (3.0 - std::sqrt(5.0));
        for (int i = 0; i < points; ++i) {
          double z = 1.0 - (2.0 * i + 1.0) / points;
          double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
          double a = golden * i;
          cells.push_back({Point(c[0] + r * rho * std::cos(a),
                                 c[1] + r * rho * std::sin(a), c[2] + r * z),
                           area});
        }
      }
      break;
    }
    case CompactSet::Kind::Segment: {
      const Point& a = k.seg_a();
      const Point& b = k.seg_b();
      double L = geometry::dist(a, b);
      for (int i = 0; i < points; ++i) {
        double t0 = 0.5 * (1.0 - std::cos(M_PI * i / points));
        double t1 = 0.5 * (1.0 - std::cos(M_PI * (i + 1) / points));
        double tm = 0.5 * (t0 + t1);
        Point p = a + (b - a) * tm;
        cells.push_back({p, (t1 - t0) * L});
      }
      break;
    }
    case CompactSet::Kind::SinglePoint:
      break;  // polar: contributes no cells
    case CompactSet::Kind::Union: {
      // Split the budget by linear extent, at least 16 cells per piece.
      std::vector<const CompactSet*> leaves;
      k.leaves(leaves);
      double total_ext = 0.0;
      auto extent = [](const CompactSet* c) {
        switch (c->kind()) {
          case CompactSet::Kind::ClosedBall:
            return 2.0 * M_PI * c->radius();
          case CompactSet::Kind::Segment:
            return geometry::dist(c->seg_a(), c->seg_b());
          default:
            return 0.0;
        }
      };
      for (auto* leaf : leaves) total_ext += extent(leaf);
      for (auto* leaf : leaves) {
        if (extent(leaf) == 0.0) continue;
        int ni = std::max(16, static_cast<int>(std::lround(
                                  points * extent(leaf) / total_ext)));
        auto sub = cells_for(*leaf, ni);
        cells.insert(cells.end(), sub.begin(), sub.end());
      }
      break;
    }
  }
  return cells;
}

// Self-energy per unit mass^2 of one cell, n = 2: the cell's own capacity
// carries the log singularity, -log(cap) = -log(len/4).
double self_energy_2d(double len) { return -std::log(len / 4.0); }
// n = 3: round patch of equal area, capacity 2 rho / pi.
double self_energy_3d(double area) {
  double rho = std::sqrt(area / M_PI);
  return M_PI / (2.0 * rho);
}

// Minimize m^T A m over m >= 0, sum m = 1 (KKT solve, pruning negative
// weights). Returns the minimal energy.
double minimize_energy(const Eigen::MatrixXd& A, Eigen::VectorXd* out) {
  const int N = static_cast<int>(A.rows());
  std::vector<int> active(N);
  for (int i = 0; i < N; ++i) active[i] = i;

  Eigen::VectorXd m = Eigen::VectorXd::Zero(N);
  for (int round = 0; round < N; ++round) {
    const int K = static_cast<int>(active.size());
    Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(K + 1, K + 1);
    for (int i = 0; i < K; ++i) {
      for (int j = 0; j < K; ++j) kkt(i, j) = 2.0 * A(active[i], active[j]);
      kkt(i, K) = kkt(K, i) = 1.0;
    }
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(K + 1);
    rhs[K] = 1.0;
    Eigen::VectorXd sol = kkt.partialPivLu().solve(rhs);

    int worst = -1;
    double worst_val = -1e-12;
    for (int i = 0; i < K; ++i)
      if (sol[i] < worst_val) {
        worst_val = sol[i];
        worst = i;
      }
    if (worst < 0) {
      m.setZero();
      for (int i = 0; i < K; ++i) m[active[i]] = sol[i];
      break;
    }
    active.erase(active.begin() + worst);
    if (active.empty()) throw std::runtime_error("minimize_energy: emptied");
  }
  if (out) *out = m;
  return m.dot(A * m);
}

double energy_value(const CompactSet& k, int points) {
  auto cells = cells_for(k, points);
  if (cells.empty()) {
    // Purely polar set.
    return std::numeric_limits<double>::infinity();
  }
  const int N = static_cast<int>(cells.size());
  const int n = k.dim();
  if (n == 3) {
    // A segment piece in R^3 has vanishing capacity; the discrete energy
    // would diverge with refinement. Callers should test polarity first.
    std::vector<const CompactSet*> leaves;
    k.leaves(leaves);
    for (auto* leaf : leaves)
      if (leaf->kind() == CompactSet::Kind::Segment)
        throw std::invalid_argument(
            "energy_capacity: 3D segments are polar (capacity 0)");
  }
  Eigen::MatrixXd A(N, N);
  for (int i = 0; i < N; ++i) {
    for (int j = 0; j < i; ++j) {
      double d = geometry::dist(cells[i].x, cells[j].x);
      double v = n == 2 ? -std::log(d) : 1.0 / d;
      A(i, j) = A(j, i) = v;
    }
    A(i, i) = n == 2 ? self_energy_2d(cells[i].size)
                     : self_energy_3d(cells[i].size);
  }
  return minimize_energy(A, nullptr);
}

}  // namespace

CapacityReport energy_capacity(const CompactSet& k, int points) {
  if (points < 32) throw std::invalid_argument("energy_capacity: points >= 32");
  CapacityReport rep;
  rep.kind = k.dim() == 2 ? "logarithmic" : "newtonian";
  rep.points = points;

  auto to_cap = [&](double energy) {
    if (std::isinf(energy)) return 0.0;
    return k.dim() == 2 ? std::exp(-energy) : 1.0 / energy;
  };
  double f1 = to_cap(energy_value(k, points));
  double f2 = to_cap(energy_value(k, points / 2));
  double f4 = to_cap(energy_value(k, points / 4));
  rep.value = f1;
  // Empirical-order Richardson: smooth node layouts converge like 1/N,
  // Fibonacci sphere patches more like 1/sqrt(N).
  rep.refined = f1;
  double d1 = f1 - f2, d2 = f2 - f4;
  if (d1 != 0.0 && d2 != 0.0 && d1 * d2 > 0.0) {
    double p = std::log2(d2 / d1);
    p = std::clamp(p, 0.3, 3.0);
    rep.refined = f1 + d1 / (std::pow(2.0, p) - 1.0);
  }
  return rep;
}

namespace {

// 1D radial condenser for concentric spheres (n = 3): solve the Laplace
// problem between the radii and return the Dirichlet integral.
double radial_condenser_3d(double r, double R, int cells) {
  int M = cells;
  double h = (R - r) / M;
  // u = 1 at r, 0 at R; cell centers r + (i+1/2) h.
  std::vector<double> trans(M + 1);
  for (int i = 0; i <= M; ++i) {
    double rf = r + i * h;
    double d = (i == 0 || i == M) ? h / 2.0 : h;
    trans[i] = 4.0 * M_PI * rf * rf / d;
  }
  // Thomas solve of T u = b.
  std::vector<double> a(M), b(M), c(M), x(M);
  for (int i = 0; i < M; ++i) {
    a[i] = i > 0 ? -trans[i] : 0.0;
    c[i] = i < M - 1 ? -trans[i + 1] : 0.0;
    b[i] = trans[i] + trans[i + 1];
    x[i] = i == 0 ? trans[0] * 1.0 : 0.0;
  }
  for (int i = 1; i < M; ++i) {
    double w = a[i] / b[i - 1];
    b[i] -= w * c[i - 1];
    x[i] -= w * x[i - 1];
  }
  x[M - 1] /= b[M - 1];
  for (int i = M - 1; i-- > 0;) x[i] = (x[i] - c[i] * x[i + 1]) / b[i];
  double energy = trans[0] * (1.0 - x[0]) * (1.0 - x[0]);
  for (int i = 0; i + 1 < M; ++i)
    energy += trans[i + 1] * (x[i] - x[i + 1]) * (x[i] - x[i + 1]);
  energy += trans[M] * x[M - 1] * x[M - 1];
  return energy;
}

double condenser_2d(const Domain& dom, const CompactSet& k, double h) {
  auto bb = dom.bounding_box();
  double lox = bb[0][0] - 1.5 * h, loy = bb[0][1] - 1.5 * h;
  int nx = static_cast<int>(std::ceil((bb[1][0] - bb[0][0]) / h)) + 3;
  int ny = static_cast<int>(std::ceil((bb[1][1] - bb[0][1]) / h)) + 3;

  // Thin plates (segments) get a half-cell skin so lattice edges can cut
  // them; plates with interior use their exact extent.
  double skin = k.has_interior() ? 0.0 : 0.5 * h;
  auto in_plate = [&](const Point& p) { return k.dist_to(p) <= skin; };
  auto region = [&](const Point& p) { return dom.inside(p) && !in_plate(p); };

  auto center = [&](int i, int j) {
    return Point(lox + (i + 0.5) * h, loy + (j + 0.5) * h);
  };
  std::vector<int> index(static_cast<size_t>(nx) * ny, -1);
  std::vector<Point> nodes;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      Point p = center(i, j);
      if (region(p)) {
        index[static_cast<size_t>(j) * nx + i] = static_cast<int>(nodes.size());
        nodes.push_back(p);
      }
    }
  const int N = static_cast<int>(nodes.size());
  if (N < 16) throw std::invalid_argument("dirichlet_condenser: grid too coarse");

  auto cut = [&](const Point& from, int axis, double dir, Point* hit) {
    double lo = 0.0, hi = h;
    for (int it = 0; it < 60; ++it) {
      double mid = 0.5 * (lo + hi);
      Point p = from;
      p[axis] += dir * mid;
      if (region(p)) lo = mid;
      else hi = mid;
    }
    *hit = from;
    (*hit)[axis] += dir * 0.5 * (lo + hi);
    return std::max(0.5 * (lo + hi), 1e-6 * h);
  };

  Eigen::SparseMatrix<double> T(N, N);
  std::vector<Eigen::Triplet<double>> trip;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(N);
  struct CutFace {
    int node;
    double trans, g;
  };
  std::vector<CutFace> cuts;
  const int di[4] = {1, -1, 0, 0};
  const int dj[4] = {0, 0, 1, -1};
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      int me = index[static_cast<size_t>(j) * nx + i];
      if (me < 0) continue;
      Point p = center(i, j);
      double diag = 0.0;
      for (int d = 0; d < 4; ++d) {
        int ii = i + di[d], jj = j + dj[d];
        int nb = (ii >= 0 && ii < nx && jj >= 0 && jj < ny)
                     ? index[static_cast<size_t>(jj) * nx + ii]
                     : -1;
        if (nb >= 0) {
          trip.emplace_back(me, nb, -1.0);
          diag += 1.0;
        } else {
          Point hit;
          int axis = d < 2 ? 0 : 1;
          double dir = (d == 0 || d == 2) ? 1.0 : -1.0;
          double s = cut(p, axis, dir, &hit);
          double tf = h / s;
          double g = in_plate(hit) || k.dist_to(hit) <= skin + 1e-9 ? 1.0 : 0.0;
          // Ambiguity safety: a cut point far from the plate is outer wall.
          if (k.dist_to(hit) > 0.75 * h) g = 0.0;
          diag += tf;
          rhs[me] += tf * g;
          cuts.push_back({me, tf, g});
        }
      }
      trip.emplace_back(me, me, diag);
    }
  T.setFromTriplets(trip.begin(), trip.end());
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver;
  solver.compute(T);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("dirichlet_condenser: factorization failed");
  Eigen::VectorXd u = solver.solve(rhs);

  // Energy = sum over faces of T_f (du)^2; interior faces appear twice in
  // the triplet list (once per side), so take them at half weight.
  double energy = 0.0;
  for (int kf = 0; kf < T.outerSize(); ++kf)
    for (Eigen::SparseMatrix<double>::InnerIterator it(T, kf); it; ++it) {
      if (it.row() != it.col() && it.value() < 0.0) {
        double du = u[it.row()] - u[it.col()];
        energy += 0.5 * (-it.value()) * du * du;
      }
    }
  for (const auto& cf : cuts) {
    double du = u[cf.node] - cf.g;
    energy += cf.trans * du * du;
  }
  return energy;
}

}  // namespace

CapacityReport dirichlet_condenser(const Domain& dom, const CompactSet& k,
                                   double h) {
  if (k.dim() != dom.dim())
    throw std::invalid_argument("dirichlet_condenser: dim mismatch");
  if (!dom.is_bounded())
    throw std::invalid_argument("dirichlet_condenser: outer domain must be bounded");

  CapacityReport rep;
  rep.kind = "dirichlet";

  if (dom.dim() == 3) {
    // Concentric spheres reduce to the radial problem; anything else in 3D
    // would need a volumetric grid.
    if (dom.kind() != Domain::Kind::Ball ||
        k.kind() != CompactSet::Kind::ClosedBall ||
        geometry::dist(dom.center(), k.center()) > 1e-12)
      throw std::invalid_argument(
          "dirichlet_condenser: 3D supports concentric balls only");
    rep.points = 4000;
    rep.value = radial_condenser_3d(k.radius(), dom.radius(), 4000);
    rep.refined = rep.value;
    return rep;
  }

  auto bb = dom.bounding_box();
  double extent = std::max(bb[1][0] - bb[0][0], bb[1][1] - bb[0][1]);
  double hh = h > 0.0 ? h : extent / 400.0;
  rep.h = hh;
  rep.value = condenser_2d(dom, k, hh);
  double coarse = condenser_2d(dom, k, 2.0 * hh);
  rep.refined = rep.value + (rep.value - coarse);
  rep.points = static_cast<int>(std::lround(extent / hh));
  return rep;
}

DiscretizedMeasure equilibrium_on_cells(const Domain& ball,
                                        const std::vector<BoundaryCell>& cells) {
  if (ball.kind() != Domain::Kind::Ball)
    throw std::invalid_argument("equilibrium_measure: domain must be a ball");
  const int n = ball.dim();
  const int N = static_cast<int>(cells.size());
  if (N == 0) throw std::invalid_argument("equilibrium_measure: no cells");
  for (const auto& c : cells)
    if (!ball.inside(c.x))
      throw std::invalid_argument("equilibrium_measure: cell outside domain");

  const double R = ball.radius();
  Eigen::MatrixXd G(N, N);
  for (int i = 0; i < N; ++i) {
    for (int j = 0; j < N; ++j) {
      if (i == j) continue;
      G(i, j) = kernels::green_closed_form(ball, cells[i].x, cells[j].x);
    }
    // Diagonal: average the singular part over the cell, keep the smooth
    // image part at the midpoint.
    Point rel = cells[i].x - ball.center();
    if (n == 2) {
      double image = std::log((R * R - rel.norm2()) / R);
      G(i, i) = (1.0 - std::log(cells[i].size / 2.0) + image) / M_PI;
    } else {
      double rho = std::sqrt(cells[i].size / M_PI);
      double bn = rel.norm();
      double image;
      if (bn == 0.0) {
        image = -1.0 / R;
      } else {
        Point bstar = rel * (R * R / (bn * bn));
        image = -R / (bn * geometry::dist(rel, bstar));
      }
      G(i, i) = (2.0 / rho + image) / (2.0 * M_PI);
    }
  }
  Eigen::VectorXd one = Eigen::VectorXd::Ones(N);
  Eigen::VectorXd mu = G.partialPivLu().solve(one);

  DiscretizedMeasure m;
  m.support.reserve(static_cast<size_t>(N));
  m.weight.reserve(static_cast<size_t>(N));
  for (int i = 0; i < N; ++i) {
    m.support.push_back(cells[i].x);
    m.weight.push_back(mu[i]);
  }
  return m;
}

DiscretizedMeasure equilibrium_measure(const Domain& ball, const CompactSet& k,
                                       int points) {
  if (k.dim() != ball.dim())
    throw std::invalid_argument("equilibrium_measure: dim mismatch");
  if (polarity_check(k) == Polarity::polar)
    throw std::invalid_argument("equilibrium_measure: polar target");
  if (k.dim() == 3) {
    std::vector<const CompactSet*> leaves;
    k.leaves(leaves);
    for (auto* leaf : leaves)
      if (leaf->kind() == CompactSet::Kind::Segment)
        throw std::invalid_argument(
            "equilibrium_measure: 3D segments are polar");
  }
  return equilibrium_on_cells(ball, cells_for(k, points));
}

Polarity polarity_check(const CompactSet& k) {
  switch (k.kind()) {
    case CompactSet::Kind::SinglePoint:
      return Polarity::polar;
    case CompactSet::Kind::Segment:
      return k.dim() == 3 ? Polarity::polar : Polarity::nonpolar;
    case CompactSet::Kind::ClosedBall:
      return Polarity::nonpolar;
    case CompactSet::Kind::Union: {
      for (const auto& p : k.parts())
        if (polarity_check(p) == Polarity::nonpolar) return Polarity::nonpolar;
      return Polarity::polar;
    }
  }
  return Polarity::nonpolar;
}

}  // namespace exitlab::capacity
