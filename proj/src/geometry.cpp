#include "exitlab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace exitlab::geometry {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}  // namespace

double Point::norm() const { return std::sqrt(norm2()); }

bool Point::finite() const {
  return std::isfinite(v[0]) && std::isfinite(v[1]) && std::isfinite(v[2]);
}

Point Point::operator+(const Point& o) const {
  Point p = *this;
  for (int i = 0; i < 3; ++i) p.v[i] += o.v[i];
  return p;
}

Point Point::operator-(const Point& o) const {
  Point p = *this;
  for (int i = 0; i < 3; ++i) p.v[i] -= o.v[i];
  return p;
}

Point Point::operator*(double a) const {
  Point p = *this;
  for (int i = 0; i < 3; ++i) p.v[i] *= a;
  return p;
}

double dot(const Point& a, const Point& b) {
  return a.v[0] * b.v[0] + a.v[1] * b.v[1] + a.v[2] * b.v[2];
}

double dist(const Point& a, const Point& b) { return (a - b).norm(); }

double dist_to_sphere(const Point& x, const Point& c, double R) {
  return std::fabs(dist(x, c) - R);
}

double dist_to_segment(const Point& x, const Point& a, const Point& b,
                       Point* closest) {
  Point w = b - a;
  double len2 = w.norm2();
  double t = len2 > 0.0 ? dot(x - a, w) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  Point p = a + w * t;
  if (closest) *closest = p;
  return dist(x, p);
}

// ---------------------------------------------------------------- CompactSet

CompactSet CompactSet::closed_ball(const Point& center, double radius) {
  if (!(radius > 0.0) || !center.finite())
    throw std::invalid_argument("closed_ball: need finite center, radius > 0");
  CompactSet k;
  k.kind_ = Kind::ClosedBall;
  k.dim_ = center.n;
  k.a_ = center;
  k.r_ = radius;
  return k;
}

CompactSet CompactSet::segment(const Point& a, const Point& b) {
  if (!a.finite() || !b.finite() || a.n != b.n)
    throw std::invalid_argument("segment: endpoints must be finite, same dim");
  if (dist(a, b) == 0.0)
    throw std::invalid_argument("segment: endpoints must be distinct");
  CompactSet k;
  k.kind_ = Kind::Segment;
  k.dim_ = a.n;
  k.a_ = a;
  k.b_ = b;
  return k;
}

CompactSet CompactSet::single_point(const Point& p) {
  if (!p.finite()) throw std::invalid_argument("single_point: need finite point");
  CompactSet k;
  k.kind_ = Kind::SinglePoint;
  k.dim_ = p.n;
  k.a_ = p;
  return k;
}

CompactSet CompactSet::finite_union(std::vector<CompactSet> parts) {
  if (parts.empty()) throw std::invalid_argument("finite_union: empty");
  for (const auto& p : parts)
    if (p.dim() != parts.front().dim())
      throw std::invalid_argument("finite_union: mixed dimensions");
  CompactSet k;
  k.kind_ = Kind::Union;
  k.dim_ = parts.front().dim();
  k.parts_ = std::move(parts);
  return k;
}

bool CompactSet::contains(const Point& x) const {
  switch (kind_) {
    case Kind::ClosedBall:
      return dist(x, a_) <= r_;
    case Kind::Segment:
      return dist_to_segment(x, a_, b_) <= 1e-12 * std::max(1.0, max_norm());
    case Kind::SinglePoint:
      return x.v == a_.v;
    case Kind::Union:
      for (const auto& p : parts_)
        if (p.contains(x)) return true;
      return false;
  }
  return false;
}

double CompactSet::dist_to(const Point& x) const {
  switch (kind_) {
    case Kind::ClosedBall:
      return std::max(0.0, dist(x, a_) - r_);
    case Kind::Segment:
      return dist_to_segment(x, a_, b_);
    case Kind::SinglePoint:
      return dist(x, a_);
    case Kind::Union: {
      double d = kInf;
      for (const auto& p : parts_) d = std::min(d, p.dist_to(x));
      return d;
    }
  }
  return kInf;
}

double CompactSet::dist_nonpolar(const Point& x) const {
  switch (kind_) {
    case Kind::SinglePoint:
      return kInf;
    case Kind::Union: {
      double d = kInf;
      for (const auto& p : parts_) d = std::min(d, p.dist_nonpolar(x));
      return d;
    }
    default:
      return dist_to(x);
  }
}

Point CompactSet::closest_nonpolar(const Point& x) const {
  switch (kind_) {
    case Kind::ClosedBall: {
      Point d = x - a_;
      double r = d.norm();
      if (r == 0.0) {
        Point e;
        e.n = dim_;
        e[0] = 1.0;
        d = e;
        r = 1.0;
      }
      return a_ + d * (r_ / r);
    }
    case Kind::Segment: {
      Point p;
      dist_to_segment(x, a_, b_, &p);
      return p;
    }
    case Kind::SinglePoint:
      throw std::logic_error("closest_nonpolar: point component");
    case Kind::Union: {
      double best = kInf;
      Point foot;
      bool found = false;
      for (const auto& p : parts_) {
        double d = p.dist_nonpolar(x);
        if (d < best) {
          best = d;
          foot = p.closest_nonpolar(x);
          found = true;
        }
      }
      if (!found) throw std::logic_error("closest_nonpolar: all components polar");
      return foot;
    }
  }
  throw std::logic_error("closest_nonpolar: bad kind");
}

bool CompactSet::all_points() const {
  switch (kind_) {
    case Kind::SinglePoint:
      return true;
    case Kind::Union:
      return std::all_of(parts_.begin(), parts_.end(),
                         [](const CompactSet& p) { return p.all_points(); });
    default:
      return false;
  }
}

bool CompactSet::has_interior() const {
  switch (kind_) {
    case Kind::ClosedBall:
      return true;
    case Kind::Union:
      return std::any_of(parts_.begin(), parts_.end(),
                         [](const CompactSet& p) { return p.has_interior(); });
    default:
      return false;
  }
}

double CompactSet::max_norm() const {
  switch (kind_) {
    case Kind::ClosedBall:
      return a_.norm() + r_;
    case Kind::Segment:
      return std::max(a_.norm(), b_.norm());
    case Kind::SinglePoint:
      return a_.norm();
    case Kind::Union: {
      double m = 0.0;
      for (const auto& p : parts_) m = std::max(m, p.max_norm());
      return m;
    }
  }
  return 0.0;
}

std::array<Point, 2> CompactSet::bounding_box() const {
  Point lo, hi;
  lo.n = hi.n = dim_;
  switch (kind_) {
    case Kind::ClosedBall:
      for (int i = 0; i < 3; ++i) {
        lo[i] = a_[i] - (i < dim_ ? r_ : 0.0);
        hi[i] = a_[i] + (i < dim_ ? r_ : 0.0);
      }
      break;
    case Kind::Segment:
      for (int i = 0; i < 3; ++i) {
        lo[i] = std::min(a_[i], b_[i]);
        hi[i] = std::max(a_[i], b_[i]);
      }
      break;
    case Kind::SinglePoint:
      lo = hi = a_;
      break;
    case Kind::Union: {
      auto bb = parts_.front().bounding_box();
      lo = bb[0];
      hi = bb[1];
      for (size_t i = 1; i < parts_.size(); ++i) {
        auto b = parts_[i].bounding_box();
        for (int c = 0; c < 3; ++c) {
          lo[c] = std::min(lo[c], b[0][c]);
          hi[c] = std::max(hi[c], b[1][c]);
        }
      }
      break;
    }
  }
  return {lo, hi};
}

void CompactSet::leaves(std::vector<const CompactSet*>& out) const {
  if (kind_ == Kind::Union) {
    for (const auto& p : parts_) p.leaves(out);
  } else {
    out.push_back(this);
  }
}

// -------------------------------------------------------------------- Domain

Domain Domain::ball(const Point& center, double radius) {
  if (!(radius > 0.0) || !center.finite())
    throw std::invalid_argument("ball: need finite center, radius > 0");
  Domain d;
  d.kind_ = Kind::Ball;
  d.dim_ = center.n;
  d.c_ = center;
  d.r1_ = radius;
  return d;
}

Domain Domain::half_space(const Point& normal, double offset) {
  double len = normal.norm();
  if (!(len > 0.0) || !normal.finite() || !std::isfinite(offset))
    throw std::invalid_argument("half_space: need nonzero finite normal");
  Domain d;
  d.kind_ = Kind::HalfSpace;
  d.dim_ = normal.n;
  d.c_ = normal * (1.0 / len);  // stored unit, offset rescaled to match
  d.r1_ = offset / len;
  return d;
}

Domain Domain::strip(double halfwidth) {
  if (!(halfwidth > 0.0)) throw std::invalid_argument("strip: halfwidth > 0");
  Domain d;
  d.kind_ = Kind::Strip;
  d.dim_ = 2;
  d.r1_ = halfwidth;
  return d;
}

Domain Domain::sector(double angle) {
  if (!(angle > 0.0) || !(angle < 2.0 * M_PI))
    throw std::invalid_argument("sector: angle in (0, 2*pi)");
  Domain d;
  d.kind_ = Kind::Sector;
  d.dim_ = 2;
  d.r1_ = angle;
  d.c_ = Point(-M_PI / (2.0 * angle), 0.0);
  return d;
}

Domain Domain::annulus(double inner, double outer, int dim) {
  if (!(inner > 0.0) || !(outer > inner) || (dim != 2 && dim != 3))
    throw std::invalid_argument("annulus: need 0 < inner < outer, dim 2 or 3");
  Domain d;
  d.kind_ = Kind::Annulus;
  d.dim_ = dim;
  d.r1_ = inner;
  d.r2_ = outer;
  return d;
}

Domain Domain::complement_of(CompactSet k) {
  Domain d;
  d.kind_ = Kind::ComplementOfCompact;
  d.dim_ = k.dim();
  d.compact_ = std::move(k);
  return d;
}

Domain Domain::punctured(Domain base, std::vector<Point> punctures) {
  if (punctures.empty())
    throw std::invalid_argument("punctured: need at least one puncture");
  if (base.kind_ == Kind::Punctured)
    throw std::invalid_argument("punctured: flatten nested punctures first");
  for (const auto& p : punctures) {
    if (p.n != base.dim() || !p.finite())
      throw std::invalid_argument("punctured: puncture dim mismatch");
    if (!base.inside(p))
      throw std::invalid_argument("punctured: puncture must lie inside base");
  }
  Domain d;
  d.kind_ = Kind::Punctured;
  d.dim_ = base.dim();
  d.base_ = std::make_shared<Domain>(std::move(base));
  d.punctures_ = std::move(punctures);
  return d;
}

Domain Domain::grid_mask(double h, int nx, int ny, const Point& origin,
                         std::vector<uint8_t> mask) {
  if (!(h > 0.0) || nx < 3 || ny < 3 ||
      mask.size() != static_cast<size_t>(nx) * static_cast<size_t>(ny))
    throw std::invalid_argument("grid_mask: bad extent or mask size");
  bool any_inside = false;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      bool in = mask[static_cast<size_t>(j) * nx + i] != 0;
      any_inside |= in;
      if (in && (i == 0 || j == 0 || i == nx - 1 || j == ny - 1))
        throw std::invalid_argument("grid_mask: border cells must be outside");
    }
  if (!any_inside) throw std::invalid_argument("grid_mask: empty interior");
  Domain d;
  d.kind_ = Kind::GridMask;
  d.dim_ = 2;
  d.c_ = origin;
  d.r1_ = h;
  d.nx_ = nx;
  d.ny_ = ny;
  d.mask_ = std::move(mask);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      if (d.mask_[static_cast<size_t>(j) * nx + i] == 0)
        d.mask_outside_centers_.push_back(
            Point(origin[0] + (i + 0.5) * h, origin[1] + (j + 0.5) * h));
  return d;
}

void Domain::check_dim(const Point& x) const {
  if (x.n != dim_) throw std::invalid_argument("point/domain dimension mismatch");
}

Domain::Query Domain::query(const Point& x) const {
  check_dim(x);
  switch (kind_) {
    case Kind::Ball: {
      double r = dist(x, c_);
      return {r < r1_, std::fabs(r1_ - r)};
    }
    case Kind::HalfSpace: {
      double s = r1_ - dot(c_, x);
      return {s > 0.0, std::fabs(s)};
    }
    case Kind::Strip: {
      double a = std::fabs(x[1]);
      return {a < r1_, std::fabs(r1_ - a)};
    }
    case Kind::Sector: {
      Point w = x - c_;
      double r = w.norm();
      if (r == 0.0) return {false, 0.0};
      double ang = std::atan2(w[1], w[0]);
      bool in = std::fabs(ang) < r1_ / 2.0;
      double half = r1_ / 2.0;
      Point u_hi(std::cos(half), std::sin(half));
      Point u_lo(std::cos(-half), std::sin(-half));
      auto ray_dist = [&](const Point& u) {
        double t = std::max(0.0, dot(w, u));
        return (w - u * t).norm();
      };
      return {in, std::min(ray_dist(u_hi), ray_dist(u_lo))};
    }
    case Kind::Annulus: {
      double r = x.norm();
      bool in = r > r1_ && r < r2_;
      return {in, std::min(std::fabs(r - r1_), std::fabs(r2_ - r))};
    }
    case Kind::ComplementOfCompact: {
      bool in = !compact_.contains(x);
      return {in, compact_.dist_to(x)};
    }
    case Kind::Punctured: {
      auto q = base_->query(x);
      double d = q.dist;
      bool in = q.inside;
      for (const auto& p : punctures_) {
        d = std::min(d, dist(x, p));
        if (x.v == p.v) in = false;
      }
      return {in, d};
    }
    case Kind::GridMask: {
      double fx = (x[0] - c_[0]) / r1_;
      double fy = (x[1] - c_[1]) / r1_;
      int i = static_cast<int>(std::floor(fx));
      int j = static_cast<int>(std::floor(fy));
      bool in = i >= 0 && i < nx_ && j >= 0 && j < ny_ &&
                mask_[static_cast<size_t>(j) * nx_ + i] != 0;
      double d = kInf;
      for (const auto& p : mask_outside_centers_)
        d = std::min(d, dist(x, p));
      return {in, d};
    }
  }
  return {false, 0.0};
}

Domain::BoundaryDistances Domain::origin_boundary_distances() const {
  Point o;
  o.n = dim_;
  double d_full;
  double d_reg;
  switch (kind_) {
    case Kind::Punctured: {
      auto base = base_->origin_boundary_distances();
      d_full = base.d_boundary;
      d_reg = base.d_regular;
      for (const auto& p : punctures_) d_full = std::min(d_full, p.norm());
      break;
    }
    case Kind::ComplementOfCompact: {
      d_full = compact_.dist_to(o);
      d_reg = compact_.dist_nonpolar(o);
      break;
    }
    default:
      d_full = query(o).dist;
      d_reg = d_full;
      break;
  }
  return {d_full, d_reg};
}

bool Domain::sampling_inside(const Point& x) const {
  switch (kind_) {
    case Kind::Punctured:
      return base_->sampling_inside(x);
    case Kind::ComplementOfCompact:
      if (compact_.all_points()) return true;
      return compact_.dist_nonpolar(x) > 0.0;
    default:
      return inside(x);
  }
}

double Domain::sampling_distance(const Point& x) const {
  switch (kind_) {
    case Kind::Punctured:
      return base_->sampling_distance(x);
    case Kind::ComplementOfCompact:
      return compact_.dist_nonpolar(x);
    default:
      return query(x).dist;
  }
}

bool Domain::has_exact_distance() const {
  switch (kind_) {
    case Kind::GridMask:
      return false;
    case Kind::Punctured:
      return base_->has_exact_distance();
    default:
      return true;
  }
}

Domain::BoundaryProbe Domain::probe(const Point& x) const {
  check_dim(x);
  switch (kind_) {
    case Kind::Ball: {
      Point d = x - c_;
      double r = d.norm();
      if (r == 0.0) {
        Point e;
        e.n = dim_;
        e[0] = 1.0;
        d = e;
        r = 1.0;
      }
      Point foot = c_ + d * (r1_ / r);
      return {std::fabs(r1_ - dist(x, c_)), foot};
    }
    case Kind::HalfSpace: {
      double s = r1_ - dot(c_, x);
      return {std::fabs(s), x + c_ * s};
    }
    case Kind::Strip: {
      double d_hi = std::fabs(r1_ - x[1]);
      double d_lo = std::fabs(x[1] + r1_);
      Point foot = x;
      foot[1] = d_hi <= d_lo ? r1_ : -r1_;
      return {std::min(d_hi, d_lo), foot};
    }
    case Kind::Sector: {
      Point w = x - c_;
      double half = r1_ / 2.0;
      Point u_hi(std::cos(half), std::sin(half));
      Point u_lo(std::cos(-half), std::sin(-half));
      auto foot_on = [&](const Point& u) {
        double t = std::max(0.0, dot(w, u));
        return c_ + u * t;
      };
      Point f_hi = foot_on(u_hi), f_lo = foot_on(u_lo);
      double d_hi = dist(x, f_hi), d_lo = dist(x, f_lo);
      return d_hi <= d_lo ? BoundaryProbe{d_hi, f_hi} : BoundaryProbe{d_lo, f_lo};
    }
    case Kind::Annulus: {
      double r = x.norm();
      Point u = r > 0.0 ? x * (1.0 / r) : Point(1.0, 0.0);
      u.n = dim_;
      double d_in = std::fabs(r - r1_), d_out = std::fabs(r2_ - r);
      return d_in <= d_out ? BoundaryProbe{d_in, u * r1_}
                           : BoundaryProbe{d_out, u * r2_};
    }
    case Kind::ComplementOfCompact:
      return {compact_.dist_nonpolar(x), compact_.closest_nonpolar(x)};
    case Kind::Punctured:
      return base_->probe(x);
    case Kind::GridMask: {
      double best = kInf;
      Point foot;
      for (const auto& p : mask_outside_centers_) {
        double d = dist(x, p);
        if (d < best) {
          best = d;
          foot = p;
        }
      }
      return {best, foot};
    }
  }
  throw std::logic_error("probe: bad kind");
}

namespace {
CompactSet scale_compact(const CompactSet& k, double a) {
  switch (k.kind()) {
    case CompactSet::Kind::ClosedBall:
      return CompactSet::closed_ball(k.center() * a, k.radius() * a);
    case CompactSet::Kind::Segment:
      return CompactSet::segment(k.seg_a() * a, k.seg_b() * a);
    case CompactSet::Kind::SinglePoint:
      return CompactSet::single_point(k.location() * a);
    case CompactSet::Kind::Union: {
      std::vector<CompactSet> parts;
      parts.reserve(k.parts().size());
      for (const auto& p : k.parts()) parts.push_back(scale_compact(p, a));
      return CompactSet::finite_union(std::move(parts));
    }
  }
  throw std::logic_error("scale_compact: bad kind");
}
}  // namespace

Domain Domain::scaled(double a) const {
  if (!(a > 0.0)) throw std::invalid_argument("scaled: factor must be > 0");
  switch (kind_) {
    case Kind::Ball:
      return ball(c_ * a, r1_ * a);
    case Kind::HalfSpace:
      return half_space(c_, r1_ * a);
    case Kind::Strip:
      return strip(r1_ * a);
    case Kind::Annulus:
      return annulus(r1_ * a, r2_ * a, dim_);
    case Kind::ComplementOfCompact:
      return complement_of(scale_compact(compact_, a));
    case Kind::Punctured: {
      std::vector<Point> pts;
      pts.reserve(punctures_.size());
      for (const auto& p : punctures_) pts.push_back(p * a);
      return punctured(base_->scaled(a), std::move(pts));
    }
    case Kind::Sector:
    case Kind::GridMask:
      throw std::logic_error("scaled: variant not closed under dilation");
  }
  throw std::logic_error("scaled: bad kind");
}

bool Domain::is_bounded() const {
  switch (kind_) {
    case Kind::Ball:
    case Kind::Annulus:
    case Kind::GridMask:
      return true;
    case Kind::Punctured:
      return base_->is_bounded();
    default:
      return false;
  }
}

double Domain::bounding_radius() const {
  switch (kind_) {
    case Kind::Ball:
      return c_.norm() + r1_;
    case Kind::Annulus:
      return r2_;
    case Kind::GridMask: {
      double m = 0.0;
      for (int j = 0; j <= ny_; j += ny_)
        for (int i = 0; i <= nx_; i += nx_)
          m = std::max(m, Point(c_[0] + i * r1_, c_[1] + j * r1_).norm());
      return m;
    }
    case Kind::Punctured:
      return base_->bounding_radius();
    default:
      throw std::logic_error("bounding_radius: unbounded domain");
  }
}

std::array<Point, 2> Domain::bounding_box() const {
  Point lo, hi;
  lo.n = hi.n = dim_;
  switch (kind_) {
    case Kind::Ball:
      for (int i = 0; i < dim_; ++i) {
        lo[i] = c_[i] - r1_;
        hi[i] = c_[i] + r1_;
      }
      return {lo, hi};
    case Kind::Annulus:
      for (int i = 0; i < dim_; ++i) {
        lo[i] = -r2_;
        hi[i] = r2_;
      }
      return {lo, hi};
    case Kind::GridMask:
      lo = c_;
      hi = Point(c_[0] + nx_ * r1_, c_[1] + ny_ * r1_);
      return {lo, hi};
    case Kind::Punctured:
      return base_->bounding_box();
    default:
      throw std::logic_error("bounding_box: unbounded domain");
  }
}

std::string Domain::describe() const {
  std::ostringstream os;
  auto pt = [&](const Point& p) {
    os << "(" << p[0] << "," << p[1];
    if (dim_ == 3) os << "," << p[2];
    os << ")";
  };
  switch (kind_) {
    case Kind::Ball:
      os << "ball";
      pt(c_);
      os << "r" << r1_;
      break;
    case Kind::HalfSpace:
      os << "halfspace_d" << r1_;
      break;
    case Kind::Strip:
      os << "strip_w" << r1_;
      break;
    case Kind::Sector:
      os << "sector_a" << r1_;
      break;
    case Kind::Annulus:
      os << "annulus" << r1_ << "_" << r2_;
      break;
    case Kind::ComplementOfCompact:
      os << "complement" << dim_ << "d";
      break;
    case Kind::Punctured:
      os << "punctured_" << base_->describe();
      break;
    case Kind::GridMask:
      os << "mask" << nx_ << "x" << ny_ << "_h" << r1_;
      break;
  }
  return os.str();
}

}  // namespace exitlab::geometry
