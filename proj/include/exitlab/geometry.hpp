#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace exitlab::geometry {

// Point in R^n, n = 2 or 3. Unused coordinates stay zero so 2D points can be
// handled by 3D code paths without branching.
struct Point {
  std::array<double, 3> v{0.0, 0.0, 0.0};
  int n = 2;

  Point() = default;
  Point(double x, double y) : v{x, y, 0.0}, n(2) {}
  Point(double x, double y, double z) : v{x, y, z}, n(3) {}

  double operator[](int i) const { return v[static_cast<size_t>(i)]; }
  double& operator[](int i) { return v[static_cast<size_t>(i)]; }

  double norm2() const { return v[0] * v[0] + v[1] * v[1] + v[2] * v[2]; }
  double norm() const;
  bool finite() const;

  Point operator+(const Point& o) const;
  Point operator-(const Point& o) const;
  Point operator*(double a) const;
};

double dot(const Point& a, const Point& b);
double dist(const Point& a, const Point& b);

// Compact subsets of R^n used as hitting targets and condenser plates.
// Point components are polar in n >= 2: path samplers never see them, and
// capacity treats them as mass-zero.
class CompactSet {
 public:
  enum class Kind { ClosedBall, Segment, SinglePoint, Union };

  // Degenerate default (a point at the origin); build real sets with the
  // factories below.
  CompactSet() = default;

  static CompactSet closed_ball(const Point& center, double radius);
  static CompactSet segment(const Point& a, const Point& b);
  static CompactSet single_point(const Point& p);
  static CompactSet finite_union(std::vector<CompactSet> parts);

  Kind kind() const { return kind_; }
  int dim() const { return dim_; }

  bool contains(const Point& x) const;
  // Distance from x to the set (0 on and inside it).
  double dist_to(const Point& x) const;
  // Distance from x to the set ignoring SinglePoint components; +inf if the
  // set consists of points only.
  double dist_nonpolar(const Point& x) const;
  // Closest point of the set to x, ignoring SinglePoint components.
  Point closest_nonpolar(const Point& x) const;

  // True iff every component is a single point (so the whole set is polar
  // for Brownian motion in n >= 2).
  bool all_points() const;
  bool has_interior() const;  // true iff some ClosedBall component

  double max_norm() const;  // sup |y| over the set
  std::array<Point, 2> bounding_box() const;

  // Accessors for the leaf payloads; only valid for the matching kind.
  const Point& center() const { return a_; }
  double radius() const { return r_; }
  const Point& seg_a() const { return a_; }
  const Point& seg_b() const { return b_; }
  const Point& location() const { return a_; }
  const std::vector<CompactSet>& parts() const { return parts_; }

  // Flattened leaf list (unions expanded).
  void leaves(std::vector<const CompactSet*>& out) const;

 private:
  Kind kind_ = Kind::SinglePoint;
  int dim_ = 2;
  Point a_, b_;
  double r_ = 0.0;
  std::vector<CompactSet> parts_;
};

// Open connected domain in R^n. Distance queries report distance to the full
// topological boundary; sampler-facing queries ignore polar pieces (puncture
// points, point components of a complemented compact) since paths never hit
// them.
class Domain {
 public:
  enum class Kind {
    Ball,
    HalfSpace,
    Strip,
    Sector,
    Annulus,
    ComplementOfCompact,
    Punctured,
    GridMask,
  };

  static Domain ball(const Point& center, double radius);
  // {x : dot(normal, x) < offset}; normal need not be unit on input.
  static Domain half_space(const Point& normal, double offset);
  // {x in R^2 : |x_2| < halfwidth}
  static Domain strip(double halfwidth);
  // Planar wedge of opening `angle`, bisected by the positive x-axis, with
  // vertex at (-pi/(2*angle), 0) so that the origin lies inside and the
  // conformal radius seen from the origin is normalized.
  static Domain sector(double angle);
  static Domain annulus(double inner, double outer, int dim);
  static Domain complement_of(CompactSet k);
  static Domain punctured(Domain base, std::vector<Point> punctures);
  // Cell bitmap: cell (i,j) has center origin + ((i+0.5)h, (j+0.5)h),
  // mask[j*nx+i] != 0 means inside. The outermost ring of cells must be
  // outside so boundary distances stay within the stored extent.
  static Domain grid_mask(double h, int nx, int ny, const Point& origin,
                          std::vector<uint8_t> mask);

  Kind kind() const { return kind_; }
  int dim() const { return dim_; }

  struct Query {
    bool inside;
    double dist;  // distance to the full boundary (punctures included)
  };
  Query query(const Point& x) const;
  bool inside(const Point& x) const { return query(x).inside; }

  // Distance from the origin to the boundary and to its regular part.
  // Point-type pieces (punctures, point components) are the only irregular
  // boundary pieces produced by this catalog.
  struct BoundaryDistances {
    double d_boundary;
    double d_regular;
  };
  BoundaryDistances origin_boundary_distances() const;

  // Sampler-facing geometry. Polar boundary pieces are invisible: a path
  // started in a punctured domain exits through the base boundary.
  bool sampling_inside(const Point& x) const;
  double sampling_distance(const Point& x) const;
  // True if sampling_distance is exact (GridMask distances are O(h) only).
  bool has_exact_distance() const;

  // Nearest non-polar boundary piece: foot point on the boundary and the
  // distance to it. Used for bridge crossing tests and exit projection.
  struct BoundaryProbe {
    double dist;
    Point foot;
  };
  BoundaryProbe probe(const Point& x) const;

  // Dilation x -> a*x about the origin. Supported for the variants whose
  // class is closed under dilation (not Sector/GridMask).
  Domain scaled(double a) const;

  bool is_bounded() const;
  // sup |x| over the closure, for bounded domains.
  double bounding_radius() const;
  // Axis-aligned box containing the closure, for bounded domains.
  std::array<Point, 2> bounding_box() const;

  // Accessors (valid for the matching kind).
  const Point& center() const { return c_; }
  double radius() const { return r1_; }
  const Point& normal() const { return c_; }
  double offset() const { return r1_; }
  double halfwidth() const { return r1_; }
  double angle() const { return r1_; }
  const Point& vertex() const { return c_; }
  double inner_radius() const { return r1_; }
  double outer_radius() const { return r2_; }
  const CompactSet& compact() const { return compact_; }
  const Domain& base() const { return *base_; }
  const std::vector<Point>& punctures() const { return punctures_; }

  double mask_h() const { return r1_; }
  int mask_nx() const { return nx_; }
  int mask_ny() const { return ny_; }
  const Point& mask_origin() const { return c_; }
  const std::vector<uint8_t>& mask() const { return mask_; }

  std::string describe() const;

 private:
  Domain() = default;
  void check_dim(const Point& x) const;

  Kind kind_ = Kind::Ball;
  int dim_ = 2;
  Point c_;                  // center / normal / vertex / mask origin
  double r1_ = 0.0;          // radius / offset / halfwidth / angle / inner / h
  double r2_ = 0.0;          // outer radius
  CompactSet compact_;
  std::shared_ptr<const Domain> base_;
  std::vector<Point> punctures_;
  int nx_ = 0, ny_ = 0;
  std::vector<uint8_t> mask_;
  std::vector<Point> mask_outside_centers_;  // cached for distance queries
};

// Distance from x to the sphere |y - c| = R (as a set).
double dist_to_sphere(const Point& x, const Point& c, double R);
// Distance from x to the segment [a, b] and the closest segment point.
double dist_to_segment(const Point& x, const Point& a, const Point& b,
                       Point* closest = nullptr);

}  // namespace exitlab::geometry
