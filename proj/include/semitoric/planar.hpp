#pragma once

#include <vector>

#include "semitoric/execution.hpp"
#include "semitoric/phase_space.hpp"

namespace semitoric {

using PointSet = std::vector<Vec2>;

// Counter-clockwise hull without collinear points (monotone chain).
PointSet convex_hull(PointSet pts);

// Uniform bucket grid for nearest-neighbour and disk queries in the plane.
class PointIndex {
 public:
  explicit PointIndex(const PointSet& pts, double cell = 0.0);

  // Index of the nearest point; -1 for an empty set.
  long nearest(const Vec2& q) const;
  std::vector<long> within(const Vec2& center, double radius) const;
  const PointSet& points() const { return pts_; }

 private:
  long cell_of(double v, double lo, long n) const;
  const PointSet& pts_;
  double cell_ = 1.0;
  Vec2 lo_ = Vec2::Zero();
  long nx_ = 1, ny_ = 1;
  std::vector<long> start_, items_;
};

// sup over a in A of the distance from a to B.
double directed_hausdorff(const PointSet& A, const PointSet& B, const Execution& exec = {});
double hausdorff(const PointSet& A, const PointSet& B, const Execution& exec = {});
// Brute-force serial reference, O(|A| |B|).
double hausdorff_reference(const PointSet& A, const PointSet& B);

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b);

// Points along a polyline, no two consecutive farther apart than spacing.
PointSet densify(const PointSet& polyline, bool closed, double spacing);

bool point_in_polygon(const Vec2& p, const PointSet& polygon);

// Distance from p to a closed polygon region (0 inside). Polygons with two
// vertices are treated as segments.
double distance_to_region(const Vec2& p, const PointSet& polygon);

// Hausdorff distance between a point set and a polygon region. The region
// side is discretized by its boundary and an interior grid at `spacing`.
double hausdorff_to_region(const PointSet& pts, const PointSet& polygon, double spacing, const Execution& exec = {});

}  // namespace semitoric
