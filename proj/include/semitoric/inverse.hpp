#pragma once

#include <optional>
#include <vector>

#include "semitoric/execution.hpp"
#include "semitoric/planar.hpp"
#include "semitoric/quantum.hpp"

namespace semitoric {

// Closed occupancy grid of spectrum points with traced cell-edge contours.
struct ImageRegion {
  double cell = 0.0;
  Vec2 origin = Vec2::Zero();  // lower-left corner of cell (0, 0)
  long nx = 0, ny = 0;
  std::vector<char> occupied;      // row-major, index iy * nx + ix
  std::vector<PointSet> boundaries;  // counter-clockwise outer loops, clockwise holes

  bool empty() const { return nx == 0 || ny == 0; }
  bool contains(const Vec2& p) const;
  // Every cell meeting the disk is occupied.
  bool disk_inside(const Vec2& center, double radius) const;
  PointSet cell_centers() const;
  long occupied_count() const;
};

ImageRegion estimate_image(const PointSet& points, double cell, int closing = 1);
inline ImageRegion estimate_image(const JointSpectrum& spec, double cell, int closing = 1) {
  return estimate_image(spec.points, cell, closing);
}

// Local Bohr-Sommerfeld fit: points ~ offset + B k with k integer and
// B = 2 pi hbar g0.
struct LatticeFit {
  Vec2 center = Vec2::Zero();
  double hbar = 0.0;
  Mat2 basis = Mat2::Zero();  // columns: reduced lattice vectors B
  Mat2 g0 = Mat2::Zero();     // B / (2 pi hbar)
  Vec2 offset = Vec2::Zero();
  double correction = 0.0;  // size of the sub-lattice offset, in value units
  double residual = 0.0;    // max |p - offset - B k| over matched points
  std::size_t count = 0;
};

LatticeFit fit_lattice(const PointSet& points, const Vec2& center, double radius, double hbar);

// One-dimensional ladder fit: points ~ offset + k step.
struct LadderFit {
  Vec2 offset = Vec2::Zero();
  Vec2 step = Vec2::Zero();
  double residual = 0.0;
  std::size_t count = 0;
};

LadderFit fit_ladder(const PointSet& points, const Vec2& center, double radius);

struct LoopSpec {
  Vec2 center = Vec2::Zero();
  double radius = 0.0;         // loop radius
  double window_radius = 0.0;  // radius of each fitting window
  int windows = 8;
};

struct MonodromyResult {
  LoopSpec loop;
  Eigen::Matrix2i matrix = Eigen::Matrix2i::Identity();  // final basis in the initial basis
  Eigen::Matrix2i normal_form = Eigen::Matrix2i::Identity();  // [[1, k], [0, 1]] when unipotent
  std::vector<double> margins;  // per transport step
  double rounding_error = 0.0;
  bool identity() const { return matrix == Eigen::Matrix2i::Identity(); }
};

MonodromyResult transport_monodromy(const PointSet& points, const LoopSpec& loop, double hbar);

// Conjugates a unipotent integer matrix to [[1, k], [0, 1]] in SL(2, Z).
Eigen::Matrix2i unipotent_normal_form(const Eigen::Matrix2i& M);

struct LocateOptions {
  int grid = 20;
  double loop_spacings = 6.0;    // loop radius in lattice spacings
  double window_spacings = 3.0;  // window radius in lattice spacings
  double region_cell_spacings = 2.0;
  Execution exec;
};

struct MarkedValue {
  Vec2 value = Vec2::Zero();
  Eigen::Matrix2i monodromy = Eigen::Matrix2i::Identity();
};

// Centres of loops with non-identity monodromy, clustered, refined, and
// confirmed at every hbar (agreement < 5 hbar_max).
std::vector<MarkedValue> locate_marked_values(const std::vector<JointSpectrum>& spectra,
                                              const LocateOptions& options = {});

// Median nearest-neighbour distance of a point set.
double typical_spacing(const PointSet& points);

}  // namespace semitoric
