#pragma once

#include <optional>
#include <vector>

#include <Eigen/Core>

#include "semitoric/execution.hpp"
#include "semitoric/fibration.hpp"
#include "semitoric/model.hpp"
#include "semitoric/planar.hpp"

namespace semitoric {

using Vec2i = Eigen::Vector2i;

// Rounded primitive direction of one polygon edge.
struct EdgeCertificate {
  Vec2i direction = Vec2i::Zero();
  double slope_error = 0.0;  // |slope - p/q| in the better-conditioned ratio
  bool rational = false;
};

struct MarkedPolygon {
  PointSet vertices;  // counter-clockwise; two vertices for one-dof models
  PointSet marked_points;
  std::vector<int> cut_signs;  // +1 upward cut, -1 downward
  std::vector<std::optional<int>> twisting_labels;  // storage only
  std::vector<EdgeCertificate> edges;  // edge i runs from vertex i to vertex i+1
  std::vector<bool> cut_vertex;        // vertex created by a cut
};

struct ActionOptions {
  double tol = 1e-10;  // absolute quadrature tolerance per segment
  int max_depth = 30;
  int spine_nodes = 24;  // spine nodes across the whole f1 range
  PeriodOptions periods;
  Execution exec;
};

// Focus-focus critical values, sorted by f1.
std::vector<Vec2> focus_focus_values(const ModelSystem& model, const Execution& exec = {});

// I2(c) with I2(anchor) = anchor[1], integrating (tau1 dc1 + tau2 dc2) / 2pi
// along a path that passes below upward cuts and above downward ones. tau1
// is lifted continuously and takes its representative in (-pi, pi] at the
// anchor. Throws PathThroughSingularValue when c or the anchor sits on a
// cut and BranchAmbiguity when the lift cannot be resolved.
double second_action(const ModelSystem& model, const Vec2& c, const Vec2& anchor,
                     const std::vector<int>& cut_signs, const ActionOptions& options = {});

// Integral of the action form around a closed polyline, tau1 lifted from
// its representative in (-pi, pi] at the first vertex.
double action_loop_integral(const ModelSystem& model, const PointSet& loop, const ActionOptions& options = {});

// Values of I2 on a regular grid of regular values.
struct ActionChart {
  Vec2 anchor = Vec2::Zero();
  std::vector<int> cut_signs;
  PointSet focus_values;
  Box box;
  int nx = 0, ny = 0;
  std::vector<double> i2;    // row-major, NaN at excluded nodes
  std::vector<double> tau1;  // lifted tau1 at each node
  // Largest mismatch between I2 differences and direct edge integrals over
  // grid edges that avoid the cuts.
  double closure_defect = 0.0;
  int checked_edges = 0;

  Vec2 node(int ix, int iy) const;
  bool valid(int ix, int iy) const;
  double value(int ix, int iy) const { return i2[static_cast<std::size_t>(iy * nx + ix)]; }
};

ActionChart action_chart(const ModelSystem& model, const std::vector<int>& cut_signs, int resolution,
                         const ActionOptions& options = {});

struct PolygonOptions {
  double line_tol = 1e-6;  // relative to the polygon diameter
  int max_denominator = 64;
  double slope_tol = 1e-6;
  ActionOptions action;
};

// Marked polygon in the chart (c1, I2). Empty cut_signs selects upward cuts.
MarkedPolygon build_polygon(const ModelSystem& model, const std::vector<int>& cut_signs = {},
                            int resolution = 48, const PolygonOptions& options = {});

struct DelzantCertificate {
  bool pass = false;
  std::vector<int> violating;  // vertex indices with |det| != 1
  std::vector<Vec2i> directions;
  std::vector<int> determinants;  // per vertex, 0 at skipped cut vertices
};

// Throws NonRationalEdge when an edge does not round to an integer
// direction within 1e-4.
DelzantCertificate delzant_check(const MarkedPolygon& poly);

// Primitive integer direction of d with entries bounded by max_entry, or
// nothing when no candidate is within tol in slope.
std::optional<EdgeCertificate> rational_direction(const Vec2& d, int max_entry, double tol);

// Affine image (x, y) -> A (x, y) + t of every vertex and marked point.
MarkedPolygon transform(const MarkedPolygon& poly, const Eigen::Matrix2d& A, const Vec2& t);

// Piecewise shear that adds power * (x - x0) to y for x >= x0.
MarkedPolygon cut_shear(const MarkedPolygon& poly, double x0, int power);

bool polygon_equivalence(const MarkedPolygon& P, const MarkedPolygon& Q, double tol = 1e-4);

}  // namespace semitoric
