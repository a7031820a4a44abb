#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "semitoric/execution.hpp"
#include "semitoric/model.hpp"

namespace semitoric {

// Period lattice of a regular fiber, generated by (2pi, 0) and
// (tau1, tau2) in flow-time coordinates (periodic component, other one).
struct PeriodLattice {
  Vec2 c = Vec2::Zero();
  double tau1 = 0.0;      // in [0, 2pi)
  double tau2 = 0.0;      // > 0
  double residual = 0.0;  // closure error at the return
  std::size_t steps = 0;
};

struct FiberOptions {
  int candidates = 256;  // Halton samples ranked by |F - c|
  int attempts = 8;
  std::uint64_t seed = 0;
  double tol = 1e-12;
  int max_iterations = 100;
};

// Point A with F(A) = c. Throws SingularValue at critical values and
// NoConvergence when no candidate reaches the level set.
PhasePoint solve_fiber_point(const ModelSystem& model, const Vec2& c,
                             const std::optional<PhasePoint>& seed = std::nullopt,
                             const FiberOptions& options = {});

struct PeriodOptions {
  double tol = 1e-10;
  double max_step = 0.2;
  double horizon = 0.0;  // 0 selects 2pi (50 + 5 |log r|)
  FiberOptions fiber;
};

PeriodLattice period_lattice(const ModelSystem& model, const Vec2& c, const PeriodOptions& options = {});

// Same computation from a given base point of the fiber.
PeriodLattice period_lattice_from(const ModelSystem& model, const PhasePoint& base,
                                  const PeriodOptions& options = {});

// Critical values of rank-0 points: closed-form ones plus a numerical search.
std::vector<Vec2> singular_values(const ModelSystem& model, const Execution& exec = {});

struct Box {
  Vec2 lo = Vec2::Zero(), hi = Vec2::Zero();
};

// Cell-centred grid over bbox restricted to the image interior (margin =
// exclusion_radius) minus disks around rank-0 values. One-degree-of-freedom
// models return values (c, c) along the image interval.
std::vector<Vec2> regular_grid(const ModelSystem& model, const Box& bbox, int resolution,
                               double exclusion_radius, const Execution& exec = {});

}  // namespace semitoric
