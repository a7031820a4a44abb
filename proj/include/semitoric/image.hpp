#pragma once

#include <cstdint>

#include "semitoric/execution.hpp"
#include "semitoric/model.hpp"
#include "semitoric/planar.hpp"

namespace semitoric {

struct Interval {
  double lo = 0.0, hi = -1.0;
  bool empty() const { return !(lo <= hi); }
  double length() const { return empty() ? 0.0 : hi - lo; }
};

struct ImageOptions {
  int seeds = 8;
  std::uint64_t seed = 0;
  int max_iterations = 400;
};

// Range of f1 over M, capped by the model's f1 window when unbounded.
Interval f1_range(const ModelSystem& model, const ImageOptions& options = {});

// Range of f2 on the level set {f1 = c1}; empty when c1 is outside the image.
Interval image_slice(const ModelSystem& model, double c1, const ImageOptions& options = {});

// Momentum-map values of quasi-random points (Halton with seed offset).
PointSet sample_image(const ModelSystem& model, std::size_t count, std::uint64_t seed = 0,
                      const Execution& exec = {});

// Values on a structured per_axis x per_axis grid over the first two
// sampling coordinates (endpoints included); remaining coordinates Halton.
PointSet sample_image_grid(const ModelSystem& model, int per_axis, const Execution& exec = {});

// Boundary of F(M) as a counter-clockwise polygon from `columns` slices at
// cosine-spaced f1 values; a two-point segment for one-dof models.
PointSet classical_image_polygon(const ModelSystem& model, int columns = 200, const Execution& exec = {});

// Drops values with f1 above the model's window (unbounded images).
PointSet clip_to_window(const ModelSystem& model, const PointSet& values);

}  // namespace semitoric
