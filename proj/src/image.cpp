#include "semitoric/image.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>

#include "semitoric/halton.hpp"

namespace semitoric {

namespace {

// Newton restoration of f1 = c1 along the tangent gradient of f1.
bool restore_level(const ModelSystem& model, Vec& x, double c1) {
  const Chart& chart = model.chart();
  for (int it = 0; it < 50; ++it) {
    const double r = model.value(x)[0] - c1;
    if (std::abs(r) < 1e-13) return true;
    const Vec g = chart.project_tangent(x, model.gradient(1, x));
    const double g2 = g.squaredNorm();
    if (g2 < 1e-20) return false;
    double step = 1.0;
    Vec xn = chart.project(x - step * (r / g2) * g);
    while (std::abs(model.value(xn)[0] - c1) > std::abs(r) && step > 1e-6) {
      step *= 0.5;
      xn = chart.project(x - step * (r / g2) * g);
    }
    x = xn;
  }
  return std::abs(model.value(x)[0] - c1) < 1e-11;
}

// Maximizes sign * f_k by projected gradient ascent with Barzilai-Borwein
// steps; when level is set the ascent is restricted to {f1 = *level}.
double ascend(const ModelSystem& model, Vec x, int k, double sign, std::optional<double> level, int max_iter) {
  const Chart& chart = model.chart();
  auto objective = [&](const Vec& y) { return sign * model.value(y)[k - 1]; };
  auto direction = [&](const Vec& y) {
    Vec g = sign * chart.project_tangent(y, model.gradient(k, y));
    if (level) {
      const Vec n = chart.project_tangent(y, model.gradient(1, y));
      const double nn = n.squaredNorm();
      if (nn > 1e-24) g -= (g.dot(n) / nn) * n;
    }
    return g;
  };
  if (level && !restore_level(model, x, *level)) return -std::numeric_limits<double>::infinity();
  double f = objective(x);
  Vec g = direction(x);
  double eta = 0.1;
  for (int it = 0; it < max_iter && g.norm() > 1e-12; ++it) {
    bool accepted = false;
    for (int tries = 0; tries < 40; ++tries) {
      Vec xn = chart.project(x + eta * g);
      if (level && !restore_level(model, xn, *level)) {
        eta *= 0.5;
        continue;
      }
      const double fn = objective(xn);
      if (fn >= f - 1e-15) {
        const Vec gn = direction(xn);
        const Vec s = xn - x, yv = gn - g;
        const double sy = s.dot(yv);
        // BB step for ascent: |s.s / s.y| with a safe fallback.
        eta = sy < 0 ? std::clamp(-s.squaredNorm() / sy, 1e-6, 10.0) : std::min(2.0 * eta, 10.0);
        const bool stalled = fn - f < 1e-16 && s.norm() < 1e-12;
        x = xn;
        f = fn;
        g = gn;
        accepted = !stalled;
        break;
      }
      eta *= 0.5;
    }
    if (!accepted) break;
  }
  return f;
}

std::vector<Vec> seeds_for(const ModelSystem& model, const ImageOptions& options) {
  const Halton h(model.sample_dimension(), options.seed + 7);
  std::vector<Vec> out;
  for (int i = 0; i < options.seeds; ++i) out.push_back(model.chart().project(model.sample(h.point(i))));
  return out;
}

}  // namespace

Interval f1_range(const ModelSystem& model, const ImageOptions& options) {
  Interval r{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (const auto& x : seeds_for(model, options)) {
    r.lo = std::min(r.lo, -ascend(model, x, 1, -1.0, std::nullopt, options.max_iterations));
    r.hi = std::max(r.hi, ascend(model, x, 1, 1.0, std::nullopt, options.max_iterations));
  }
  if (model.metadata().f1_window) r.hi = std::min(r.hi, *model.metadata().f1_window);
  return r;
}

Interval image_slice(const ModelSystem& model, double c1, const ImageOptions& options) {
  Interval r{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  const int k = model.dof() == 1 ? 1 : 2;
  for (const auto& x : seeds_for(model, options)) {
    const double hi = ascend(model, x, k, 1.0, c1, options.max_iterations);
    const double lo = -ascend(model, x, k, -1.0, c1, options.max_iterations);
    if (std::isfinite(hi)) r.hi = std::max(r.hi, hi);
    if (std::isfinite(lo)) r.lo = std::min(r.lo, lo);
  }
  return r;
}

PointSet sample_image(const ModelSystem& model, std::size_t count, std::uint64_t seed, const Execution& exec) {
  const Halton h(model.sample_dimension(), seed);
  PointSet out(count);
  for_each_index(count, exec, [&](std::size_t i) { out[i] = model.value(model.chart().project(model.sample(h.point(i)))); });
  return out;
}

PointSet sample_image_grid(const ModelSystem& model, int per_axis, const Execution& exec) {
  const int dim = model.sample_dimension();
  const Halton h(std::max(1, dim - 2), 11);
  const std::size_t n1 = static_cast<std::size_t>(per_axis);
  const std::size_t n2 = dim >= 2 ? n1 : 1;
  PointSet out(n1 * n2);
  for_each_index(out.size(), exec, [&](std::size_t idx) {
    const std::size_t i = idx % n1, j = idx / n1;
    std::vector<double> u(static_cast<std::size_t>(dim));
    u[0] = per_axis > 1 ? static_cast<double>(i) / (per_axis - 1) : 0.5;
    if (dim >= 2) u[1] = per_axis > 1 ? static_cast<double>(j) / (per_axis - 1) : 0.5;
    if (dim > 2) {
      const auto rest = h.point(idx);
      for (int k = 2; k < dim; ++k) u[static_cast<std::size_t>(k)] = rest[static_cast<std::size_t>(k - 2)];
    }
    out[idx] = model.value(model.chart().project(model.sample(u)));
  });
  return out;
}

PointSet classical_image_polygon(const ModelSystem& model, int columns, const Execution& exec) {
  const Interval range = f1_range(model);
  if (model.dof() == 1) return {Vec2(range.lo, range.lo), Vec2(range.hi, range.hi)};
  if (columns < 2) columns = 2;
  const std::size_t n = static_cast<std::size_t>(columns);
  std::vector<Interval> slices(n);
  std::vector<double> xs(n);
  // Cosine spacing concentrates columns at the ends, where slices shrink.
  for (std::size_t i = 0; i < n; ++i) {
    const double th = std::numbers::pi * (static_cast<double>(i) + 0.5) / static_cast<double>(n);
    xs[i] = range.lo + 0.5 * (range.hi - range.lo) * (1.0 - std::cos(th));
  }
  for_each_index(n, exec, [&](std::size_t i) { slices[i] = image_slice(model, xs[i]); });
  PointSet poly;
  for (std::size_t i = 0; i < n; ++i)
    if (!slices[i].empty()) poly.emplace_back(xs[i], slices[i].lo);
  for (std::size_t i = n; i-- > 0;)
    if (!slices[i].empty()) poly.emplace_back(xs[i], slices[i].hi);
  return poly;
}

PointSet clip_to_window(const ModelSystem& model, const PointSet& values) {
  if (!model.metadata().f1_window) return values;
  const double w = *model.metadata().f1_window;
  PointSet out;
  for (const auto& v : values)
    if (v[0] <= w) out.push_back(v);
  return out;
}

}  // namespace semitoric
