#include "semitoric/planar.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace semitoric {

namespace {
double cross(const Vec2& o, const Vec2& a, const Vec2& b) {
  return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}
}  // namespace

PointSet convex_hull(PointSet pts) {
  std::sort(pts.begin(), pts.end(), [](const Vec2& a, const Vec2& b) {
    return a[0] < b[0] || (a[0] == b[0] && a[1] < b[1]);
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;
  PointSet h(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross(h[k - 2], h[k - 1], p) <= 0) --k;
    h[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
    h[k++] = pts[i];
  }
  h.resize(k - 1);
  return h;
}

PointIndex::PointIndex(const PointSet& pts, double cell) : pts_(pts) {
  if (pts.empty()) return;
  Vec2 lo = pts[0], hi = pts[0];
  for (const auto& p : pts) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const Vec2 ext = (hi - lo).cwiseMax(Vec2::Constant(1e-12));
  if (cell <= 0) {
    // About two points per bucket on average, bounded grid size.
    const double area = std::max(ext[0] * ext[1], 1e-24);
    cell = std::sqrt(2.0 * area / static_cast<double>(pts.size()));
    cell = std::max(cell, std::max(ext[0], ext[1]) / 4096.0);
  }
  cell_ = cell;
  lo_ = lo;
  nx_ = static_cast<long>(ext[0] / cell_) + 1;
  ny_ = static_cast<long>(ext[1] / cell_) + 1;
  std::vector<long> count(static_cast<std::size_t>(nx_ * ny_) + 1, 0);
  std::vector<long> key(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    key[i] = cell_of(pts[i][0], lo_[0], nx_) + nx_ * cell_of(pts[i][1], lo_[1], ny_);
    ++count[static_cast<std::size_t>(key[i]) + 1];
  }
  for (std::size_t c = 1; c < count.size(); ++c) count[c] += count[c - 1];
  start_ = count;
  items_.resize(pts.size());
  std::vector<long> fill(count.begin(), count.end() - 1);
  for (std::size_t i = 0; i < pts.size(); ++i) items_[static_cast<std::size_t>(fill[static_cast<std::size_t>(key[i])]++)] = static_cast<long>(i);
}

long PointIndex::cell_of(double v, double lo, long n) const {
  const long c = static_cast<long>(std::floor((v - lo) / cell_));
  return std::clamp(c, 0L, n - 1);
}

long PointIndex::nearest(const Vec2& q) const {
  if (pts_.empty()) return -1;
  const long cx = cell_of(q[0], lo_[0], nx_), cy = cell_of(q[1], lo_[1], ny_);
  // Distance from q to the grid box, so rings start counting from there.
  const double ox = std::max({0.0, lo_[0] - q[0], q[0] - (lo_[0] + nx_ * cell_)});
  const double oy = std::max({0.0, lo_[1] - q[1], q[1] - (lo_[1] + ny_ * cell_)});
  const double outside = std::hypot(ox, oy);
  double best = std::numeric_limits<double>::infinity();
  long best_i = -1;
  const long rmax = std::max(nx_, ny_);
  for (long r = 0; r <= rmax; ++r) {
    for (long iy = cy - r; iy <= cy + r; ++iy) {
      if (iy < 0 || iy >= ny_) continue;
      const bool edge_row = (iy == cy - r || iy == cy + r);
      for (long ix = cx - r; ix <= cx + r; ix += (edge_row ? 1 : 2 * r)) {
        if (ix >= 0 && ix < nx_) {
          const std::size_t c = static_cast<std::size_t>(ix + nx_ * iy);
          for (long k = start_[c]; k < start_[c + 1]; ++k) {
            const long i = items_[static_cast<std::size_t>(k)];
            const double d = (pts_[static_cast<std::size_t>(i)] - q).squaredNorm();
            if (d < best || (d == best && i < best_i)) {
              best = d;
              best_i = i;
            }
          }
        }
        if (r == 0) break;
      }
    }
    // Points beyond ring r are at least r * cell_ from the clamped cell, and
    // q sits `outside` away from the grid box in an orthogonal direction.
    const double ring = static_cast<double>(r) * cell_;
    const double reach = std::sqrt(outside * outside + ring * ring);
    if (best_i >= 0 && std::sqrt(best) <= reach) break;
  }
  return best_i;
}

std::vector<long> PointIndex::within(const Vec2& center, double radius) const {
  std::vector<long> out;
  if (pts_.empty()) return out;
  const long x0 = cell_of(center[0] - radius, lo_[0], nx_), x1 = cell_of(center[0] + radius, lo_[0], nx_);
  const long y0 = cell_of(center[1] - radius, lo_[1], ny_), y1 = cell_of(center[1] + radius, lo_[1], ny_);
  const double r2 = radius * radius;
  for (long iy = y0; iy <= y1; ++iy)
    for (long ix = x0; ix <= x1; ++ix) {
      const std::size_t c = static_cast<std::size_t>(ix + nx_ * iy);
      for (long k = start_[c]; k < start_[c + 1]; ++k) {
        const long i = items_[static_cast<std::size_t>(k)];
        if ((pts_[static_cast<std::size_t>(i)] - center).squaredNorm() <= r2) out.push_back(i);
      }
    }
  std::sort(out.begin(), out.end());
  return out;
}

double directed_hausdorff(const PointSet& A, const PointSet& B, const Execution& exec) {
  if (A.empty()) return 0.0;
  if (B.empty()) return std::numeric_limits<double>::infinity();
  const PointIndex index(B);
  std::vector<double> d(A.size());
  for_each_index(A.size(), exec, [&](std::size_t i) {
    d[i] = (B[static_cast<std::size_t>(index.nearest(A[i]))] - A[i]).norm();
  });
  return *std::max_element(d.begin(), d.end());
}

double hausdorff(const PointSet& A, const PointSet& B, const Execution& exec) {
  return std::max(directed_hausdorff(A, B, exec), directed_hausdorff(B, A, exec));
}

double hausdorff_reference(const PointSet& A, const PointSet& B) {
  auto directed = [](const PointSet& X, const PointSet& Y) {
    double worst = 0.0;
    for (const auto& x : X) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& y : Y) best = std::min(best, (x - y).squaredNorm());
      worst = std::max(worst, best);
    }
    return std::sqrt(worst);
  };
  if (A.empty() && B.empty()) return 0.0;
  if (A.empty() || B.empty()) return std::numeric_limits<double>::infinity();
  return std::max(directed(A, B), directed(B, A));
}

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 == 0.0) return (p - a).norm();
  const double s = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return (a + s * ab - p).norm();
}

PointSet densify(const PointSet& polyline, bool closed, double spacing) {
  PointSet out;
  const std::size_t n = polyline.size();
  if (n == 0) return out;
  const std::size_t segs = closed ? n : n - 1;
  for (std::size_t i = 0; i < segs; ++i) {
    const Vec2& a = polyline[i];
    const Vec2& b = polyline[(i + 1) % n];
    const int k = std::max(1, static_cast<int>(std::ceil((b - a).norm() / spacing)));
    for (int j = 0; j < k; ++j) out.push_back(a + (b - a) * (static_cast<double>(j) / k));
  }
  if (!closed) out.push_back(polyline.back());
  return out;
}

bool point_in_polygon(const Vec2& p, const PointSet& poly) {
  bool inside = false;
  const std::size_t n = poly.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[j];
    if ((a[1] > p[1]) != (b[1] > p[1]) && p[0] < (b[0] - a[0]) * (p[1] - a[1]) / (b[1] - a[1]) + a[0])
      inside = !inside;
  }
  return inside;
}

double distance_to_region(const Vec2& p, const PointSet& poly) {
  if (poly.empty()) return std::numeric_limits<double>::infinity();
  if (poly.size() == 1) return (p - poly[0]).norm();
  if (poly.size() >= 3 && point_in_polygon(p, poly)) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  const std::size_t n = poly.size();
  const std::size_t edges = n == 2 ? 1 : n;
  for (std::size_t i = 0; i < edges; ++i) best = std::min(best, point_segment_distance(p, poly[i], poly[(i + 1) % n]));
  return best;
}

double hausdorff_to_region(const PointSet& pts, const PointSet& poly, double spacing, const Execution& exec) {
  if (pts.empty() || poly.empty()) return std::numeric_limits<double>::infinity();
  // Points to region: exact.
  std::vector<double> d1(pts.size());
  for_each_index(pts.size(), exec, [&](std::size_t i) { d1[i] = distance_to_region(pts[i], poly); });
  double out = *std::max_element(d1.begin(), d1.end());
  // Region to points: boundary plus interior grid samples.
  PointSet samples = densify(poly, poly.size() >= 3, spacing);
  if (poly.size() >= 3) {
    Vec2 lo = poly[0], hi = poly[0];
    for (const auto& v : poly) {
      lo = lo.cwiseMin(v);
      hi = hi.cwiseMax(v);
    }
    for (double x = lo[0] + 0.5 * spacing; x < hi[0]; x += spacing)
      for (double y = lo[1] + 0.5 * spacing; y < hi[1]; y += spacing)
        if (point_in_polygon(Vec2(x, y), poly)) samples.emplace_back(x, y);
  }
  return std::max(out, directed_hausdorff(samples, pts, exec));
}

}  // namespace semitoric
