#include "semitoric/inverse.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>
#include <set>
#include <sstream>

#include "semitoric/error.hpp"

namespace semitoric {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double cross2(const Vec2& a, const Vec2& b) { return a[0] * b[1] - a[1] * b[0]; }

// Lagrange-Gauss reduction of a planar basis.
void gauss_reduce(Vec2& a, Vec2& b) {
  if (a.squaredNorm() > b.squaredNorm()) std::swap(a, b);
  for (int it = 0; it < 100; ++it) {
    const double mu = std::round(a.dot(b) / a.squaredNorm());
    if (mu == 0.0) break;
    b -= mu * a;
    if (b.squaredNorm() >= a.squaredNorm()) break;
    std::swap(a, b);
  }
  if (a.squaredNorm() > b.squaredNorm()) std::swap(a, b);
  // Positive orientation keeps transported matrices comparable.
  if (cross2(a, b) < 0) b = -b;
}

struct Cluster {
  Vec2 sum = Vec2::Zero();
  Vec2 rep = Vec2::Zero();
  int count = 0;
};

std::string fmt2(const Vec2& c) {
  std::ostringstream os;
  os.precision(6);
  os << "(" << c[0] << ", " << c[1] << ")";
  return os.str();
}

// Extended Euclid: returns g and x, y with a x + b y = g.
long ext_gcd(long a, long b, long& x, long& y) {
  if (b == 0) {
    x = a >= 0 ? 1 : -1;
    y = 0;
    return std::abs(a);
  }
  long x1, y1;
  const long g = ext_gcd(b, a % b, x1, y1);
  x = y1;
  y = x1 - (a / b) * y1;
  return g;
}

}  // namespace

// --- image estimation -------------------------------------------------------

bool ImageRegion::contains(const Vec2& p) const {
  if (empty()) return false;
  const long ix = static_cast<long>(std::floor((p[0] - origin[0]) / cell));
  const long iy = static_cast<long>(std::floor((p[1] - origin[1]) / cell));
  if (ix < 0 || iy < 0 || ix >= nx || iy >= ny) return false;
  return occupied[static_cast<std::size_t>(iy * nx + ix)] != 0;
}

bool ImageRegion::disk_inside(const Vec2& c, double r) const {
  if (empty()) return false;
  const long x0 = static_cast<long>(std::floor((c[0] - r - origin[0]) / cell));
  const long x1 = static_cast<long>(std::floor((c[0] + r - origin[0]) / cell));
  const long y0 = static_cast<long>(std::floor((c[1] - r - origin[1]) / cell));
  const long y1 = static_cast<long>(std::floor((c[1] + r - origin[1]) / cell));
  for (long iy = y0; iy <= y1; ++iy) {
    for (long ix = x0; ix <= x1; ++ix) {
      // Nearest point of the cell to the centre.
      const double lx = origin[0] + ix * cell, ly = origin[1] + iy * cell;
      const double dx = std::max({lx - c[0], 0.0, c[0] - (lx + cell)});
      const double dy = std::max({ly - c[1], 0.0, c[1] - (ly + cell)});
      if (dx * dx + dy * dy > r * r) continue;
      if (ix < 0 || iy < 0 || ix >= nx || iy >= ny) return false;
      if (!occupied[static_cast<std::size_t>(iy * nx + ix)]) return false;
    }
  }
  return true;
}

PointSet ImageRegion::cell_centers() const {
  PointSet out;
  for (long iy = 0; iy < ny; ++iy)
    for (long ix = 0; ix < nx; ++ix)
      if (occupied[static_cast<std::size_t>(iy * nx + ix)])
        out.emplace_back(origin[0] + (ix + 0.5) * cell, origin[1] + (iy + 0.5) * cell);
  return out;
}

long ImageRegion::occupied_count() const {
  return static_cast<long>(std::count(occupied.begin(), occupied.end(), 1));
}

ImageRegion estimate_image(const PointSet& points, double cell, int closing) {
  if (!(cell > 0)) fail(ErrorKind::BadParameter, "cell size must be > 0");
  if (closing < 0) fail(ErrorKind::BadParameter, "closing radius must be >= 0");
  ImageRegion reg;
  reg.cell = cell;
  if (points.empty()) return reg;
  Vec2 lo = points[0], hi = points[0];
  for (const auto& p : points) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const long pad = closing + 1;
  reg.origin = lo - Vec2::Constant(pad * cell);
  reg.nx = static_cast<long>(std::floor((hi[0] - lo[0]) / cell)) + 2 * pad + 1;
  reg.ny = static_cast<long>(std::floor((hi[1] - lo[1]) / cell)) + 2 * pad + 1;
  const long nx = reg.nx, ny = reg.ny;
  std::vector<char> occ(static_cast<std::size_t>(nx * ny), 0);
  for (const auto& p : points) {
    const long ix = static_cast<long>(std::floor((p[0] - reg.origin[0]) / cell));
    const long iy = static_cast<long>(std::floor((p[1] - reg.origin[1]) / cell));
    occ[static_cast<std::size_t>(iy * nx + ix)] = 1;
  }
  // Morphological closing with a square structuring element.
  auto morph = [&](const std::vector<char>& in, bool dilate) {
    std::vector<char> out(in.size(), 0);
    for (long iy = 0; iy < ny; ++iy)
      for (long ix = 0; ix < nx; ++ix) {
        bool any = false, all = true;
        for (long dy = -closing; dy <= closing; ++dy)
          for (long dx = -closing; dx <= closing; ++dx) {
            const long x = ix + dx, y = iy + dy;
            const bool v = x >= 0 && y >= 0 && x < nx && y < ny && in[static_cast<std::size_t>(y * nx + x)];
            any = any || v;
            all = all && v;
          }
        out[static_cast<std::size_t>(iy * nx + ix)] = dilate ? any : all;
      }
    return out;
  };
  if (closing > 0) occ = morph(morph(occ, true), false);
  reg.occupied = occ;

  // Directed boundary edges with the occupied cell on the left, between
  // grid vertices (vx, vy) encoded as vy * (nx + 1) + vx.
  auto at = [&](long ix, long iy) {
    return ix >= 0 && iy >= 0 && ix < nx && iy < ny && occ[static_cast<std::size_t>(iy * nx + ix)];
  };
  auto vid = [&](long vx, long vy) { return vy * (nx + 1) + vx; };
  std::multimap<long, long> from;  // start vertex -> end vertex
  for (long iy = 0; iy < ny; ++iy)
    for (long ix = 0; ix < nx; ++ix) {
      if (!at(ix, iy)) continue;
      if (!at(ix, iy - 1)) from.emplace(vid(ix, iy), vid(ix + 1, iy));
      if (!at(ix + 1, iy)) from.emplace(vid(ix + 1, iy), vid(ix + 1, iy + 1));
      if (!at(ix, iy + 1)) from.emplace(vid(ix + 1, iy + 1), vid(ix, iy + 1));
      if (!at(ix - 1, iy)) from.emplace(vid(ix, iy + 1), vid(ix, iy));
    }
  auto coords = [&](long v) {
    return Vec2(reg.origin[0] + static_cast<double>(v % (nx + 1)) * cell,
                reg.origin[1] + static_cast<double>(v / (nx + 1)) * cell);
  };
  while (!from.empty()) {
    auto it = from.begin();
    const long start = it->first;
    long cur = it->second;
    Vec2 dir = coords(cur) - coords(start);
    from.erase(it);
    PointSet loop{coords(start)};
    while (cur != start) {
      loop.push_back(coords(cur));
      auto range = from.equal_range(cur);
      if (range.first == range.second) break;
      // At a saddle vertex take the left turn so diagonal cells stay apart.
      auto pick = range.first;
      double best = -2.0;
      for (auto e = range.first; e != range.second; ++e) {
        const Vec2 d = coords(e->second) - coords(cur);
        const double turn = cross2(dir, d);
        if (turn > best) {
          best = turn;
          pick = e;
        }
      }
      dir = coords(pick->second) - coords(cur);
      const long next = pick->second;
      from.erase(pick);
      cur = next;
    }
    // Drop collinear vertices.
    PointSet simple;
    const std::size_t n = loop.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2& a = loop[(i + n - 1) % n];
      const Vec2& b = loop[i];
      const Vec2& c = loop[(i + 1) % n];
      if (std::abs(cross2(b - a, c - b)) > 1e-12 * cell * cell) simple.push_back(b);
    }
    reg.boundaries.push_back(simple);
  }
  return reg;
}

// --- lattice fits -------------------------------------------------------------

double typical_spacing(const PointSet& points) {
  if (points.size() < 2) return 0.0;
  Vec2 lo = points[0], hi = points[0];
  for (const auto& p : points) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const double extent = std::max((hi - lo).maxCoeff(), 1e-12);
  const PointIndex index(points);
  std::vector<double> nn;
  nn.reserve(points.size());
  for (const auto& p : points) {
    double r = extent / std::sqrt(static_cast<double>(points.size()));
    double best = std::numeric_limits<double>::infinity();
    for (int tries = 0; tries < 40 && !std::isfinite(best); ++tries, r *= 2.0) {
      for (long i : index.within(p, r)) {
        const double d = (points[static_cast<std::size_t>(i)] - p).norm();
        if (d > 1e-12 * extent) best = std::min(best, d);
      }
    }
    if (std::isfinite(best)) nn.push_back(best);
  }
  if (nn.empty()) return 0.0;
  std::nth_element(nn.begin(), nn.begin() + static_cast<long>(nn.size() / 2), nn.end());
  return nn[nn.size() / 2];
}

namespace {

struct LabelledFit {
  LatticeFit fit;
  std::map<std::size_t, Eigen::Vector2i> labels;  // index into the input set -> lattice site
};

LabelledFit fit_labelled(const PointSet& points, const Vec2& center, double radius, double hbar) {
  std::vector<std::size_t> source;
  PointSet w;
  const double r2 = radius * radius;
  for (std::size_t i = 0; i < points.size(); ++i)
    if ((points[i] - center).squaredNorm() <= r2) {
      w.push_back(points[i]);
      source.push_back(i);
    }
  if (w.size() < 12)
    fail(ErrorKind::NotALattice, "window at " + fmt2(center) + " holds " + std::to_string(w.size()) + " points (< 12)");
  const std::size_t n = w.size();
  std::size_t anchor = 0;
  for (std::size_t i = 1; i < n; ++i)
    if ((w[i] - center).squaredNorm() < (w[anchor] - center).squaredNorm()) anchor = i;

  // Differences to the six nearest neighbours of every point.
  std::vector<Vec2> diffs;
  std::vector<double> nearest;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::pair<double, std::size_t>> d;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) d.emplace_back((w[j] - w[i]).squaredNorm(), j);
    const std::size_t k = std::min<std::size_t>(6, d.size());
    std::partial_sort(d.begin(), d.begin() + static_cast<long>(k), d.end());
    nearest.push_back(std::sqrt(d[0].first));
    for (std::size_t m = 0; m < k; ++m) diffs.push_back(w[d[m].second] - w[i]);
  }
  std::nth_element(nearest.begin(), nearest.begin() + static_cast<long>(nearest.size() / 2), nearest.end());
  const double tol = 0.25 * nearest[nearest.size() / 2];
  if (!(tol > 0)) fail(ErrorKind::NotALattice, "coincident points in window at " + fmt2(center));

  // Cluster differences up to sign.
  std::vector<Cluster> clusters;
  for (const auto& d : diffs) {
    bool placed = false;
    for (auto& c : clusters) {
      if ((d - c.rep).norm() < tol) {
        c.sum += d;
        ++c.count;
        placed = true;
      } else if ((d + c.rep).norm() < tol) {
        c.sum -= d;
        ++c.count;
        placed = true;
      }
      if (placed) break;
    }
    if (!placed) clusters.push_back({d, d, 1});
  }
  int max_count = 0;
  for (const auto& c : clusters) max_count = std::max(max_count, c.count);
  std::vector<Vec2> stable;
  for (const auto& c : clusters)
    if (c.count >= std::max(3, max_count / 5)) stable.push_back(c.sum / c.count);
  std::sort(stable.begin(), stable.end(), [](const Vec2& a, const Vec2& b) { return a.squaredNorm() < b.squaredNorm(); });
  if (stable.empty()) fail(ErrorKind::NotALattice, "no stable difference vectors at " + fmt2(center));
  Vec2 v1 = stable[0], v2 = Vec2::Zero();
  for (std::size_t i = 1; i < stable.size(); ++i)
    if (std::abs(cross2(v1, stable[i])) > 0.1 * v1.norm() * stable[i].norm()) {
      v2 = stable[i];
      break;
    }
  if (v2.isZero()) fail(ErrorKind::NotALattice, "difference vectors are collinear at " + fmt2(center));
  gauss_reduce(v1, v2);

  // Breadth-first indexing from the anchor. Each step follows the basis
  // vector measured on the previous step, so slow drift of the lattice
  // across the window does not break the integer labels.
  const PointIndex index(w);
  const double snap = 0.3 * std::min(v1.norm(), v2.norm());
  std::vector<Eigen::Vector2i> k(n);
  std::vector<char> labelled(n, 0);
  std::vector<Mat2> local(n);
  std::map<std::pair<int, int>, std::size_t> site;
  std::vector<std::size_t> queue{anchor};
  labelled[anchor] = 1;
  k[anchor] = Eigen::Vector2i::Zero();
  local[anchor] << v1, v2;
  site[{0, 0}] = anchor;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const std::size_t i = queue[head];
    for (int dir = 0; dir < 2; ++dir)
      for (int sign : {1, -1}) {
        const Vec2 step = sign * local[i].col(dir);
        const long j = index.nearest(w[i] + step);
        if (j < 0 || (w[static_cast<std::size_t>(j)] - w[i] - step).norm() > snap) continue;
        const std::size_t u = static_cast<std::size_t>(j);
        Eigen::Vector2i kj = k[i];
        kj[dir] += sign;
        if (labelled[u]) continue;
        if (site.count({kj[0], kj[1]}))
          fail(ErrorKind::NotALattice, "two points share a lattice site at " + fmt2(center));
        labelled[u] = 1;
        k[u] = kj;
        local[u] = local[i];
        local[u].col(dir) = sign * (w[u] - w[i]);
        site[{kj[0], kj[1]}] = u;
        queue.push_back(u);
      }
  }
  std::vector<std::size_t> matched(queue.begin(), queue.end());
  std::sort(matched.begin(), matched.end());
  if (matched.size() < 12)
    fail(ErrorKind::NotALattice, "only " + std::to_string(matched.size()) + " points index consistently at " + fmt2(center));

  // Least squares for offset and basis: p = o + B k.
  const Eigen::Index m = static_cast<Eigen::Index>(matched.size());
  Mat A(m, 3);
  Mat rhs(m, 2);
  for (Eigen::Index r = 0; r < m; ++r) {
    const std::size_t i = matched[static_cast<std::size_t>(r)];
    A(r, 0) = 1.0;
    A(r, 1) = k[i][0];
    A(r, 2) = k[i][1];
    rhs(r, 0) = w[i][0];
    rhs(r, 1) = w[i][1];
  }
  Eigen::ColPivHouseholderQR<Mat> qr(A);
  if (qr.rank() < 3) fail(ErrorKind::NotALattice, "lattice indices are collinear at " + fmt2(center));
  const Mat sol = qr.solve(rhs);
  const Vec2 offset = sol.row(0).transpose();
  Mat2 B;
  B.col(0) = sol.row(1).transpose();
  B.col(1) = sol.row(2).transpose();
  LatticeFit fit;
  double residual = 0.0;
  for (std::size_t i : matched) residual = std::max(residual, (w[i] - offset - B * k[i].cast<double>()).norm());
  fit.center = center;
  fit.hbar = hbar;
  fit.basis = B;
  fit.g0 = B / (kTwoPi * hbar);
  fit.offset = offset;
  const Vec2 f = B.inverse() * offset;
  const Vec2 frac = f - f.array().round().matrix();
  fit.correction = (B * frac).norm();
  fit.residual = residual;
  fit.count = matched.size();
  LabelledFit out{fit, {}};
  for (std::size_t i : matched) out.labels[source[i]] = k[i];
  return out;
}

}  // namespace

LatticeFit fit_lattice(const PointSet& points, const Vec2& center, double radius, double hbar) {
  return fit_labelled(points, center, radius, hbar).fit;
}

LadderFit fit_ladder(const PointSet& points, const Vec2& center, double radius) {
  PointSet w;
  for (const auto& p : points)
    if ((p - center).squaredNorm() <= radius * radius) w.push_back(p);
  if (w.size() < 3) fail(ErrorKind::NotALattice, "ladder window at " + fmt2(center) + " holds fewer than 3 points");
  Vec2 mean = Vec2::Zero();
  for (const auto& p : w) mean += p;
  mean /= static_cast<double>(w.size());
  Mat2 cov = Mat2::Zero();
  for (const auto& p : w) cov += (p - mean) * (p - mean).transpose();
  Eigen::SelfAdjointEigenSolver<Mat2> es(cov);
  Vec2 dir = es.eigenvectors().col(1);
  if (dir[0] < 0 || (dir[0] == 0 && dir[1] < 0)) dir = -dir;
  std::vector<double> t;
  for (const auto& p : w) t.push_back(dir.dot(p - mean));
  std::vector<double> sorted = t;
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> gaps;
  for (std::size_t i = 1; i < sorted.size(); ++i)
    if (sorted[i] - sorted[i - 1] > 1e-12) gaps.push_back(sorted[i] - sorted[i - 1]);
  if (gaps.empty()) fail(ErrorKind::NotALattice, "ladder points coincide");
  std::nth_element(gaps.begin(), gaps.begin() + static_cast<long>(gaps.size() / 2), gaps.end());
  const double spacing = gaps[gaps.size() / 2];
  Mat A(static_cast<Eigen::Index>(w.size()), 2);
  Mat rhs(static_cast<Eigen::Index>(w.size()), 2);
  std::vector<double> k(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    k[i] = std::round((t[i] - sorted[0]) / spacing);
    const auto r = static_cast<Eigen::Index>(i);
    A(r, 0) = 1.0;
    A(r, 1) = k[i];
    rhs(r, 0) = w[i][0];
    rhs(r, 1) = w[i][1];
  }
  const Mat sol = A.colPivHouseholderQr().solve(rhs);
  LadderFit fit;
  fit.offset = sol.row(0).transpose();
  fit.step = sol.row(1).transpose();
  for (std::size_t i = 0; i < w.size(); ++i)
    fit.residual = std::max(fit.residual, (w[i] - fit.offset - k[i] * fit.step).norm());
  fit.count = w.size();
  return fit;
}

// --- monodromy ----------------------------------------------------------------

Eigen::Matrix2i unipotent_normal_form(const Eigen::Matrix2i& M) {
  if (M == Eigen::Matrix2i::Identity()) return M;
  if (M.trace() != 2 || M.determinant() != 1) return M;
  const Eigen::Matrix2i N = M - Eigen::Matrix2i::Identity();
  // Primitive kernel vector of N (rank one).
  long a = N(0, 0), b = N(0, 1);
  if (a == 0 && b == 0) {
    a = N(1, 0);
    b = N(1, 1);
  }
  long p = b, q = -a;
  const long g = std::gcd(std::abs(p), std::abs(q));
  p /= g;
  q /= g;
  long x, y;
  ext_gcd(p, q, x, y);  // p x + q y = 1
  // w = (-y, x) gives det [v w] = p x + q y = 1.
  Eigen::Matrix2i P;
  P << static_cast<int>(p), static_cast<int>(-y), static_cast<int>(q), static_cast<int>(x);
  Eigen::Matrix2i Pinv;
  Pinv << P(1, 1), -P(0, 1), -P(1, 0), P(0, 0);
  return Pinv * M * P;
}

MonodromyResult transport_monodromy(const PointSet& points, const LoopSpec& loop, double hbar) {
  if (loop.windows < 3) fail(ErrorKind::BadParameter, "a loop needs at least 3 windows");
  if (!(loop.radius > 0 && loop.window_radius > 0)) fail(ErrorKind::BadParameter, "loop radii must be > 0");
  const int nw = loop.windows;
  if (2.0 * loop.radius * std::sin(std::numbers::pi / nw) >= 2.0 * loop.window_radius)
    fail(ErrorKind::BadParameter, "consecutive loop windows do not overlap");
  std::vector<LabelledFit> fits;
  for (int i = 0; i < nw; ++i) {
    const double th = kTwoPi * i / nw;
    fits.push_back(fit_labelled(points, loop.center + loop.radius * Vec2(std::cos(th), std::sin(th)),
                                loop.window_radius, hbar));
  }
  MonodromyResult out;
  out.loop = loop;
  // X holds the transported basis in the lattice coordinates of the
  // current window; it starts as the basis of window 0.
  Eigen::Matrix2i X = Eigen::Matrix2i::Identity();
  for (int step = 1; step <= nw; ++step) {
    const LabelledFit& from = fits[static_cast<std::size_t>(step - 1)];
    const LabelledFit& to = fits[static_cast<std::size_t>(step % nw)];
    // Label change k_to = N k_from + t over the points both windows share.
    std::vector<std::pair<Eigen::Vector2i, Eigen::Vector2i>> shared;
    for (const auto& [idx, k] : from.labels) {
      const auto it = to.labels.find(idx);
      if (it != to.labels.end()) shared.emplace_back(k, it->second);
    }
    Mat A(static_cast<Eigen::Index>(shared.size()), 3);
    Mat rhs(static_cast<Eigen::Index>(shared.size()), 2);
    for (std::size_t r = 0; r < shared.size(); ++r) {
      const auto row = static_cast<Eigen::Index>(r);
      A(row, 0) = shared[r].first[0];
      A(row, 1) = shared[r].first[1];
      A(row, 2) = 1.0;
      rhs(row, 0) = shared[r].second[0];
      rhs(row, 1) = shared[r].second[1];
    }
    Eigen::ColPivHouseholderQR<Mat> qr(A);
    if (shared.size() < 3 || qr.rank() < 3) {
      std::ostringstream os;
      os << "windows " << step - 1 << " and " << step % nw << " of loop around " << fmt2(loop.center)
         << " share too few lattice points";
      fail(ErrorKind::TransportAmbiguity, os.str());
    }
    const Mat sol = qr.solve(rhs);
    const Mat2 Nr = sol.topRows(2).transpose();
    Eigen::Matrix2i N;
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c) N(r, c) = static_cast<int>(std::lround(Nr(r, c)));
    out.rounding_error = std::max(out.rounding_error, (Nr - N.cast<double>()).cwiseAbs().maxCoeff());
    if (out.rounding_error > 0.1) {
      std::ostringstream os;
      os << "label change between windows is " << out.rounding_error << " from an integer matrix (gate 0.1) around "
         << fmt2(loop.center);
      fail(ErrorKind::TransportAmbiguity, os.str());
    }
    // Nearest-vector check: each transported basis vector must be the
    // clear nearest lattice vector of the new window.
    const Mat2& Bf = from.fit.basis;
    const Mat2& Bt = to.fit.basis;
    const double shortest = std::min(Bt.col(0).norm(), Bt.col(1).norm());
    const Eigen::Matrix2i Xn = N * X;
    for (int col = 0; col < 2; ++col) {
      const Vec2 a = Bf * X.col(col).cast<double>();
      const Vec2 base = (Bt.inverse() * a).array().round().matrix();
      double d1 = std::numeric_limits<double>::infinity(), d2 = d1;
      Vec2 best = Vec2::Zero();
      for (int i = -2; i <= 2; ++i)
        for (int j = -2; j <= 2; ++j) {
          const Vec2 cand = base + Vec2(i, j);
          const double d = (Bt * cand - a).norm();
          if (d < d1) {
            d2 = d1;
            d1 = d;
            best = cand;
          } else if (d < d2) {
            d2 = d;
          }
        }
      const double margin = (d2 - d1) / shortest;
      out.margins.push_back(margin);
      if (margin < 0.2 || best != Xn.col(col).cast<double>()) {
        std::ostringstream os;
        os << "basis transport margin " << margin << " at window " << step % nw << " of loop around "
           << fmt2(loop.center) << (margin < 0.2 ? " is below 0.2" : " disagrees with the point labels");
        fail(ErrorKind::TransportAmbiguity, os.str());
      }
    }
    X = Xn;
  }
  out.matrix = X;
  const int det = out.matrix.determinant();
  if (det != 1 && det != -1)
    fail(ErrorKind::TransportAmbiguity, "monodromy determinant " + std::to_string(det) + " is not +-1");
  out.normal_form = unipotent_normal_form(out.matrix);
  return out;
}

namespace {

Vec2 mean_value(const std::vector<MarkedValue>& group) {
  Vec2 c = Vec2::Zero();
  for (const auto& v : group) c += v.value;
  return c / static_cast<double>(group.size());
}

// Single-linkage groups of grid hits that touch within one grid step.
std::vector<std::vector<MarkedValue>> cluster_hits(const std::vector<MarkedValue>& hits, double step) {
  std::vector<int> label(hits.size(), -1);
  std::vector<std::vector<MarkedValue>> groups;
  for (std::size_t i = 0; i < hits.size(); ++i) {
    if (label[i] >= 0) continue;
    const int id = static_cast<int>(groups.size());
    groups.emplace_back();
    label[i] = id;
    std::vector<std::size_t> stack{i};
    while (!stack.empty()) {
      const std::size_t a = stack.back();
      stack.pop_back();
      groups[id].push_back(hits[a]);
      for (std::size_t b = 0; b < hits.size(); ++b)
        if (label[b] < 0 && (hits[a].value - hits[b].value).cwiseAbs().maxCoeff() <= 1.01 * step) {
          label[b] = id;
          stack.push_back(b);
        }
    }
  }
  return groups;
}

}  // namespace

std::vector<MarkedValue> locate_marked_values(const std::vector<JointSpectrum>& spectra,
                                              const LocateOptions& options) {
  if (spectra.size() < 2) fail(ErrorKind::BadParameter, "marked-value location needs at least 2 hbar values");
  if (options.grid < 2) fail(ErrorKind::BadParameter, "scan grid must be >= 2");
  double hbar_max = 0.0;
  for (const auto& s : spectra) hbar_max = std::max(hbar_max, s.hbar);

  std::vector<std::vector<MarkedValue>> per_hbar;
  for (const auto& spec : spectra) {
    std::vector<MarkedValue> found;
    const double sigma = typical_spacing(spec.points);
    if (!(sigma > 0)) {
      per_hbar.push_back(found);
      continue;
    }
    const ImageRegion region = estimate_image(spec, options.region_cell_spacings * sigma);
    LoopSpec proto;
    proto.radius = options.loop_spacings * sigma;
    proto.window_radius = options.window_spacings * sigma;
    const PointSet centers = region.cell_centers();
    Vec2 lo = centers.empty() ? Vec2::Zero() : centers[0], hi = lo;
    for (const auto& c : centers) {
      lo = lo.cwiseMin(c);
      hi = hi.cwiseMax(c);
    }
    // A candidate loop is usable when every window lies inside the region.
    auto scan = [&](const std::vector<Vec2>& candidates, double radius) {
      LoopSpec shape = proto;
      shape.radius = radius;
      // Enough windows that neighbours overlap by at least half a window.
      const double half_angle = std::asin(std::min(1.0, shape.window_radius / (2.0 * radius)));
      shape.windows = std::max(8, static_cast<int>(std::ceil(std::numbers::pi / half_angle)));
      std::vector<std::optional<MarkedValue>> hits(candidates.size());
      for_each_index(candidates.size(), options.exec, [&](std::size_t i) {
        LoopSpec loop = shape;
        loop.center = candidates[i];
        for (int wdx = 0; wdx < loop.windows; ++wdx) {
          const double th = kTwoPi * wdx / loop.windows;
          if (!region.disk_inside(loop.center + loop.radius * Vec2(std::cos(th), std::sin(th)), loop.window_radius))
            return;
        }
        try {
          const MonodromyResult m = transport_monodromy(spec.points, loop, spec.hbar);
          if (!m.identity()) hits[i] = MarkedValue{loop.center, m.normal_form};
        } catch (const Error&) {
        }
      });
      std::vector<MarkedValue> out;
      for (auto& h : hits)
        if (h) out.push_back(*h);
      return out;
    };
    auto grid_around = [](const Vec2& center, double half_width, double spacing) {
      const int n = static_cast<int>(std::ceil(half_width / spacing));
      std::vector<Vec2> pts;
      for (int iy = -n; iy <= n; ++iy)
        for (int ix = -n; ix <= n; ++ix) pts.push_back(center + spacing * Vec2(ix, iy));
      return pts;
    };
    const double min_radius = proto.radius;
    const double coarse_step = std::max((hi - lo).maxCoeff() / options.grid, 1e-300);
    // Coarse loops are large enough that every point of the scanned box is enclosed by some loop.
    const double coarse_radius = std::max(min_radius, 0.75 * coarse_step);
    std::vector<Vec2> coarse;
    const Vec2 extent = hi - lo;
    const int gx = std::max(1, static_cast<int>(std::ceil(extent[0] / coarse_step)));
    const int gy = std::max(1, static_cast<int>(std::ceil(extent[1] / coarse_step)));
    for (int iy = 0; iy <= gy; ++iy)
      for (int ix = 0; ix <= gx; ++ix) coarse.push_back(lo + coarse_step * Vec2(ix, iy));

    for (const auto& cluster : cluster_hits(scan(coarse, coarse_radius), coarse_step)) {
      Vec2 centroid = mean_value(cluster);
      double radius = coarse_radius;
      std::vector<MarkedValue> last = cluster;
      // Halve the loop until it reaches the minimal size; the final pass oversamples.
      while (radius > min_radius * (1.0 + 1e-12)) {
        const double next = std::max(0.5 * radius, min_radius);
        const bool final_pass = next <= min_radius * (1.0 + 1e-12);
        const double spacing = final_pass ? next / 3.0 : next;
        const auto refined = scan(grid_around(centroid, radius + next, spacing), next);
        const auto groups = cluster_hits(refined, spacing);
        if (groups.empty()) {
          last.clear();
          break;
        }
        // Follow the group closest to the previous estimate.
        const auto closest = std::min_element(groups.begin(), groups.end(), [&](const auto& x, const auto& y) {
          return (mean_value(x) - centroid).norm() < (mean_value(y) - centroid).norm();
        });
        last = *closest;
        centroid = mean_value(last);
        radius = next;
        if (final_pass) break;
      }
      if (last.empty()) continue;
      std::map<std::pair<int, int>, int> votes;
      for (const auto& r : last) ++votes[{r.monodromy(0, 1), r.monodromy(1, 0)}];
      const auto best = std::max_element(votes.begin(), votes.end(),
                                         [](const auto& x, const auto& y) { return x.second < y.second; });
      MarkedValue mv;
      mv.value = centroid;
      for (const auto& r : last)
        if (r.monodromy(0, 1) == best->first.first && r.monodromy(1, 0) == best->first.second) {
          mv.monodromy = r.monodromy;
          break;
        }
      found.push_back(mv);
    }
    per_hbar.push_back(found);
  }

  // Confirm against every hbar; report the value at the smallest hbar.
  std::size_t finest = 0;
  for (std::size_t i = 1; i < spectra.size(); ++i)
    if (spectra[i].hbar < spectra[finest].hbar) finest = i;
  std::vector<MarkedValue> out;
  for (const auto& v : per_hbar[finest]) {
    bool everywhere = true;
    for (std::size_t i = 0; i < per_hbar.size() && everywhere; ++i) {
      if (i == finest) continue;
      everywhere = std::any_of(per_hbar[i].begin(), per_hbar[i].end(),
                               [&](const MarkedValue& u) { return (u.value - v.value).norm() < 5.0 * hbar_max; });
    }
    if (everywhere) out.push_back(v);
  }
  return out;
}

}  // namespace semitoric
