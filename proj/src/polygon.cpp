#include "semitoric/polygon.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include <boost/math/quadrature/gauss.hpp>

#include "semitoric/error.hpp"
#include "semitoric/image.hpp"
#include "semitoric/singularity.hpp"

namespace semitoric {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Gauss-Legendre rule with 8 nodes on [0, 1], nodes in increasing order so
// that tau1 can be lifted along the segment.
struct Rule {
  std::array<double, 8> u{}, w{};
};

const Rule& gl8() {
  static const Rule rule = [] {
    using G = boost::math::quadrature::gauss<double, 8>;
    std::vector<std::pair<double, double>> nodes;
    for (std::size_t i = 0; i < G::abscissa().size(); ++i) {
      nodes.emplace_back(-G::abscissa()[i], G::weights()[i]);
      nodes.emplace_back(G::abscissa()[i], G::weights()[i]);
    }
    std::sort(nodes.begin(), nodes.end());
    Rule r;
    for (std::size_t i = 0; i < 8; ++i) {
      r.u[i] = 0.5 * (1.0 + nodes[i].first);
      r.w[i] = 0.5 * nodes[i].second;
    }
    return r;
  }();
  return rule;
}

double nearest_branch(double raw, double reference) {
  return raw + kTwoPi * std::round((reference - raw) / kTwoPi);
}

// Representative in (-pi, pi].
double principal(double t) {
  const double r = t - kTwoPi * std::round(t / kTwoPi);
  return r <= -std::numbers::pi ? r + kTwoPi : r;
}

struct SegmentResult {
  double value = 0.0;
  double lift = 0.0;  // lifted tau1 at the last quadrature node
};

struct Spine {
  std::vector<double> xs, ys;
  std::vector<Interval> slices;
  std::vector<double> action;  // integral from the origin node along the spine
  std::vector<double> lift;    // lifted tau1 at each node
  std::size_t origin = 0;
  Vec2 point(std::size_t i) const { return {xs[i], ys[i]}; }
};

class ActionIntegrator {
 public:
  ActionIntegrator(const ModelSystem& model, const std::vector<int>& cut_signs, const ActionOptions& options)
      : model_(model), options_(options) {
    if (model.dof() != 2) fail(ErrorKind::BadParameter, "the second action needs two degrees of freedom");
    if (!(model.flags().toric || model.flags().semitoric))
      fail(ErrorKind::BadParameter, "model '" + model.id() + "' is neither toric nor semitoric");
    if (model.periodic_component() != 1)
      fail(ErrorKind::BadParameter, "the second action expects f1 to generate the circle action");
    focus_ = focus_focus_values(model, options.exec);
    for (std::size_t i = 1; i < focus_.size(); ++i)
      if (std::abs(focus_[i][0] - focus_[i - 1][0]) < 1e-6)
        fail(ErrorKind::NotSimple, "two focus-focus values share f1 = " + std::to_string(focus_[i][0]));
    if (cut_signs.empty()) {
      signs_.assign(focus_.size(), 1);
    } else {
      if (cut_signs.size() != focus_.size())
        fail(ErrorKind::BadParameter, "expected " + std::to_string(focus_.size()) + " cut signs, got " +
                                          std::to_string(cut_signs.size()));
      for (int s : cut_signs)
        if (s != 1 && s != -1) fail(ErrorKind::BadParameter, "cut signs must be +1 or -1");
      signs_ = cut_signs;
    }
    // The spine keeps to the side of each focus-focus value away from its cut.
    for (std::size_t l = 0; l < focus_.size(); ++l) {
      const Interval s = image_slice(model_, focus_[l][0]);
      const double frac = (focus_[l][1] - s.lo) / std::max(s.length(), 1e-300);
      control_.emplace_back(focus_[l][0], signs_[l] > 0 ? 0.5 * frac : 0.5 * (1.0 + frac));
    }
  }

  const std::vector<Vec2>& focus() const { return focus_; }
  const std::vector<int>& signs() const { return signs_; }

  double fraction(double x) const {
    if (control_.empty()) return 0.5;
    if (x <= control_.front().first) return control_.front().second;
    if (x >= control_.back().first) return control_.back().second;
    for (std::size_t i = 1; i < control_.size(); ++i)
      if (x <= control_[i].first) {
        const auto& [x0, f0] = control_[i - 1];
        const auto& [x1, f1] = control_[i];
        return f0 + (f1 - f0) * (x - x0) / (x1 - x0);
      }
    return control_.back().second;
  }

  double raw_tau1(const Vec2& c) const { return period_lattice(model_, c, options_.periods).tau1; }

  // Integral of (tau1 dc1 + tau2 dc2) / 2pi along p -> q, lifting tau1 from lift.
  SegmentResult segment(const Vec2& p, const Vec2& q, double lift) const {
    const double len = (q - p).norm();
    if (len == 0.0) return {0.0, lift};
    long budget = 200000;
    const double tol = std::max(options_.tol, 1e-9 * len);
    const Panel whole = panel(p, q, 0.0, 1.0, lift, budget);
    return adaptive(p, q, 0.0, 1.0, lift, 0, whole, tol, budget);
  }

  // Vertical legs may not pass through a focus-focus value.
  void check_leg(double x, double y0, double y1) const {
    for (const auto& m : focus_) {
      const double scale = 1e-9 * (1.0 + std::abs(m[0]));
      if (std::abs(x - m[0]) <= scale && std::min(y0, y1) <= m[1] + scale && m[1] - scale <= std::max(y0, y1))
        fail(ErrorKind::PathThroughSingularValue,
             "path at f1 = " + std::to_string(x) + " meets the focus-focus value; move off the cut");
    }
  }

  void check_regular(const Vec2& c, const Interval& slice) const {
    if (slice.empty() || !(c[1] > slice.lo && c[1] < slice.hi))
      fail(ErrorKind::SingularValue, "value (" + std::to_string(c[0]) + ", " + std::to_string(c[1]) +
                                         ") is not an interior regular value");
    for (const auto& m : focus_)
      if ((c - m).norm() < 1e-9) fail(ErrorKind::SingularValue, "value is a focus-focus value");
  }

  // Spine through the given abscissas (ascending) anchored at node origin.
  Spine spine(const std::vector<double>& xs, std::size_t origin) const {
    Spine s;
    s.xs = xs;
    s.origin = origin;
    const std::size_t n = xs.size();
    s.slices.resize(n);
    s.ys.resize(n);
    for_each_index(n, options_.exec, [&](std::size_t i) { s.slices[i] = image_slice(model_, xs[i]); });
    for (std::size_t i = 0; i < n; ++i) {
      if (s.slices[i].empty()) fail(ErrorKind::BadParameter, "f1 = " + std::to_string(xs[i]) + " is outside the image");
      s.ys[i] = s.slices[i].lo + fraction(xs[i]) * s.slices[i].length();
    }
    std::vector<double> start(n), value(n > 0 ? n - 1 : 0), end(n > 0 ? n - 1 : 0);
    for_each_index(n, options_.exec, [&](std::size_t i) { start[i] = raw_tau1(s.point(i)); });
    for_each_index(n - 1, options_.exec, [&](std::size_t i) {
      const SegmentResult r = segment(s.point(i), s.point(i + 1), start[i]);
      value[i] = r.value;
      end[i] = r.lift;
    });
    // Stitch the local lifts outward from the origin; a shift of tau1 by
    // 2 pi k changes a segment integral by k dx.
    s.action.assign(n, 0.0);
    s.lift.assign(n, 0.0);
    s.lift[origin] = start[origin];
    for (std::size_t i = origin; i + 1 < n; ++i) {
      const double k = std::round((s.lift[i] - start[i]) / kTwoPi);
      s.action[i + 1] = s.action[i] + value[i] + k * (xs[i + 1] - xs[i]);
      s.lift[i + 1] = end[i] + kTwoPi * k;
    }
    for (std::size_t i = origin; i-- > 0;) {
      const double k = std::round((s.lift[i + 1] - end[i]) / kTwoPi);
      s.action[i] = s.action[i + 1] - (value[i] + k * (xs[i + 1] - xs[i]));
      s.lift[i] = start[i] + kTwoPi * k;
    }
    return s;
  }

 private:
  struct Panel {
    double value = 0.0, lift = 0.0, max_jump = 0.0;
  };

  Panel panel(const Vec2& p, const Vec2& q, double a, double b, double lift, long& budget) const {
    const Rule& rule = gl8();
    const Vec2 d = q - p;
    Panel out;
    for (std::size_t k = 0; k < 8; ++k) {
      if (--budget < 0) fail(ErrorKind::NoConvergence, "action quadrature exceeded its evaluation budget");
      const double u = a + (b - a) * rule.u[k];
      const PeriodLattice t = period_lattice(model_, p + u * d, options_.periods);
      const double l = nearest_branch(t.tau1, lift);
      out.max_jump = std::max(out.max_jump, std::abs(l - lift));
      lift = l;
      out.value += rule.w[k] * (b - a) * (l * d[0] + t.tau2 * d[1]) / kTwoPi;
    }
    out.lift = lift;
    return out;
  }

  // Bisection until two half panels agree with the whole panel and the
  // lifted tau1 moves by less than pi/4 between nodes.
  SegmentResult adaptive(const Vec2& p, const Vec2& q, double a, double b, double lift, int depth,
                         const Panel& whole, double tol, long& budget) const {
    const double mid = 0.5 * (a + b);
    const Panel left = panel(p, q, a, mid, lift, budget);
    const Panel right = panel(p, q, mid, b, left.lift, budget);
    const double jump = std::max(left.max_jump, right.max_jump);
    const bool smooth = jump < std::numbers::pi / 4.0;
    const bool converged = std::abs(left.value + right.value - whole.value) <= tol * (b - a);
    if ((smooth && converged) || depth >= options_.max_depth) {
      if (jump > std::numbers::pi)
        fail(ErrorKind::BranchAmbiguity, "tau1 jumps by " + std::to_string(jump) + " between quadrature nodes");
      return {left.value + right.value, right.lift};
    }
    const SegmentResult l = adaptive(p, q, a, mid, lift, depth + 1, left, tol, budget);
    const SegmentResult r = adaptive(p, q, mid, b, l.lift, depth + 1, right, tol, budget);
    return {l.value + r.value, r.lift};
  }

  const ModelSystem& model_;
  ActionOptions options_;
  std::vector<Vec2> focus_;
  std::vector<int> signs_;
  std::vector<std::pair<double, double>> control_;
};

// Integral along the vertical leg (x, y0) -> (x, y1) up to distance delta
// short of a focus-focus value, plus the logarithmic tail fitted from two
// further nodes.
SegmentResult leg_to_focus(const ModelSystem& model, const ActionIntegrator& integ, const Vec2& start, const Vec2& m,
                           double lift, const ActionOptions& options, double delta) {
  const double dir = m[1] > start[1] ? 1.0 : -1.0;
  const Vec2 stop(m[0], m[1] - dir * delta);
  SegmentResult r = integ.segment(start, stop, lift);
  const double t1 = period_lattice(model, Vec2(m[0], m[1] - dir * delta), options.periods).tau2;
  const double t2 = period_lattice(model, Vec2(m[0], m[1] - dir * 2.0 * delta), options.periods).tau2;
  const double b = (t2 - t1) / std::log(2.0);
  const double a = t1 - b * std::log(delta);
  r.value += dir * delta * (a + b * (std::log(delta) - 1.0)) / kTwoPi;
  return r;
}

// ---- polylines --------------------------------------------------------------

struct Line {
  Vec2 point = Vec2::Zero();
  Vec2 dir = Vec2::UnitX();
  double y_at(double x) const { return point[1] + dir[1] / dir[0] * (x - point[0]); }
};

Vec2 intersect(const Line& a, const Line& b) {
  Mat2 A;
  A << a.dir[0], -b.dir[0], a.dir[1], -b.dir[1];
  const double det = A.determinant();
  if (std::abs(det) < 1e-14) return 0.5 * (a.point + b.point);
  const Vec2 st = A.inverse() * (b.point - a.point);
  return a.point + st[0] * a.dir;
}

Line fit_line(const PointSet& pts, std::size_t first, std::size_t last) {
  Vec2 c = Vec2::Zero();
  for (std::size_t i = first; i <= last; ++i) c += pts[i];
  c /= static_cast<double>(last - first + 1);
  Mat2 S = Mat2::Zero();
  for (std::size_t i = first; i <= last; ++i) S += (pts[i] - c) * (pts[i] - c).transpose();
  Eigen::SelfAdjointEigenSolver<Mat2> es(S);
  Vec2 d = es.eigenvectors().col(1);
  if (d[0] < 0) d = -d;
  return {c, d};
}

double max_residual(const PointSet& pts, std::size_t first, std::size_t last, const Line& l) {
  double r = 0.0;
  const Vec2 n(-l.dir[1], l.dir[0]);
  for (std::size_t i = first; i <= last; ++i) r = std::max(r, std::abs(n.dot(pts[i] - l.point)));
  return r;
}

struct Run {
  std::size_t first = 0, last = 0;
  Line line;
};

// Greedy partition of a chain into maximal runs that fit a line within tol.
std::vector<Run> segment_chain(const PointSet& pts, double tol) {
  std::vector<Run> runs;
  std::size_t i0 = 0;
  while (i0 < pts.size()) {
    std::size_t j = std::min(i0 + 1, pts.size() - 1);
    while (j + 1 < pts.size() && max_residual(pts, i0, j + 1, fit_line(pts, i0, j + 1)) <= tol) ++j;
    if (j == i0) {
      // A trailing single point joins the previous run.
      if (!runs.empty()) {
        runs.back().last = j;
        runs.back().line = fit_line(pts, runs.back().first, j);
      }
      break;
    }
    runs.push_back({i0, j, fit_line(pts, i0, j)});
    i0 = j + 1;
  }
  return runs;
}

std::vector<Vec2> run_vertices(const std::vector<Run>& runs) {
  std::vector<Vec2> v;
  for (std::size_t i = 0; i + 1 < runs.size(); ++i) v.push_back(intersect(runs[i].line, runs[i + 1].line));
  return v;
}

// Drops direction changes that the half-resolution chain does not confirm.
std::vector<Run> persistent_runs(const PointSet& pts, double tol, double radius) {
  std::vector<Run> fine = segment_chain(pts, tol);
  PointSet coarse_pts;
  for (std::size_t i = 0; i < pts.size(); i += 2) coarse_pts.push_back(pts[i]);
  if (coarse_pts.size() < 3) return fine;
  const std::vector<Vec2> coarse = run_vertices(segment_chain(coarse_pts, tol));
  bool changed = true;
  while (changed && fine.size() > 1) {
    changed = false;
    for (std::size_t i = 0; i + 1 < fine.size(); ++i) {
      const Vec2 v = intersect(fine[i].line, fine[i + 1].line);
      const bool confirmed = std::any_of(coarse.begin(), coarse.end(), [&](const Vec2& c) { return (c - v).norm() <= radius; });
      if (!confirmed) {
        fine[i].last = fine[i + 1].last;
        fine[i].line = fit_line(pts, fine[i].first, fine[i].last);
        fine.erase(fine.begin() + static_cast<long>(i) + 1);
        changed = true;
        break;
      }
    }
  }
  return fine;
}

void snap_lines(std::vector<Run>& runs, int max_den, double slope_tol) {
  for (auto& r : runs)
    if (const auto cert = rational_direction(r.line.dir, max_den, slope_tol)) {
      Vec2 d = cert->direction.cast<double>().normalized();
      if (d[0] < 0) d = -d;
      r.line.dir = d;
    }
}

int gcd_int(int a, int b) { return std::gcd(std::abs(a), std::abs(b)); }

void certify_edges(MarkedPolygon& poly, int max_entry, double tol) {
  poly.edges.clear();
  const std::size_t n = poly.vertices.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 d = poly.vertices[(i + 1) % n] - poly.vertices[i];
    poly.edges.push_back(rational_direction(d, max_entry, tol).value_or(EdgeCertificate{}));
  }
}

void mark_cut_vertices(MarkedPolygon& poly) {
  poly.cut_vertex.assign(poly.vertices.size(), false);
  double scale = 1.0;
  for (const auto& v : poly.vertices) scale = std::max(scale, v.cwiseAbs().maxCoeff());
  for (std::size_t l = 0; l < poly.marked_points.size(); ++l) {
    const int sign = l < poly.cut_signs.size() ? poly.cut_signs[l] : 1;
    const Vec2& m = poly.marked_points[l];
    for (std::size_t i = 0; i < poly.vertices.size(); ++i)
      if (std::abs(poly.vertices[i][0] - m[0]) < 1e-4 * scale && sign * (poly.vertices[i][1] - m[1]) > 0)
        poly.cut_vertex[i] = true;
  }
}

void drop_collinear(PointSet& v, double tol) {
  bool changed = true;
  while (changed && v.size() > 3) {
    changed = false;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const Vec2& a = v[(i + v.size() - 1) % v.size()];
      const Vec2& b = v[i];
      const Vec2& c = v[(i + 1) % v.size()];
      const Vec2 u = b - a, w = c - b;
      if (std::abs(u[0] * w[1] - u[1] * w[0]) <= tol * u.norm() * w.norm() || u.norm() < 1e-7 * (1.0 + b.norm())) {
        v.erase(v.begin() + static_cast<long>(i));
        changed = true;
        break;
      }
    }
  }
}

double vertex_hausdorff(const PointSet& a, const PointSet& b) {
  if (a.empty() && b.empty()) return 0.0;
  if (a.empty() || b.empty()) return std::numeric_limits<double>::infinity();
  return hausdorff(a, b, Execution::serial());
}

}  // namespace

// ---- public API ---------------------------------------------------------------

std::vector<Vec2> focus_focus_values(const ModelSystem& model, const Execution& exec) {
  std::vector<Vec2> out;
  auto add = [&](const CriticalPoint& cp) {
    if (cp.rank != 0 || cp.type != SingularityType::FocusFocus) return;
    for (const auto& v : out)
      if ((v - cp.value).norm() < 1e-7) return;
    out.push_back(cp.value);
  };
  if (model.dof() != 2) return out;
  for (const auto& x : model.metadata().fixed_points) add(classify(model, model.point(x)));
  CriticalSearchOptions o;
  o.exec = exec;
  for (const auto& cp : find_critical_points(model, o).points) add(cp);
  std::sort(out.begin(), out.end(), [](const Vec2& a, const Vec2& b) { return a[0] < b[0]; });
  return out;
}

double second_action(const ModelSystem& model, const Vec2& c, const Vec2& anchor, const std::vector<int>& cut_signs,
                     const ActionOptions& options) {
  const ActionIntegrator integ(model, cut_signs, options);
  integ.check_regular(c, image_slice(model, c[0]));
  integ.check_regular(anchor, image_slice(model, anchor[0]));
  const double span = std::abs(c[0] - anchor[0]);
  const Interval range = f1_range(model);
  const int segments = std::max(1, static_cast<int>(std::ceil(options.spine_nodes * span / std::max(range.length(), 1e-12))));
  std::vector<double> xs;
  for (int i = 0; i <= segments; ++i) xs.push_back(std::min(anchor[0], c[0]) + span * i / segments);
  const std::size_t origin = anchor[0] <= c[0] ? 0 : xs.size() - 1;
  const std::size_t target = xs.size() - 1 - origin;
  const Spine s = integ.spine(xs, origin);

  integ.check_leg(anchor[0], s.ys[origin], anchor[1]);
  integ.check_leg(c[0], s.ys[target], c[1]);
  const SegmentResult a = integ.segment(s.point(origin), anchor, s.lift[origin]);
  const SegmentResult b = integ.segment(s.point(target), c, s.lift[target]);
  const double k = -std::round(a.lift / kTwoPi);
  return anchor[1] + s.action[target] + b.value - a.value + k * (c[0] - anchor[0]);
}

double action_loop_integral(const ModelSystem& model, const PointSet& loop, const ActionOptions& options) {
  if (loop.size() < 3) fail(ErrorKind::BadParameter, "a loop needs at least 3 vertices");
  const ActionIntegrator integ(model, {}, options);
  double lift = principal(integ.raw_tau1(loop.front()));
  double total = 0.0;
  for (std::size_t i = 0; i < loop.size(); ++i) {
    const SegmentResult r = integ.segment(loop[i], loop[(i + 1) % loop.size()], lift);
    total += r.value;
    lift = r.lift;
  }
  return total;
}

Vec2 ActionChart::node(int ix, int iy) const {
  return {box.lo[0] + (ix + 0.5) * (box.hi[0] - box.lo[0]) / nx, box.lo[1] + (iy + 0.5) * (box.hi[1] - box.lo[1]) / ny};
}

bool ActionChart::valid(int ix, int iy) const { return std::isfinite(value(ix, iy)); }

ActionChart action_chart(const ModelSystem& model, const std::vector<int>& cut_signs, int resolution,
                         const ActionOptions& options) {
  if (resolution < 3) fail(ErrorKind::BadParameter, "chart resolution must be >= 3");
  const ActionIntegrator integ(model, cut_signs, options);
  const Interval range = f1_range(model);
  ActionChart chart;
  chart.cut_signs = integ.signs();
  chart.focus_values = integ.focus();
  chart.nx = chart.ny = resolution;
  const double dx = range.length() / resolution;
  std::vector<double> xs;
  for (int i = 0; i < resolution; ++i) xs.push_back(range.lo + (i + 0.5) * dx);
  const std::size_t origin = xs.size() / 2;
  const Spine s = integ.spine(xs, origin);
  double ylo = std::numeric_limits<double>::infinity(), yhi = -ylo;
  for (const auto& sl : s.slices) {
    ylo = std::min(ylo, sl.lo);
    yhi = std::max(yhi, sl.hi);
  }
  chart.box = {Vec2(range.lo, ylo), Vec2(range.hi, yhi)};
  chart.anchor = s.point(origin);
  const double dy = (yhi - ylo) / resolution;
  const double k = -std::round(s.lift[origin] / kTwoPi);

  auto on_cut_side = [&](const Vec2& c, std::size_t l) {
    return chart.cut_signs[l] * (c[1] - chart.focus_values[l][1]) > 0.0;
  };
  auto excluded = [&](int ix, const Vec2& c) {
    const Interval& sl = s.slices[static_cast<std::size_t>(ix)];
    const double margin = 0.02 * sl.length() + 1e-9;
    if (!(c[1] > sl.lo + margin && c[1] < sl.hi - margin)) return true;
    for (std::size_t l = 0; l < chart.focus_values.size(); ++l) {
      const Vec2& m = chart.focus_values[l];
      if ((c - m).norm() < 0.5 * std::min(dx, dy)) return true;
      if (std::abs(c[0] - m[0]) < 0.25 * dx && on_cut_side(c, l)) return true;
    }
    return false;
  };

  const std::size_t total = static_cast<std::size_t>(resolution * resolution);
  chart.i2.assign(total, kNaN);
  chart.tau1.assign(total, kNaN);
  for_each_index(total, options.exec, [&](std::size_t idx) {
    const int ix = static_cast<int>(idx) % resolution, iy = static_cast<int>(idx) / resolution;
    const Vec2 c = chart.node(ix, iy);
    if (excluded(ix, c)) return;
    const std::size_t i = static_cast<std::size_t>(ix);
    integ.check_leg(c[0], s.ys[i], c[1]);
    const SegmentResult leg = integ.segment(s.point(i), c, s.lift[i]);
    chart.i2[idx] = chart.anchor[1] + s.action[i] + leg.value + k * (c[0] - chart.anchor[0]);
    chart.tau1[idx] = leg.lift + kTwoPi * k;
  });

  // Closure check on grid edges that neither cross a cut nor pass a focus value.
  struct Edge {
    int a, b;
  };
  std::vector<Edge> edges;
  for (int iy = 0; iy < resolution; ++iy)
    for (int ix = 0; ix < resolution; ++ix) {
      const int a = iy * resolution + ix;
      if (!chart.valid(ix, iy)) continue;
      if (ix + 1 < resolution && chart.valid(ix + 1, iy)) {
        const Vec2 p = chart.node(ix, iy), q = chart.node(ix + 1, iy);
        const Interval& s0 = s.slices[static_cast<std::size_t>(ix)];
        const Interval& s1 = s.slices[static_cast<std::size_t>(ix) + 1];
        bool ok = p[1] > std::max(s0.lo, s1.lo) && p[1] < std::min(s0.hi, s1.hi);
        for (std::size_t l = 0; l < chart.focus_values.size() && ok; ++l) {
          const Vec2& m = chart.focus_values[l];
          if (m[0] > p[0] && m[0] < q[0] && (on_cut_side(p, l) || std::abs(p[1] - m[1]) < 0.5 * dy)) ok = false;
        }
        if (ok) edges.push_back({a, a + 1});
      }
      if (iy + 1 < resolution && chart.valid(ix, iy + 1)) {
        const Vec2 p = chart.node(ix, iy);
        bool ok = true;
        for (const auto& m : chart.focus_values)
          if (std::abs(p[0] - m[0]) < 0.5 * dx && m[1] > p[1] - 0.5 * dy && m[1] < p[1] + 1.5 * dy) ok = false;
        if (ok) edges.push_back({a, a + resolution});
      }
    }
  std::vector<double> defect(edges.size(), 0.0);
  for_each_index(edges.size(), options.exec, [&](std::size_t e) {
    const int a = edges[e].a, b = edges[e].b;
    const Vec2 p = chart.node(a % resolution, a / resolution), q = chart.node(b % resolution, b / resolution);
    const SegmentResult r = integ.segment(p, q, chart.tau1[static_cast<std::size_t>(a)]);
    defect[e] = std::abs(chart.i2[static_cast<std::size_t>(b)] - chart.i2[static_cast<std::size_t>(a)] - r.value);
  });
  chart.checked_edges = static_cast<int>(edges.size());
  for (double d : defect) chart.closure_defect = std::max(chart.closure_defect, d);
  return chart;
}

MarkedPolygon build_polygon(const ModelSystem& model, const std::vector<int>& cut_signs, int resolution,
                            const PolygonOptions& options) {
  if (resolution < 8) fail(ErrorKind::BadParameter, "polygon resolution must be >= 8");
  MarkedPolygon poly;
  const Interval range = f1_range(model);
  if (model.dof() == 1) {
    if (!model.flags().toric) fail(ErrorKind::BadParameter, "model '" + model.id() + "' is not toric");
    poly.vertices = {Vec2(range.lo, range.lo), Vec2(range.hi, range.hi)};
    certify_edges(poly, options.max_denominator, options.slope_tol);
    poly.cut_vertex.assign(2, false);
    return poly;
  }
  const ActionIntegrator integ(model, cut_signs, options.action);
  const auto& focus = integ.focus();
  poly.cut_signs = integ.signs();
  poly.twisting_labels.assign(focus.size(), std::nullopt);
  const double width = range.length();

  // Columns split at the abscissas of rank-0 values so that no column
  // straddles a corner; nodes are Chebyshev points inside each piece.
  std::vector<double> breaks{range.lo, range.hi};
  for (const auto& v : singular_values(model, options.action.exec))
    if (v[0] > range.lo + 1e-9 * width && v[0] < range.hi - 1e-9 * width) breaks.push_back(v[0]);
  for (const auto& m : focus) breaks.push_back(m[0]);
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end(), [&](double a, double b) { return b - a < 1e-9 * width; }),
               breaks.end());
  std::vector<double> xs;
  for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
    const double lo = breaks[p], hi = breaks[p + 1];
    const int n = std::max(6, static_cast<int>(std::lround(resolution * (hi - lo) / width)));
    for (int i = 0; i < n; ++i) xs.push_back(lo + 0.5 * (hi - lo) * (1.0 - std::cos(std::numbers::pi * (i + 0.5) / n)));
  }
  const std::size_t origin = xs.size() / 2;
  const Spine s = integ.spine(xs, origin);
  const Vec2 anchor = s.point(origin);
  const double k = -std::round(s.lift[origin] / kTwoPi);
  auto shift = [&](double x) { return anchor[1] + k * (x - anchor[0]); };

  const std::size_t n = xs.size();
  PointSet lower(n), upper(n);
  for_each_index(2 * n, options.action.exec, [&](std::size_t idx) {
    const std::size_t i = idx / 2;
    const bool up = idx % 2 == 1;
    const Vec2 top(xs[i], up ? s.slices[i].hi : s.slices[i].lo);
    const SegmentResult r = integ.segment(s.point(i), top, s.lift[i]);
    (up ? upper : lower)[i] = Vec2(xs[i], shift(xs[i]) + s.action[i] + r.value);
  });

  // Marked points: I2 at the focus-focus value as a limit along its column.
  for (std::size_t l = 0; l < focus.size(); ++l) {
    const Vec2& m = focus[l];
    const std::size_t j = static_cast<std::size_t>(
        std::min_element(xs.begin(), xs.end(), [&](double a, double b) { return std::abs(a - m[0]) < std::abs(b - m[0]); }) -
        xs.begin());
    const Interval sl = image_slice(model, m[0]);
    const Vec2 foot(m[0], sl.lo + integ.fraction(m[0]) * sl.length());
    const SegmentResult along = integ.segment(s.point(j), foot, s.lift[j]);
    const SegmentResult leg = leg_to_focus(model, integ, foot, m, along.lift, options.action, 1e-5 * sl.length());
    poly.marked_points.push_back(Vec2(m[0], shift(m[0]) + s.action[j] + along.value + leg.value));
  }

  double diameter = width;
  for (std::size_t i = 0; i < n; ++i) diameter = std::max(diameter, upper[i][1] - lower[i][1]);
  const double tol = options.line_tol * diameter;
  double gap = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) gap = std::max(gap, xs[i + 1] - xs[i]);
  std::vector<Run> lo_runs = persistent_runs(lower, tol, 2.0 * gap);
  std::vector<Run> hi_runs = persistent_runs(upper, tol, 2.0 * gap);
  snap_lines(lo_runs, options.max_denominator, options.slope_tol);
  snap_lines(hi_runs, options.max_denominator, options.slope_tol);

  // Vertices where the two chains meet a vertical end, bottom first.
  auto end_vertices = [&](double x, const Line& lo, const Line& hi) -> PointSet {
    const double ylo = lo.y_at(x), yhi = hi.y_at(x);
    if (yhi - ylo > tol) return {Vec2(x, ylo), Vec2(x, yhi)};
    return {intersect(lo, hi)};
  };
  // Counter-clockwise: lower chain left to right, right end, upper chain back.
  const PointSet left = end_vertices(range.lo, lo_runs.front().line, hi_runs.front().line);
  const PointSet right = end_vertices(range.hi, lo_runs.back().line, hi_runs.back().line);
  PointSet v{left.front()};
  for (const auto& p : run_vertices(lo_runs)) v.push_back(p);
  v.insert(v.end(), right.begin(), right.end());
  const auto up_vertices = run_vertices(hi_runs);
  for (auto it = up_vertices.rbegin(); it != up_vertices.rend(); ++it) v.push_back(*it);
  if (left.size() == 2) v.push_back(left.back());
  drop_collinear(v, 1e-9);
  poly.vertices = v;
  certify_edges(poly, options.max_denominator, options.slope_tol);
  mark_cut_vertices(poly);

  for (const auto& m : poly.marked_points) {
    const auto lo_it = std::find_if(lo_runs.begin(), lo_runs.end(), [&](const Run& r) { return lower[r.last][0] >= m[0]; });
    const auto hi_it = std::find_if(hi_runs.begin(), hi_runs.end(), [&](const Run& r) { return upper[r.last][0] >= m[0]; });
    const double ylo = (lo_it == lo_runs.end() ? lo_runs.back() : *lo_it).line.y_at(m[0]);
    const double yhi = (hi_it == hi_runs.end() ? hi_runs.back() : *hi_it).line.y_at(m[0]);
    if (!(m[1] > ylo && m[1] < yhi) || !point_in_polygon(m, poly.vertices))
      fail(ErrorKind::NoConvergence, "marked point (" + std::to_string(m[0]) + ", " + std::to_string(m[1]) +
                                         ") is not inside the computed polygon");
  }
  return poly;
}

std::optional<EdgeCertificate> rational_direction(const Vec2& d, int max_entry, double tol) {
  if (!(d.norm() > 0.0) || !d.allFinite()) return std::nullopt;
  const bool steep = std::abs(d[1]) > std::abs(d[0]);
  const double r = steep ? d[0] / d[1] : d[1] / d[0];
  for (int q = 1; q <= max_entry; ++q) {
    const int p = static_cast<int>(std::lround(r * q));
    const double err = std::abs(r - static_cast<double>(p) / q);
    if (err <= tol && gcd_int(p, q) == 1) {
      EdgeCertificate c;
      c.direction = steep ? Vec2i(p, q) : Vec2i(q, p);
      if (c.direction.cast<double>().dot(d) < 0) c.direction = -c.direction;
      c.slope_error = err;
      c.rational = true;
      return c;
    }
  }
  return std::nullopt;
}

DelzantCertificate delzant_check(const MarkedPolygon& poly) {
  const std::size_t n = poly.vertices.size();
  if (n < 3) fail(ErrorKind::BadParameter, "Delzant check needs at least 3 vertices");
  DelzantCertificate cert;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 d = poly.vertices[(i + 1) % n] - poly.vertices[i];
    const auto e = rational_direction(d, 64, 1e-4);
    if (!e)
      fail(ErrorKind::NonRationalEdge, "edge " + std::to_string(i) + " direction (" + std::to_string(d[0]) + ", " +
                                           std::to_string(d[1]) + ") is not rational within 1e-4");
    cert.directions.push_back(e->direction);
  }
  cert.determinants.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (i < poly.cut_vertex.size() && poly.cut_vertex[i]) continue;
    const Vec2i out = cert.directions[i];
    const Vec2i in = -cert.directions[(i + n - 1) % n];
    cert.determinants[i] = out[0] * in[1] - out[1] * in[0];
    if (std::abs(cert.determinants[i]) != 1) cert.violating.push_back(static_cast<int>(i));
  }
  cert.pass = cert.violating.empty();
  return cert;
}

MarkedPolygon transform(const MarkedPolygon& poly, const Eigen::Matrix2d& A, const Vec2& t) {
  MarkedPolygon out = poly;
  for (auto& v : out.vertices) v = A * v + t;
  for (auto& m : out.marked_points) m = A * m + t;
  if (A.determinant() < 0 && out.vertices.size() > 2) std::reverse(out.vertices.begin(), out.vertices.end());
  certify_edges(out, 64, 1e-6);
  mark_cut_vertices(out);
  return out;
}

MarkedPolygon cut_shear(const MarkedPolygon& poly, double x0, int power) {
  MarkedPolygon out = poly;
  auto map = [&](Vec2 p) {
    if (p[0] > x0) p[1] += power * (p[0] - x0);
    return p;
  };
  double scale = 1.0;
  for (const auto& p : poly.vertices) scale = std::max(scale, p.cwiseAbs().maxCoeff());
  // Vertices numerically on the cut line are taken to lie on it.
  PointSet src = poly.vertices;
  for (auto& p : src)
    if (std::abs(p[0] - x0) < 1e-7 * scale) p[0] = x0;
  PointSet v;
  const std::size_t n = src.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = src[i], b = src[(i + 1) % n];
    v.push_back(map(a));
    if ((a[0] - x0) * (b[0] - x0) < 0) {
      const double s = (x0 - a[0]) / (b[0] - a[0]);
      v.push_back(map(a + s * (b - a)));
    }
  }
  if (n > 2) drop_collinear(v, 1e-9);
  out.vertices = v;
  for (auto& m : out.marked_points) m = map(m);
  certify_edges(out, 64, 1e-6);
  mark_cut_vertices(out);
  return out;
}

bool polygon_equivalence(const MarkedPolygon& P, const MarkedPolygon& Q, double tol) {
  if (P.marked_points.size() != Q.marked_points.size()) return false;
  if (P.vertices.empty() || Q.vertices.empty()) return P.vertices.size() == Q.vertices.size();

  std::vector<Eigen::Matrix2d> matrices;
  for (int k = -3; k <= 3; ++k) {
    Eigen::Matrix2d S;
    S << 1, 0, k, 1;
    matrices.push_back(S);
  }
  // Toric inputs: integral matrices sending the two edge directions at the
  // first vertex of P to those at some vertex of Q.
  if (P.marked_points.empty() && P.vertices.size() >= 3 && Q.vertices.size() >= 3) {
    auto corner = [](const PointSet& v, std::size_t i) -> std::optional<Eigen::Matrix2d> {
      const std::size_t n = v.size();
      const auto a = rational_direction(v[(i + 1) % n] - v[i], 64, 1e-4);
      const auto b = rational_direction(v[(i + n - 1) % n] - v[i], 64, 1e-4);
      if (!a || !b) return std::nullopt;
      Eigen::Matrix2d M;
      M.col(0) = a->direction.cast<double>();
      M.col(1) = b->direction.cast<double>();
      return M;
    };
    if (const auto U = corner(P.vertices, 0); U && std::abs(U->determinant()) > 0.5) {
      for (std::size_t j = 0; j < Q.vertices.size(); ++j) {
        const auto W = corner(Q.vertices, j);
        if (!W) continue;
        Eigen::Matrix2d Wswap;
        Wswap.col(0) = W->col(1);
        Wswap.col(1) = W->col(0);
        for (const auto& Wc : {*W, Wswap}) {
          const Eigen::Matrix2d A = Wc * U->inverse();
          const Eigen::Matrix2d R = A.array().round().matrix();
          if ((A - R).cwiseAbs().maxCoeff() < 1e-6 && std::abs(std::abs(R.determinant()) - 1.0) < 1e-9)
            matrices.push_back(R);
        }
      }
    }
  }

  // Cut-orbit variants of P: shear powers in {-1, 0, 1} at each marked abscissa.
  std::vector<MarkedPolygon> variants{P};
  if (P.marked_points.size() <= 3)
    for (const auto& m : P.marked_points) {
      std::vector<MarkedPolygon> next;
      for (const auto& V : variants)
        for (int u : {-1, 0, 1}) next.push_back(u == 0 ? V : cut_shear(V, m[0], u));
      variants = std::move(next);
    }

  for (const auto& V : variants)
    for (const auto& A : matrices) {
      const MarkedPolygon R = transform(V, A, Vec2::Zero());
      std::vector<Vec2> shifts;
      if (!R.marked_points.empty()) shifts.push_back(Q.marked_points.front() - R.marked_points.front());
      for (const auto& q : Q.vertices) shifts.push_back(q - R.vertices.front());
      for (const auto& t : shifts) {
        PointSet rv = R.vertices, rm = R.marked_points;
        for (auto& p : rv) p += t;
        for (auto& p : rm) p += t;
        if (vertex_hausdorff(rv, Q.vertices) < tol && vertex_hausdorff(rm, Q.marked_points) < tol) return true;
      }
    }
  return false;
}

}  // namespace semitoric
