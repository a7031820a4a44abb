#include "semitoric/fibration.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/math/tools/roots.hpp>

#include "semitoric/dynamics.hpp"
#include "semitoric/error.hpp"
#include "semitoric/halton.hpp"
#include "semitoric/image.hpp"
#include "semitoric/singularity.hpp"

namespace semitoric {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string str(const Vec2& c) {
  std::ostringstream os;
  os.precision(10);
  os << "(" << c[0] << ", " << c[1] << ")";
  return os.str();
}

// Residual of the level-set equations; one-dof models only see f1.
Vec level_residual(const ModelSystem& model, const Vec& x, const Vec2& c) {
  const Vec2 v = model.value(x) - c;
  if (model.dof() == 1) return v.head<1>();
  return v;
}

Mat tangent_jacobian(const ModelSystem& model, const Vec& x) {
  const int rows = model.dof() == 1 ? 1 : 2;
  Mat J(rows, x.size());
  for (int k = 0; k < rows; ++k) J.row(k) = model.chart().project_tangent(x, model.gradient(k + 1, x)).transpose();
  return J;
}

// Minimum-norm Gauss-Newton with backtracking on |F - c|.
bool newton_to_level(const ModelSystem& model, Vec& x, const Vec2& c, const FiberOptions& opt) {
  const Chart& chart = model.chart();
  Vec r = level_residual(model, x, c);
  double norm = r.norm();
  for (int it = 0; it < opt.max_iterations && norm >= opt.tol; ++it) {
    const Mat J = tangent_jacobian(model, x);
    const Vec delta = -J.completeOrthogonalDecomposition().solve(r);
    double step = 1.0;
    bool improved = false;
    for (int k = 0; k < 30; ++k, step *= 0.5) {
      const Vec xn = chart.project(x + step * delta);
      const Vec rn = level_residual(model, xn, c);
      if (rn.norm() < norm) {
        x = xn;
        r = rn;
        norm = rn.norm();
        improved = true;
        break;
      }
    }
    if (!improved) break;
  }
  return norm < opt.tol;
}

double smallest_singular_value(const Mat& J) {
  Eigen::JacobiSVD<Mat> svd(J);
  return svd.singularValues()[svd.singularValues().size() - 1];
}

}  // namespace

PhasePoint solve_fiber_point(const ModelSystem& model, const Vec2& c, const std::optional<PhasePoint>& seed,
                             const FiberOptions& options) {
  for (const Vec2& v : model.fixed_point_values())
    if ((v - c).norm() < 1e-9) fail(ErrorKind::SingularValue, "value " + str(c) + " is the image of a fixed point");

  std::vector<Vec> starts;
  if (seed) {
    model.check_on_manifold(seed->coords);
    starts.push_back(seed->coords);
  } else {
    const Halton h(model.sample_dimension(), options.seed + 3);
    std::vector<std::pair<double, Vec>> ranked;
    for (int i = 0; i < options.candidates; ++i) {
      Vec x = model.chart().project(model.sample(h.point(static_cast<std::uint64_t>(i))));
      ranked.emplace_back(level_residual(model, x, c).norm(), std::move(x));
    }
    std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (int i = 0; i < options.attempts && i < static_cast<int>(ranked.size()); ++i) starts.push_back(ranked[i].second);
  }
  for (Vec x : starts) {
    if (!newton_to_level(model, x, c, options)) continue;
    if (smallest_singular_value(tangent_jacobian(model, x)) < 1e-8)
      fail(ErrorKind::SingularValue, "dF is rank deficient on the fiber over " + str(c));
    return PhasePoint{x, model.id()};
  }
  fail(ErrorKind::NoConvergence, "no point found on the fiber over " + str(c));
}

PeriodLattice period_lattice(const ModelSystem& model, const Vec2& c, const PeriodOptions& options) {
  const PhasePoint A = solve_fiber_point(model, c, std::nullopt, options.fiber);
  return period_lattice_from(model, A, options);
}

PeriodLattice period_lattice_from(const ModelSystem& model, const PhasePoint& base, const PeriodOptions& options) {
  const Chart& chart = model.chart();
  model.check_on_manifold(base.coords);
  const Vec& A = base.coords;
  const Vec2 c = model.value(A);
  const bool one_dof = model.dof() == 1;
  const int pj = model.periodic_component();
  const int ph = one_dof ? 1 : 3 - pj;

  double horizon = options.horizon;
  if (horizon <= 0.0) {
    double r = std::numeric_limits<double>::infinity();
    for (const Vec2& v : model.fixed_point_values()) r = std::min(r, (v - c).norm());
    const double logr = std::isfinite(r) && r > 0 ? std::abs(std::log(r)) : 0.0;
    horizon = kTwoPi * (50.0 + 5.0 * logr);
  }

  const Vec XA = model.field(ph, A);
  if (XA.norm() < 1e-12) fail(ErrorKind::SingularValue, "flow is stationary at the base point over " + str(c));

  // Point of the circle orbit through y nearest to A, with its parameter:
  // z = circle(y, -s). One-dof models do not quotient by a circle.
  struct Aligned {
    Vec z;
    double s;
  };
  double s_warm = 0.0;
  auto residual_at = [&](const Vec& y, double s) { return Vec(chart.gauge_fix(model.circle(y, -s), A) - A); };
  auto align = [&](const Vec& y, bool scan) -> Aligned {
    if (one_dof) return {chart.gauge_fix(y, A), 0.0};
    double s = s_warm;
    if (scan) {
      double best = residual_at(y, s).squaredNorm();
      for (int k = 0; k < 24; ++k) {
        const double sk = kTwoPi * k / 24.0;
        const double d = residual_at(y, sk).squaredNorm();
        if (d < best) {
          best = d;
          s = sk;
        }
      }
    }
    const double h = 1e-4;
    for (int it = 0; it < 8; ++it) {
      const Vec r = residual_at(y, s);
      const Vec dr = (residual_at(y, s + h) - residual_at(y, s - h)) / (2.0 * h);
      const double den = dr.squaredNorm();
      if (den < 1e-300) break;
      const double delta = -r.dot(dr) / den;
      s += delta;
      if (std::abs(delta) < 1e-14) break;
    }
    return {chart.gauge_fix(model.circle(y, -s), A), s};
  };
  auto event = [&](const Aligned& a) { return (a.z - A).dot(XA); };

  FlowOptions fo;
  fo.tol = options.tol;
  fo.max_step = options.max_step;
  Trajectory traj(chart, [&model, ph](const Vec& x) { return Vec(model.field(ph, x)); }, A, fo);

  Aligned prev = align(A, false);
  double g_prev = event(prev);
  double d_prev = 0.0;
  while (traj.time() < horizon) {
    traj.advance(horizon);
    const Vec& y = traj.state();
    const Aligned cur = align(y, true);
    s_warm = cur.s;
    const double g = event(cur);
    const double d = (cur.z - A).norm();
    const double step_len = (y - traj.previous_state()).norm();
    if (g_prev < 0.0 && g >= 0.0 && std::max(d_prev, d) <= 1.5 * step_len + 1e-9) {
      const double t0 = traj.previous_time();
      const double dt_full = traj.time() - t0;
      s_warm = prev.s;
      auto g_of = [&](double dt) {
        const Aligned a = align(traj.probe(dt), false);
        return event(a);
      };
      double lo = 0.0, hi = dt_full;
      const double glo = g_of(lo), ghi = g_of(hi);
      double root;
      if (glo == 0.0)
        root = lo;
      else if (ghi == 0.0 || glo * ghi > 0.0)
        root = hi;
      else {
        std::uintmax_t iters = 100;
        const auto bracket = boost::math::tools::toms748_solve(
            g_of, lo, hi, glo, ghi,
            [](double a, double b) { return std::abs(b - a) <= 1e-15 * std::max(1.0, std::abs(a)); }, iters);
        root = 0.5 * (bracket.first + bracket.second);
      }
      s_warm = prev.s;
      const Aligned at = align(traj.probe(root), false);
      PeriodLattice out;
      out.c = c;
      out.tau2 = t0 + root;
      out.tau1 = one_dof ? 0.0 : std::fmod(std::fmod(-at.s, kTwoPi) + kTwoPi, kTwoPi);
      if (out.tau1 >= kTwoPi) out.tau1 -= kTwoPi;
      out.residual = chart.distance(at.z, A);
      out.steps = traj.steps();
      return out;
    }
    prev = cur;
    g_prev = g;
    d_prev = d;
  }
  fail(ErrorKind::ReturnNotFound, "no return to the base orbit over " + str(c) + " before time " +
                                      std::to_string(horizon));
}

std::vector<Vec2> singular_values(const ModelSystem& model, const Execution& exec) {
  std::vector<Vec2> out = model.fixed_point_values();
  CriticalSearchOptions opt;
  opt.exec = exec;
  for (const auto& p : find_critical_points(model, opt).points) {
    if (p.rank != 0) continue;
    const bool dup = std::any_of(out.begin(), out.end(), [&](const Vec2& v) { return (v - p.value).norm() < 1e-6; });
    if (!dup) out.push_back(p.value);
  }
  return out;
}

std::vector<Vec2> regular_grid(const ModelSystem& model, const Box& bbox, int resolution, double exclusion_radius,
                               const Execution& exec) {
  if (resolution < 1) fail(ErrorKind::BadParameter, "resolution must be >= 1");
  if (!(exclusion_radius >= 0)) fail(ErrorKind::BadParameter, "exclusion radius must be >= 0");
  const std::vector<Vec2> sing = singular_values(model, exec);
  const Interval range = f1_range(model);
  const double margin = exclusion_radius;
  const int n = resolution;
  const double dx = (bbox.hi[0] - bbox.lo[0]) / n;
  const double dy = (bbox.hi[1] - bbox.lo[1]) / n;
  auto clear_of_singular = [&](const Vec2& v) {
    return std::none_of(sing.begin(), sing.end(), [&](const Vec2& s) { return (s - v).norm() < exclusion_radius; });
  };

  std::vector<Vec2> out;
  if (model.dof() == 1) {
    for (int i = 0; i < n; ++i) {
      const double x = bbox.lo[0] + (i + 0.5) * dx;
      const Vec2 v(x, x);
      if (x > range.lo + margin && x < range.hi - margin && clear_of_singular(v)) out.push_back(v);
    }
  } else {
    std::vector<std::vector<Vec2>> columns(static_cast<std::size_t>(n));
    for_each_index(columns.size(), exec, [&](std::size_t i) {
      const double x = bbox.lo[0] + (static_cast<double>(i) + 0.5) * dx;
      if (!(x > range.lo + margin && x < range.hi - margin)) return;
      const Interval slice = image_slice(model, x);
      for (int j = 0; j < n; ++j) {
        const double y = bbox.lo[1] + (j + 0.5) * dy;
        const Vec2 v(x, y);
        if (y > slice.lo + margin && y < slice.hi - margin && clear_of_singular(v)) columns[i].push_back(v);
      }
    });
    for (const auto& col : columns) out.insert(out.end(), col.begin(), col.end());
  }
  if (out.empty()) fail(ErrorKind::EmptyGrid, "no regular values of the image inside the box");
  return out;
}

}  // namespace semitoric
