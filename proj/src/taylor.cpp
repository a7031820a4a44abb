#include "semitoric/taylor.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "semitoric/error.hpp"
#include "semitoric/local_frame.hpp"

namespace semitoric {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * kPi;

using Cplx = std::complex<double>;

double wrap_2pi(double a) {
  double r = std::fmod(a, kTwoPi);
  if (r < 0) r += kTwoPi;
  return r >= kTwoPi ? r - kTwoPi : r;
}

// Representative of a modulo 2pi nearest to ref.
double nearest_branch(double a, double ref) { return a - kTwoPi * std::round((a - ref) / kTwoPi); }

}  // namespace

Normalization normalize_quadratic(const ModelSystem& model, const CriticalPoint& m) {
  if (m.type != SingularityType::FocusFocus)
    fail(ErrorKind::NotFocusFocus, "normalization requires a focus-focus point, got " + to_string(m.type));
  const Linearization lin = linearize(model, m.point.coords);

  // A generic combination has simple eigenvalues; its eigenvectors are
  // joint eigenvectors of the commuting pair (A1, A2).
  const Mat G = lin.A1 + 0.618 * lin.A2;
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(G.cast<Cplx>());
  Normalization out;
  out.point = m.point.coords;
  out.value = model.value(m.point.coords);
  out.frame = lin.frame;
  int chosen = -1;
  for (int k = 0; k < es.eigenvectors().cols(); ++k) {
    const Eigen::VectorXcd v = es.eigenvectors().col(k);
    const double vv = v.squaredNorm();
    const Cplx mu1 = v.dot(lin.A1.cast<Cplx>() * v) / vv;
    const Cplx mu2 = v.dot(lin.A2.cast<Cplx>() * v) / vv;
    out.mu1.push_back(mu1);
    out.mu2.push_back(mu2);
    if (mu1.imag() > 0 && (chosen < 0 || mu2.real() > out.mu2[static_cast<std::size_t>(chosen)].real())) chosen = k;
  }
  if (chosen < 0) fail(ErrorKind::NotFocusFocus, "f1 has no rotation eigenvalue at the point");
  const Cplx mu1 = out.mu1[static_cast<std::size_t>(chosen)];
  const Cplx mu2 = out.mu2[static_cast<std::size_t>(chosen)];
  out.kappa = std::abs(mu1.imag());
  out.alpha = mu2.imag() / mu1.imag();
  out.beta = std::abs(mu2.real());
  if (std::abs(out.kappa - 1.0) > 1e-4)
    fail(ErrorKind::IllConditioned, "f1 linearizes with frequency " + std::to_string(out.kappa) + ", expected 1");
  if (!(out.beta > 0))
    fail(ErrorKind::NotFocusFocus, "f2 has no hyperbolic part at the point");
  out.raw_from_normalized << 1.0, 0.0, out.alpha, out.beta;
  out.normalized_from_raw << 1.0, 0.0, -out.alpha / out.beta, 1.0 / out.beta;
  Eigen::JacobiSVD<Mat2> svd(out.raw_from_normalized);
  out.condition = svd.singularValues()[0] / svd.singularValues()[1];
  if (out.condition > 1e6)
    fail(ErrorKind::IllConditioned, "value-space map has condition number " + std::to_string(out.condition));
  return out;
}

std::vector<SigmaSample> regularized_periods(const ModelSystem& model, const Normalization& norm, double ray_angle,
                                             const std::vector<double>& radii, const PeriodSource& source,
                                             const Execution& exec) {
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0)) fail(ErrorKind::BadParameter, "radii must be positive");
    if (i > 0 && !(radii[i] < radii[i - 1])) fail(ErrorKind::BadParameter, "radii must be decreasing");
  }
  const PeriodSource periods = source ? source : [&model](const Vec2& v) { return period_lattice(model, v); };
  const Vec2 dir(std::cos(ray_angle), std::sin(ray_angle));
  std::vector<SigmaSample> out(radii.size());
  for_each_index(radii.size(), exec, [&](std::size_t i) {
    SigmaSample& s = out[i];
    s.r = radii[i];
    s.c = s.r * dir;
    const PeriodLattice lat = periods(norm.raw(s.c));
    const Vec2 tau = norm.normalized_periods(lat.tau1, lat.tau2);
    s.tau1 = tau[0];
    s.tau2 = tau[1];
    s.sigma1 = kPi / 2.0 - (tau[0] + std::atan2(s.c[1], s.c[0]));
    s.sigma2 = tau[1] + std::log(s.r);
  });
  // tau1 is only defined mod 2pi; continue sigma1 from the first radius.
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i].sigma1 = i == 0 ? nearest_branch(out[i].sigma1, 0.0) : nearest_branch(out[i].sigma1, out[i - 1].sigma1);
  return out;
}

double extrapolate_to_zero(const std::vector<double>& r, const std::vector<double>& y, double* max_residual) {
  if (r.size() != y.size() || r.size() < 3) fail(ErrorKind::BadParameter, "extrapolation needs >= 3 samples");
  const Eigen::Index n = static_cast<Eigen::Index>(r.size());
  Mat A(n, 3);
  Vec b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double ri = r[static_cast<std::size_t>(i)];
    A(i, 0) = 1.0;
    A(i, 1) = ri * std::log(ri);
    A(i, 2) = ri;
    b[i] = y[static_cast<std::size_t>(i)];
  }
  const Vec coef = A.colPivHouseholderQr().solve(b);
  if (max_residual) *max_residual = (A * coef - b).cwiseAbs().maxCoeff();
  return coef[0];
}

std::vector<double> default_radii() {
  std::vector<double> r;
  for (int i = 0; i <= 6; ++i) r.push_back(0.04 * std::pow(2.0, -i));
  return r;
}

TaylorLinear taylor_linear(const ModelSystem& model, const CriticalPoint& m, const TaylorOptions& options,
                           const PeriodSource& source) {
  if (options.rays < 4) fail(ErrorKind::BadParameter, "at least 4 rays are required");
  TaylorLinear out;
  out.normalization = normalize_quadratic(model, m);
  const std::vector<double> radii = options.radii.empty() ? default_radii() : options.radii;
  const PeriodOptions popt = options.periods;
  const PeriodSource periods =
      source ? source : [&model, popt](const Vec2& v) { return period_lattice(model, v, popt); };

  // Every (ray, radius) pair is an independent period computation.
  const std::size_t nr = static_cast<std::size_t>(options.rays), nk = radii.size();
  std::vector<PeriodLattice> table(nr * nk);
  std::vector<double> angles(nr);
  for (std::size_t i = 0; i < nr; ++i) angles[i] = kTwoPi * (static_cast<double>(i) + 0.5) / static_cast<double>(nr);
  for_each_index(table.size(), options.exec, [&](std::size_t idx) {
    const std::size_t i = idx / nk, k = idx % nk;
    const Vec2 c = radii[k] * Vec2(std::cos(angles[i]), std::sin(angles[i]));
    table[idx] = periods(out.normalization.raw(c));
  });

  std::vector<double> s1, s2;
  for (std::size_t i = 0; i < nr; ++i) {
    std::size_t k = 0;
    const PeriodSource cached = [&](const Vec2&) { return table[i * nk + k++]; };
    RayFit fit;
    fit.angle = angles[i];
    fit.samples = regularized_periods(model, out.normalization, angles[i], radii, cached, Execution::serial());
    std::vector<double> y1, y2;
    for (const auto& s : fit.samples) {
      y1.push_back(s.sigma1);
      y2.push_back(s.sigma2);
    }
    fit.sigma1_intercept = extrapolate_to_zero(radii, y1, &fit.sigma1_max_residual);
    fit.sigma2_intercept = extrapolate_to_zero(radii, y2, &fit.sigma2_max_residual);
    s1.push_back(fit.sigma1_intercept);
    s2.push_back(fit.sigma2_intercept);
    out.rays.push_back(std::move(fit));
  }
  // Bring the sigma1 intercepts onto one branch before averaging.
  for (std::size_t i = 1; i < s1.size(); ++i) s1[i] = nearest_branch(s1[i], s1[0]);
  auto mean = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
  };
  auto spread = [](const std::vector<double>& v) {
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return *hi - *lo;
  };
  out.a10 = wrap_2pi(mean(s1));
  out.a01 = mean(s2);
  out.spread_a10 = spread(s1);
  out.spread_a01 = spread(s2);
  out.a10_representatives = {out.a10, wrap_2pi(-out.a10), wrap_2pi(kPi - out.a10), wrap_2pi(kPi + out.a10)};
  const double worst = std::max(out.spread_a10, out.spread_a01);
  if (worst > options.spread_limit)
    fail(ErrorKind::SpreadTooLarge, "ray intercepts spread by " + std::to_string(worst) + " (limit " +
                                        std::to_string(options.spread_limit) + ")");
  return out;
}

}  // namespace semitoric
