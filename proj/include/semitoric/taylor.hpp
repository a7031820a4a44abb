#pragma once

#include <array>
#include <complex>
#include <functional>
#include <vector>

#include "semitoric/execution.hpp"
#include "semitoric/fibration.hpp"
#include "semitoric/singularity.hpp"

namespace semitoric {

// Linear normalization at a focus-focus point. Normalized values c relate
// to raw values by F = F(m) + M c with M = [[1, 0], [alpha, beta]], so
// that f1 - f1(m) has quadratic part q1 and the rescaled combination of
// f2 has quadratic part q2.
struct Normalization {
  Vec point;                      // the focus-focus point m
  Vec2 value = Vec2::Zero();      // F(m)
  Mat2 raw_from_normalized = Mat2::Identity();  // M
  Mat2 normalized_from_raw = Mat2::Identity();  // L = M^-1
  double alpha = 0.0, beta = 1.0;
  double kappa = 1.0;  // |Im| of the f1 eigenvalue, 1 for a proper S^1 generator
  double condition = 1.0;
  Mat frame;  // symplectic tangent frame used for the linearization
  std::vector<std::complex<double>> mu1, mu2;  // joint eigenvalues of X_f1, X_f2

  Vec2 raw(const Vec2& c) const { return value + raw_from_normalized * c; }
  Vec2 normalized(const Vec2& f) const { return normalized_from_raw * (f - value); }
  // Periods (tau1, tau2) of (f1, f2) expressed for the normalized pair.
  Vec2 normalized_periods(double tau1, double tau2) const { return {tau1 + alpha * tau2, beta * tau2}; }
};

Normalization normalize_quadratic(const ModelSystem& model, const CriticalPoint& m);

using PeriodSource = std::function<PeriodLattice(const Vec2& raw_value)>;

struct SigmaSample {
  double r = 0.0;
  Vec2 c = Vec2::Zero();  // normalized value
  double tau1 = 0.0, tau2 = 0.0;  // normalized periods
  double sigma1 = 0.0, sigma2 = 0.0;
};

// Log-regularized periods along a ray of normalized values. sigma1 is
// continued continuously from the first radius.
std::vector<SigmaSample> regularized_periods(const ModelSystem& model, const Normalization& norm, double ray_angle,
                                             const std::vector<double>& radii, const PeriodSource& source = {},
                                             const Execution& exec = {});

struct RayFit {
  double angle = 0.0;
  double sigma1_intercept = 0.0, sigma2_intercept = 0.0;
  double sigma1_max_residual = 0.0, sigma2_max_residual = 0.0;
  std::vector<SigmaSample> samples;
};

struct TaylorOptions {
  int rays = 8;
  std::vector<double> radii;  // empty selects 0.04 * 2^-i, i = 0..6
  double spread_limit = 5e-3;
  PeriodOptions periods;
  Execution exec;
};

struct TaylorLinear {
  double a10 = 0.0;  // in [0, 2pi)
  double a01 = 0.0;
  double spread_a10 = 0.0, spread_a01 = 0.0;
  std::vector<RayFit> rays;
  // The (Z2 x Z2) orbit of a10: a, -a, pi - a, pi + a, reduced mod 2pi.
  std::array<double, 4> a10_representatives{};
  Normalization normalization;
};

// Intercept of y(r) = const + a r log r + b r by least squares.
double extrapolate_to_zero(const std::vector<double>& r, const std::vector<double>& y, double* max_residual = nullptr);

TaylorLinear taylor_linear(const ModelSystem& model, const CriticalPoint& m, const TaylorOptions& options = {},
                           const PeriodSource& source = {});

std::vector<double> default_radii();

}  // namespace semitoric
