#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "semitoric/execution.hpp"
#include "semitoric/model.hpp"

namespace semitoric {

// Williamson types for two degrees of freedom plus the one-degree-of-freedom
// cases (elliptic / hyperbolic) used by the height-type models.
enum class SingularityType {
  EllipticElliptic,
  FocusFocus,
  TransversallyElliptic,
  EllipticHyperbolic,
  HyperbolicHyperbolic,
  TransversallyHyperbolic,
  Elliptic,
  Hyperbolic,
  Degenerate,
};

std::string to_string(SingularityType type);
bool is_elliptic_type(SingularityType type);

struct CriticalPoint {
  PhasePoint point;
  int rank = 0;
  SingularityType type = SingularityType::Degenerate;
  std::vector<std::complex<double>> eigenvalues;  // rank 0 only
  Vec2 value = Vec2::Zero();
};

struct ClassifyOptions {
  Vec2 mu{0.37, 0.91};
  double pattern_tol = 1e-6;
  double rank_tol = 1e-8;
  double fd_step = 1e-5;
};

// Numerical rank of dF at x (singular values of the tangent gradients).
int numerical_rank(const ModelSystem& model, const Vec& x, double tol = 1e-8);

// Singular values of the 2 x n matrix of tangent gradients, descending.
Vec2 gradient_singular_values(const ModelSystem& model, const Vec& x);

CriticalPoint classify(const ModelSystem& model, const PhasePoint& p, const ClassifyOptions& options = {});

// Classification of a 4x4 (or 2x2) Hamiltonian matrix by its spectrum.
SingularityType classify_spectrum(const std::vector<std::complex<double>>& eigenvalues, double tol);

// Normalized discriminant (B^2 - 4C) / (B^2 + |C|) of the characteristic
// polynomial l^4 + B l^2 + C of a 4x4 Hamiltonian matrix: positive for
// two imaginary (or two real) pairs, negative for a complex quadruple.
double pattern_discriminant(const Mat& L);

struct CriticalSearchOptions {
  int seed_count = 64;
  std::uint64_t seed = 0;
  int max_iterations = 200;
  double dedupe_distance = 1e-6;
  ClassifyOptions classify;
  Execution exec;
};

struct CriticalSearch {
  std::vector<CriticalPoint> points;
  int dropped = 0;  // seeds that failed to converge
};

CriticalSearch find_critical_points(const ModelSystem& model, const CriticalSearchOptions& options = {});

using ModelFamily = std::function<ModelPtr(double)>;

struct SweepSample {
  double t;
  SingularityType type;
};

struct Transition {
  double t_low, t_high;  // bracket of width <= tolerance
  SingularityType before, after;
};

struct SweepResult {
  std::vector<SweepSample> samples;
  std::vector<Transition> transitions;
};

SweepResult sweep_parameter(const ModelFamily& family, const Vec& point, const std::vector<double>& t_grid,
                            const ClassifyOptions& options = {}, double width = 1e-6);

}  // namespace semitoric
