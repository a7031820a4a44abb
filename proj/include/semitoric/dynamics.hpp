#pragma once

#include <functional>
#include <limits>
#include <memory>

#include "semitoric/model.hpp"

namespace semitoric {

Vec2 evaluate_F(const ModelSystem& model, const PhasePoint& p);
TangentVector hamiltonian_field(const ModelSystem& model, int component, const PhasePoint& p);
double poisson_bracket(const ModelSystem& model, const PhasePoint& p);

struct FlowOptions {
  double tol = 1e-10;
  double max_step = 0.25;
  double min_step = 1e-12;
  double initial_step = 1e-2;
};

// Time-`time` flow of X_{f_component}; negative times run backwards.
PhasePoint flow(const ModelSystem& model, int component, const PhasePoint& p, double time,
                double tol = 1e-10);

using VectorField = std::function<Vec(const Vec&)>;

// Adaptive RKF7(8) integration with constraint projection after every
// accepted step. Advances one accepted step at a time so callers can run
// event detection between steps.
class Trajectory {
 public:
  Trajectory(const Chart& chart, VectorField field, Vec start, FlowOptions options = {});
  ~Trajectory();
  Trajectory(const Trajectory&) = delete;
  Trajectory& operator=(const Trajectory&) = delete;

  // Takes one accepted step, never passing t_limit.
  void advance(double t_limit = std::numeric_limits<double>::infinity());

  double time() const { return t_; }
  const Vec& state() const { return x_; }
  double previous_time() const { return t_prev_; }
  const Vec& previous_state() const { return x_prev_; }
  std::size_t steps() const { return steps_; }

  // Single fixed step of size dt from the previous accepted state. Used to
  // refine events inside the last step at integrator accuracy.
  Vec probe(double dt) const;

 private:
  struct Steppers;
  const Chart& chart_;
  VectorField field_;
  std::unique_ptr<Steppers> steppers_;
  FlowOptions opt_;
  Vec x_, x_prev_;
  double t_ = 0.0, t_prev_ = 0.0, dt_;
  std::size_t steps_ = 0;
};

}  // namespace semitoric
