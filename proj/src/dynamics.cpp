#include "semitoric/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/numeric/odeint.hpp>
#include <boost/numeric/odeint/external/eigen/eigen.hpp>

#include "semitoric/error.hpp"

namespace semitoric {

namespace odeint = boost::numeric::odeint;

namespace {

using ErrorStepper =
    odeint::runge_kutta_fehlberg78<Vec, double, Vec, double, odeint::vector_space_algebra>;
using Checker = odeint::default_error_checker<double, odeint::vector_space_algebra, odeint::default_operations>;
using Controlled = odeint::controlled_runge_kutta<ErrorStepper, Checker>;

struct System {
  const VectorField* field;
  void operator()(const Vec& x, Vec& dxdt, double /*t*/) const { dxdt = (*field)(x); }
};

void check_point(const ModelSystem& model, const PhasePoint& p) {
  if (!p.model_id.empty() && p.model_id != model.id())
    fail(ErrorKind::ConstraintViolation, "point belongs to model " + p.model_id + ", not " + model.id());
  model.check_on_manifold(p.coords);
}

void check_component(int component) {
  if (component != 1 && component != 2) fail(ErrorKind::BadParameter, "component must be 1 or 2");
}

}  // namespace

struct Trajectory::Steppers {
  Controlled controlled;
  ErrorStepper single;
  explicit Steppers(double tol) : controlled(Checker(tol, tol, 1.0, 1.0)) {}
};

Vec2 evaluate_F(const ModelSystem& model, const PhasePoint& p) {
  check_point(model, p);
  return model.value(p.coords);
}

TangentVector hamiltonian_field(const ModelSystem& model, int component, const PhasePoint& p) {
  check_point(model, p);
  check_component(component);
  return TangentVector{model.field(component, p.coords), p};
}

double poisson_bracket(const ModelSystem& model, const PhasePoint& p) {
  check_point(model, p);
  const Vec x1 = model.field(1, p.coords);
  const Vec x2 = model.field(2, p.coords);
  return model.chart().pairing(p.coords, x1, x2);
}

Trajectory::Trajectory(const Chart& chart, VectorField field, Vec start, FlowOptions options)
    : chart_(chart), field_(std::move(field)), opt_(options), x_(std::move(start)), dt_(options.initial_step) {
  if (!(opt_.tol > 0)) fail(ErrorKind::BadParameter, "flow tolerance must be > 0");
  steppers_ = std::make_unique<Steppers>(opt_.tol);
  x_prev_ = x_;
}

Trajectory::~Trajectory() = default;

void Trajectory::advance(double t_limit) {
  System sys{&field_};
  Vec x = x_;
  double t = t_;
  int rejections = 0;
  while (true) {
    double dt = std::min({dt_, opt_.max_step, t_limit - t_});
    if (dt <= 0) return;
    const bool clipped = dt < dt_;
    t = t_;
    const auto result = steppers_->controlled.try_step(sys, x, t, dt);
    if (result == odeint::success) {
      // dt now holds the suggested next step.
      if (!clipped || dt > dt_) dt_ = dt;
      break;
    }
    dt_ = dt;
    if (dt_ < opt_.min_step || ++rejections > 200)
      fail(ErrorKind::StepFailure, "adaptive step size underflow near t = " + std::to_string(t_));
  }
  x_prev_ = x_;
  t_prev_ = t_;
  x_ = chart_.project(x);
  t_ = t;
  ++steps_;
}

Vec Trajectory::probe(double dt) const {
  if (dt == 0.0) return x_prev_;
  System sys{&field_};
  Vec x = x_prev_;
  steppers_->single.do_step(sys, x, t_prev_, dt);
  return chart_.project(x);
}

PhasePoint flow(const ModelSystem& model, int component, const PhasePoint& p, double time, double tol) {
  check_point(model, p);
  check_component(component);
  if (!(tol > 0)) fail(ErrorKind::BadParameter, "flow tolerance must be > 0");
  if (time == 0.0) return p;
  const double sign = time > 0 ? 1.0 : -1.0;
  VectorField f = [&model, component, sign](const Vec& x) { return Vec(sign * model.field(component, x)); };
  FlowOptions opt;
  opt.tol = tol;
  Trajectory traj(model.chart(), f, p.coords, opt);
  const double target = std::abs(time);
  while (traj.time() < target) traj.advance(target);
  return PhasePoint{traj.state(), model.id()};
}

}  // namespace semitoric
