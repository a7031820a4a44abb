#include <cmath>
#include <numbers>

#include "doctest.h"
#include "semitoric/catalog.hpp"
#include "semitoric/error.hpp"
#include "semitoric/taylor.hpp"
#include "support.hpp"

using namespace semitoric;
using semitoric::test::vec_of;

namespace {
constexpr double kPi = std::numbers::pi;

double circ(double a, double b) {
  const double d = std::fmod(std::abs(a - b), 2 * kPi);
  return std::min(d, 2 * kPi - d);
}

CriticalPoint at(const ModelPtr& m, const Vec& x) { return classify(*m, m->point(x)); }

// Closed periods of the focus-focus normal form with S(c) = a c1 + b c2:
// tau1 winds as -arg c and tau2 diverges as -log |c|.
PeriodSource q_model_periods(double a, double b) {
  return [a, b](const Vec2& c) {
    PeriodLattice L;
    L.c = c;
    L.tau1 = std::fmod(a - std::atan2(c[1], c[0]) + 4 * kPi, 2 * kPi);
    L.tau2 = b - std::log(c.norm());
    return L;
  };
}
}  // namespace

TEST_CASE("normalization") {
  const auto q = instantiate("q_model");
  const Normalization nq = normalize_quadratic(*q, at(q, Vec::Zero(4)));
  CHECK(std::abs(nq.alpha) < 1e-9);
  CHECK(nq.beta == doctest::Approx(1.0).epsilon(1e-9));

  const auto jc = instantiate("jaynes_cummings");
  const Vec m = vec_of({0, 0, 1, 0, 0});
  const Normalization n1 = normalize_quadratic(*jc, at(jc, m));
  CHECK((n1.value - Vec2(1, 0)).norm() < 1e-12);
  // Scaling f2 by 2 is absorbed by the value map.
  const auto jc2 = scale_second_component(jc, 2.0);
  const Normalization n2 = normalize_quadratic(*jc2, at(jc2, m));
  CHECK(n2.beta == doctest::Approx(2.0 * n1.beta).epsilon(1e-9));
  CHECK(n2.alpha == doctest::Approx(2.0 * n1.alpha).epsilon(1e-9));

  CHECK_THROWS_AS(normalize_quadratic(*jc, at(jc, vec_of({0, 0, -1, 0, 0}))), Error);
}

TEST_CASE("regularized periods on the normal form are constant") {
  const auto q = instantiate("q_model");
  const CriticalPoint m = at(q, Vec::Zero(4));
  const Normalization n = normalize_quadratic(*q, m);
  const auto samples = regularized_periods(*q, n, 0.4, default_radii(), q_model_periods(0.3, 1.7));
  for (const auto& s : samples) {
    CHECK(std::abs(s.sigma1 - samples.front().sigma1) < 1e-6);
    CHECK(std::abs(s.sigma2 - samples.front().sigma2) < 1e-6);
  }
  const TaylorLinear t = taylor_linear(*q, m, {}, q_model_periods(0.3, 1.7));
  CHECK(circ(t.a10, kPi / 2 - 0.3) < 1e-6);
  CHECK(t.a01 == doctest::Approx(1.7).epsilon(1e-6));
  const TaylorLinear zero = taylor_linear(*q, m, {}, q_model_periods(kPi / 2, 0.0));
  CHECK(circ(zero.a10, 0.0) < 1e-6);
}

TEST_CASE("regularized sigma2 converges along a ray for Jaynes-Cummings") {
  const auto jc = instantiate("jaynes_cummings");
  const CriticalPoint m = at(jc, vec_of({0, 0, 1, 0, 0}));
  const Normalization n = normalize_quadratic(*jc, m);
  const auto s = regularized_periods(*jc, n, 0.0, {1e-1, 1e-2, 1e-3});
  CHECK(std::abs(s[2].sigma2 - s[1].sigma2) < std::abs(s[1].sigma2 - s[0].sigma2));
}

TEST_CASE("toric input is rejected") {
  const auto cp = instantiate("cpn_rotation");
  CHECK_THROWS_AS(normalize_quadratic(*cp, at(cp, cp->metadata().fixed_points.front())), Error);
}

TEST_CASE("Jaynes-Cummings Taylor invariant") {
  const auto jc = instantiate("jaynes_cummings");
  const TaylorLinear t = taylor_linear(*jc, at(jc, vec_of({0, 0, 1, 0, 0})));
  CHECK(circ(t.a10, kPi / 2) < 1e-2);
  CHECK(t.a01 == doctest::Approx(5 * std::log(2.0)).epsilon(1e-2 / 3.5));
}

TEST_CASE("coupled angular momenta Taylor invariant") {
  const auto ca = instantiate("coupled_angular_momenta", {{"R1", 1.0}, {"R2", 2.5}, {"t", 0.5}});
  TaylorOptions serial;
  serial.exec = Execution::serial();
  const CriticalPoint m = at(ca, vec_of({0, 0, 1, 0, 0, -1}));
  const TaylorLinear t = taylor_linear(*ca, m);
  CHECK(circ(t.a10, std::atan(9.0 / 13.0)) < 1e-2);
  CHECK(std::abs(t.a01 - (3.5 * std::log(2.0) + 3 * std::log(3.0) - 1.5 * std::log(5.0))) < 1e-2);
  const TaylorLinear s = taylor_linear(*ca, m, serial);
  CHECK(s.a10 == t.a10);
  CHECK(s.a01 == t.a01);
}

TEST_CASE("extrapolation recovers the constant") {
  std::vector<double> r, y;
  for (double x : default_radii()) {
    r.push_back(x);
    y.push_back(2.5 + 0.7 * x * std::log(x) - 1.3 * x);
  }
  CHECK(extrapolate_to_zero(r, y) == doctest::Approx(2.5).epsilon(1e-12));
}
