#include <cmath>
#include <numbers>

#include "doctest.h"
#include "semitoric/catalog.hpp"
#include "semitoric/dynamics.hpp"
#include "semitoric/error.hpp"
#include "semitoric/fibration.hpp"
#include "support.hpp"

using namespace semitoric;

namespace {
constexpr double kTwoPi = 2 * std::numbers::pi;

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::StepFailure;
}
}  // namespace

TEST_CASE("solve_fiber_point") {
  const auto s2 = instantiate("s2_height");
  const PhasePoint e = solve_fiber_point(*s2, Vec2(0, 0));
  CHECK(std::abs(s2->value(e.coords)[0]) < 1e-10);

  const auto jc = instantiate("jaynes_cummings");
  const PhasePoint a = solve_fiber_point(*jc, Vec2(0.5, 0.1));
  CHECK((jc->value(a.coords) - Vec2(0.5, 0.1)).norm() < 1e-10);
  CHECK(kind_of([&] { solve_fiber_point(*jc, Vec2(1, 0)); }) == ErrorKind::SingularValue);
}

TEST_CASE("toric period lattices") {
  const auto cp = instantiate("cpn_rotation");
  const PeriodLattice L = period_lattice(*cp, Vec2(0.3, 0.3));
  CHECK(std::min(L.tau1, kTwoPi - L.tau1) < 1e-8);
  CHECK(L.tau2 == doctest::Approx(kTwoPi).epsilon(1e-8));
}

TEST_CASE("periods do not depend on the base point") {
  const auto jc = instantiate("jaynes_cummings");
  const PhasePoint a = solve_fiber_point(*jc, Vec2(0.5, 0.1));
  // Another point of the same fiber, reached by the flow of f2.
  const PhasePoint b = flow(*jc, 2, a, 1.7);
  CHECK(jc->chart().distance(a.coords, b.coords) > 1e-3);
  const PeriodLattice La = period_lattice_from(*jc, a), Lb = period_lattice_from(*jc, b);
  CHECK(std::abs(La.tau1 - Lb.tau1) < 1e-6);
  CHECK(std::abs(La.tau2 - Lb.tau2) < 1e-6);
}

TEST_CASE("tau2 grows like |log r| towards the focus-focus value") {
  const auto jc = instantiate("jaynes_cummings");
  const double theta = 0.7;
  std::vector<double> t2;
  for (double r : {1e-1, 1e-2, 1e-3, 1e-4}) t2.push_back(period_lattice(*jc, Vec2(1, 0) + r * Vec2(std::cos(theta), std::sin(theta))).tau2);
  // Each decade adds the same multiple of log 10 to tau2.
  const double step = t2[1] - t2[0];
  CHECK(step > std::log(10.0));
  for (std::size_t i = 2; i < t2.size(); ++i) CHECK(t2[i] - t2[i - 1] == doctest::Approx(step).epsilon(0.02));
}

TEST_CASE("regular grid") {
  const auto jc = instantiate("jaynes_cummings");
  const auto g = regular_grid(*jc, Box{Vec2(-1, -2), Vec2(3, 2)}, 40, 0.05);
  CHECK(g.size() > 100);
  for (const auto& c : g) CHECK((c - Vec2(1, 0)).norm() > 0.05);

  const auto s2 = instantiate("s2_height");
  const auto line = regular_grid(*s2, Box{Vec2(-2, -2), Vec2(2, 2)}, 20, 0.01);
  CHECK(!line.empty());
  for (const auto& c : line) {
    CHECK(c[0] == c[1]);
    CHECK(std::abs(c[0]) < 1.0);
  }
  CHECK(kind_of([&] { regular_grid(*jc, Box{Vec2(10, 10), Vec2(11, 11)}, 10, 0.01); }) == ErrorKind::EmptyGrid);
}

TEST_CASE("regular grid serial and parallel agree") {
  const auto jc = instantiate("jaynes_cummings");
  const Box box{Vec2(-1, -2), Vec2(3, 2)};
  CHECK(regular_grid(*jc, box, 16, 0.05, Execution::serial()) == regular_grid(*jc, box, 16, 0.05, Execution::threads(4)));
}
