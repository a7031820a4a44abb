#include <algorithm>

#include "doctest.h"
#include "semitoric/catalog.hpp"
#include "semitoric/error.hpp"
#include "semitoric/singularity.hpp"
#include "support.hpp"

using namespace semitoric;
using semitoric::test::vec_of;

namespace {
const CriticalPoint* find_near(const ModelSystem& model, const CriticalSearch& s, const Vec& x) {
  for (const auto& p : s.points)
    if (model.chart().distance(p.point.coords, x) < 1e-6) return &p;
  return nullptr;
}

ModelPtr coupled(double t) { return instantiate("coupled_angular_momenta", {{"R1", 1.0}, {"R2", 2.5}, {"t", t}}); }
}  // namespace

TEST_CASE("Jaynes-Cummings census") {
  const auto jc = instantiate("jaynes_cummings");
  const CriticalSearch s = find_critical_points(*jc);
  const CriticalPoint* m = find_near(*jc, s, vec_of({0, 0, 1, 0, 0}));
  REQUIRE(m != nullptr);
  CHECK(m->type == SingularityType::FocusFocus);
  CHECK(m->rank == 0);
  int ff = 0;
  for (const auto& p : s.points) {
    if (p.type == SingularityType::FocusFocus) ++ff;
    else CHECK(is_elliptic_type(p.type));
  }
  CHECK(ff == 1);
}

TEST_CASE("census is identical serially and in parallel") {
  const auto jc = instantiate("jaynes_cummings");
  CriticalSearchOptions a, b;
  a.exec = Execution::serial();
  b.exec = Execution::threads(4);
  const CriticalSearch sa = find_critical_points(*jc, a), sb = find_critical_points(*jc, b);
  REQUIRE(sa.points.size() == sb.points.size());
  for (std::size_t i = 0; i < sa.points.size(); ++i) CHECK(sa.points[i].point.coords == sb.points[i].point.coords);
}

TEST_CASE("s2_height has exactly the two poles") {
  const auto s2 = instantiate("s2_height");
  const CriticalSearch s = find_critical_points(*s2);
  REQUIRE(s.points.size() == 2);
  CHECK(find_near(*s2, s, vec_of({0, 0, 1})) != nullptr);
  CHECK(find_near(*s2, s, vec_of({0, 0, -1})) != nullptr);
  for (const auto& p : s.points) CHECK(p.rank == 0);
}

TEST_CASE("coupled angular momenta census includes the N-S point") {
  for (double t : {0.0, 0.5, 1.0}) {
    const auto ca = coupled(t);
    CHECK(find_near(*ca, find_critical_points(*ca), vec_of({0, 0, 1, 0, 0, -1})) != nullptr);
  }
}

TEST_CASE("classify") {
  const auto jc = instantiate("jaynes_cummings");
  CHECK(classify(*jc, jc->point(vec_of({0, 0, 1, 0, 0}))).type == SingularityType::FocusFocus);
  CHECK(classify(*jc, jc->point(vec_of({0, 0, -1, 0, 0}))).type == SingularityType::EllipticElliptic);
  const auto ca = coupled(0.5);
  CHECK(classify(*ca, ca->point(vec_of({0, 0, 1, 0, 0, -1}))).type == SingularityType::FocusFocus);
  CHECK(classify(*coupled(0.0), ca->point(vec_of({0, 0, 1, 0, 0, -1}))).type == SingularityType::EllipticElliptic);
  // Regular points are not classified.
  CHECK_THROWS_AS(classify(*jc, jc->point(vec_of({0.6, 0, 0.8, 0.3, 0.1}))), Error);
}

TEST_CASE("parameter sweep brackets t- < 1/2 < t+") {
  std::vector<double> grid;
  for (int i = 0; i <= 20; ++i) grid.push_back(0.05 * i);
  const SweepResult s = sweep_parameter(coupled, vec_of({0, 0, 1, 0, 0, -1}), grid);
  CHECK(s.samples.front().type == SingularityType::EllipticElliptic);
  REQUIRE(s.transitions.size() == 2);
  CHECK(s.transitions[0].before == SingularityType::EllipticElliptic);
  CHECK(s.transitions[0].after == SingularityType::FocusFocus);
  CHECK(s.transitions[1].after == SingularityType::EllipticElliptic);
  CHECK(s.transitions[0].t_high < 0.5);
  CHECK(s.transitions[1].t_low > 0.5);
  CHECK(s.transitions[0].t_high - s.transitions[0].t_low <= 1e-6);
  CHECK(s.transitions[0].t_low == doctest::Approx(0.27286).epsilon(1e-4));
  CHECK(s.transitions[1].t_low == doctest::Approx(0.88099).epsilon(1e-4));
}

TEST_CASE("spectrum classification") {
  using C = std::complex<double>;
  CHECK(classify_spectrum({C(0, 1), C(0, -1), C(0, 2), C(0, -2)}, 1e-9) == SingularityType::EllipticElliptic);
  CHECK(classify_spectrum({C(1, 1), C(1, -1), C(-1, 1), C(-1, -1)}, 1e-9) == SingularityType::FocusFocus);
  CHECK(classify_spectrum({C(1, 0), C(-1, 0), C(0, 1), C(0, -1)}, 1e-9) == SingularityType::EllipticHyperbolic);
  CHECK(classify_spectrum({C(1, 0), C(-1, 0), C(2, 0), C(-2, 0)}, 1e-9) == SingularityType::HyperbolicHyperbolic);
}
