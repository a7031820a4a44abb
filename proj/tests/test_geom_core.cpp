#include <cmath>
#include <numbers>

#include "doctest.h"
#include "semitoric/catalog.hpp"
#include "semitoric/dynamics.hpp"
#include "semitoric/error.hpp"
#include "semitoric/halton.hpp"
#include "semitoric/planar.hpp"
#include "support.hpp"

using namespace semitoric;
using semitoric::test::vec_of;

TEST_CASE("evaluate_F at closed-form points") {
  const auto jc = instantiate("jaynes_cummings");
  CHECK((evaluate_F(*jc, jc->point(vec_of({0, 0, 1, 0, 0}))) - Vec2(1, 0)).norm() < 1e-15);

  const auto s2 = instantiate("s2_height");
  CHECK(evaluate_F(*s2, s2->point(vec_of({0, 0, 1})))[0] == doctest::Approx(1.0));

  const auto ca = instantiate("coupled_angular_momenta", {{"R1", 1.0}, {"R2", 2.5}, {"t", 0.0}});
  CHECK((evaluate_F(*ca, ca->point(vec_of({0, 0, 1, 0, 0, -1}))) - Vec2(-1.5, 1.0)).norm() < 1e-15);
}

TEST_CASE("evaluate_F rejects points off the manifold") {
  const auto s2 = instantiate("s2_height");
  CHECK_THROWS_AS(evaluate_F(*s2, PhasePoint{vec_of({0, 0, 2}), "s2_height"}), Error);
}

TEST_CASE("hamiltonian fields") {
  const auto jc = instantiate("jaynes_cummings");
  const PhasePoint p = jc->point(vec_of({0.3, 0.4, std::sqrt(0.75), 0.2, -0.7}));
  const TangentVector X1 = hamiltonian_field(*jc, 1, p);
  CHECK(std::abs(jc->pairing()(p, X1, X1)) < 1e-15);

  const auto s2 = instantiate("s2_height");
  const TangentVector X = hamiltonian_field(*s2, 1, s2->point(vec_of({1, 0, 0})));
  CHECK(std::abs(X.components[2]) < 1e-15);
  CHECK(X.components.norm() > 0.5);

  const PhasePoint m = jc->point(vec_of({0, 0, 1, 0, 0}));
  CHECK(hamiltonian_field(*jc, 1, m).components.norm() < 1e-15);
  CHECK(hamiltonian_field(*jc, 2, m).components.norm() < 1e-15);
  CHECK_THROWS_AS(hamiltonian_field(*jc, 3, m), Error);
}

TEST_CASE("omega(X_f, v) = -df(v) on a tangent frame") {
  for (const char* id : {"jaynes_cummings", "coupled_angular_momenta", "cpn_rotation", "spherical_pendulum"}) {
    const auto model = instantiate(id);
    const Halton seq(model->sample_dimension(), 3);
    for (int i = 0; i < 10; ++i) {
      const Vec x = model->sample(seq.point(static_cast<std::uint64_t>(i)));
      const Mat basis = model->chart().tangent_basis(x);
      for (int k = 1; k <= 2; ++k) {
        const Vec X = model->field(k, x);
        for (Eigen::Index c = 0; c < basis.cols(); ++c) {
          const Vec v = basis.col(c);
          const double h = 1e-5;
          const double df = (model->value(x + h * v)[k - 1] - model->value(x - h * v)[k - 1]) / (2 * h);
          CHECK(std::abs(model->chart().pairing(x, X, v) + df) < 1e-6);
        }
      }
    }
  }
}

TEST_CASE("flow") {
  const auto jc = instantiate("jaynes_cummings");
  const PhasePoint p = jc->point(vec_of({0.3, 0.4, std::sqrt(0.75), 0.2, -0.7}));
  CHECK((flow(*jc, 1, p, 0.0).coords - p.coords).norm() == 0.0);

  const auto s2 = instantiate("s2_height");
  const PhasePoint q = s2->point(vec_of({0.6, 0.0, 0.8}));
  CHECK((flow(*s2, 1, q, 2 * std::numbers::pi).coords - q.coords).norm() < 1e-8);

  // Integrated flow against the closed-form circle action.
  CHECK((flow(*jc, 1, p, 1.3).coords - jc->circle(p.coords, 1.3)).norm() < 1e-8);

  for (double t : {0.5, 5.0, 12.0, 20.0}) {
    const PhasePoint r = flow(*jc, 1, p, t);
    CHECK(std::abs(jc->value(r.coords)[1] - jc->value(p.coords)[1]) < 1e-8);
    CHECK(jc->chart().constraint_residual(r.coords) < 1e-12);
  }
  // Backwards flow undoes forwards flow.
  const PhasePoint back = flow(*jc, 2, flow(*jc, 2, p, 3.0), -3.0);
  CHECK((back.coords - p.coords).norm() < 1e-7);
}

TEST_CASE("poisson bracket") {
  const auto jc = instantiate("jaynes_cummings");
  const Halton seq(jc->sample_dimension(), 11);
  double worst = 0;
  for (std::uint64_t i = 0; i < 1000; ++i)
    worst = std::max(worst, std::abs(poisson_bracket(*jc, PhasePoint{jc->sample(seq.point(i)), jc->id()})));
  CHECK(worst < 1e-9);

  const auto cp1 = instantiate("cpn_rotation", {{"n", 1.0}});
  const Halton s1(cp1->sample_dimension(), 0);
  for (std::uint64_t i = 0; i < 100; ++i)
    CHECK(poisson_bracket(*cp1, PhasePoint{cp1->sample(s1.point(i)), cp1->id()}) == 0.0);

  for (double t : {0.0, 0.3, 0.5, 1.0}) {
    const auto ca = instantiate("coupled_angular_momenta", {{"t", t}});
    const Halton s(ca->sample_dimension(), 5);
    for (std::uint64_t i = 0; i < 200; ++i)
      CHECK(std::abs(poisson_bracket(*ca, PhasePoint{ca->sample(s.point(i)), ca->id()})) < 1e-9);
  }
}

TEST_CASE("halton sequence") {
  CHECK(radical_inverse(1, 2) == 0.5);
  CHECK(radical_inverse(3, 2) == 0.75);
  CHECK(radical_inverse(1, 3) == doctest::Approx(1.0 / 3.0));
  const Halton a(2, 10), b(2, 0);
  CHECK(a.point(0) == b.point(10));
}

TEST_CASE("planar geometry") {
  const PointSet hull = convex_hull({Vec2(0, 0), Vec2(1, 0), Vec2(0.5, 0.2), Vec2(1, 1), Vec2(0, 1), Vec2(0.5, 0)});
  CHECK(hull.size() == 4);
  CHECK(point_in_polygon(Vec2(0.5, 0.5), hull));
  CHECK_FALSE(point_in_polygon(Vec2(1.5, 0.5), hull));
  CHECK(distance_to_region(Vec2(2, 0.5), hull) == doctest::Approx(1.0));
  CHECK(distance_to_region(Vec2(0.5, 0.5), hull) == 0.0);
  CHECK(point_segment_distance(Vec2(0, 1), Vec2(-1, 0), Vec2(1, 0)) == doctest::Approx(1.0));

  const Halton seq(2, 0);
  PointSet A, B;
  for (std::uint64_t i = 0; i < 700; ++i) {
    const auto u = seq.point(i);
    (i % 2 ? A : B).push_back(Vec2(u[0], 3 * u[1]));
  }
  const double ref = hausdorff_reference(A, B);
  CHECK(hausdorff(A, B, Execution::serial()) == ref);
  CHECK(hausdorff(A, B, Execution::threads(4)) == ref);
}
