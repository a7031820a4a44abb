#include <cmath>

#include "doctest.h"
#include "semitoric/catalog.hpp"
#include "semitoric/error.hpp"
#include "semitoric/polygon.hpp"
#include "support.hpp"

using namespace semitoric;

namespace {
MarkedPolygon polygon_of(PointSet v) {
  MarkedPolygon p;
  p.vertices = std::move(v);
  return p;
}

double vertex_distance(const PointSet& a, const PointSet& b) {
  double d = 0;
  for (const auto& p : a) d = std::max(d, distance_to_region(p, b));
  for (const auto& p : b) d = std::max(d, distance_to_region(p, a));
  return d;
}

// Jaynes-Cummings polygons are costly; build each cut variant once.
const MarkedPolygon& jc_polygon(int sign) {
  static const MarkedPolygon up = build_polygon(*instantiate("jaynes_cummings"), {1}, 24);
  static const MarkedPolygon down = build_polygon(*instantiate("jaynes_cummings"), {-1}, 24);
  return sign > 0 ? up : down;
}
}  // namespace

TEST_CASE("second action of a toric model is f2 up to a constant") {
  const auto cp = instantiate("cpn_rotation");
  const Vec2 anchor(0.4, 0.2);
  for (const Vec2& c : {Vec2(0.2, 0.3), Vec2(0.1, 0.1), Vec2(0.6, 0.25)})
    CHECK(second_action(*cp, c, anchor, {}) == doctest::Approx(c[1]).epsilon(1e-9));
}

TEST_CASE("action form is closed away from focus-focus values") {
  const auto jc = instantiate("jaynes_cummings");
  const double loop = action_loop_integral(*jc, {Vec2(0.5, 0.1), Vec2(2.0, 0.1), Vec2(2.0, 0.3), Vec2(0.5, 0.3)});
  CHECK(std::abs(loop) < 1e-5);
}

TEST_CASE("loop around the focus-focus value jumps by the change of c1") {
  const auto jc = instantiate("jaynes_cummings");
  for (double x0 : {0.5, 0.7}) {
    const double jump = action_loop_integral(*jc, {Vec2(x0, -0.3), Vec2(1.5, -0.3), Vec2(1.5, 0.3), Vec2(x0, 0.3)});
    CHECK(std::abs(std::abs(jump) - (1.0 - x0)) < 1e-5);
  }
}

TEST_CASE("a value on a cut has no second action") {
  const auto jc = instantiate("jaynes_cummings");
  CHECK_THROWS_AS(second_action(*jc, Vec2(1.0, 0.5), Vec2(0.5, 0.1), {1}), Error);
}

TEST_CASE("toric polygons are their momentum images") {
  const MarkedPolygon s2 = build_polygon(*instantiate("s2_height"));
  REQUIRE(s2.vertices.size() == 2);
  CHECK((s2.vertices[0] - Vec2(-1, -1)).norm() < 1e-9);
  CHECK((s2.vertices[1] - Vec2(1, 1)).norm() < 1e-9);

  const auto cp = instantiate("cpn_rotation");
  const MarkedPolygon tri = build_polygon(*cp, {}, 16);
  CHECK(tri.vertices.size() == 3);
  CHECK(vertex_distance(tri.vertices, {Vec2(0, 0), Vec2(1, 0), Vec2(0, 1)}) < 1e-6);
  CHECK(tri.marked_points.empty());
  CHECK(delzant_check(tri).pass);

  const auto ca0 = instantiate("coupled_angular_momenta", {{"t", 0.0}});
  const MarkedPolygon quad = build_polygon(*ca0, {}, 24);
  CHECK(quad.marked_points.empty());
  PointSet ref;
  for (const auto& x : ca0->metadata().fixed_points) ref.push_back(ca0->value(x));
  CHECK(vertex_distance(quad.vertices, convex_hull(ref)) < 1e-5);
  CHECK(delzant_check(quad).pass);
}

TEST_CASE("Jaynes-Cummings polygon has one marked point and rational edges") {
  const MarkedPolygon& p = jc_polygon(1);
  CHECK(p.marked_points.size() == 1);
  CHECK(p.cut_signs == std::vector<int>{1});
  REQUIRE(p.edges.size() == p.vertices.size());
  for (const auto& e : p.edges) CHECK(e.rational);
  CHECK(delzant_check(p).pass);
}

TEST_CASE("cut-sign variants are equivalent") {
  CHECK(polygon_equivalence(jc_polygon(1), jc_polygon(-1)));
  CHECK_FALSE(polygon_equivalence(jc_polygon(1), polygon_of({Vec2(0, 0), Vec2(1, 0), Vec2(0, 1)})));
}

TEST_CASE("equivalence under translation and identity") {
  const MarkedPolygon& p = jc_polygon(1);
  CHECK(polygon_equivalence(p, p));
  CHECK(polygon_equivalence(p, transform(p, Eigen::Matrix2d::Identity(), Vec2(3, -1))));
  Eigen::Matrix2d shear;
  shear << 1, 0, 1, 1;
  CHECK(polygon_equivalence(p, transform(p, shear, Vec2(0.5, 0))));
}

TEST_CASE("delzant check") {
  CHECK(delzant_check(polygon_of({Vec2(0, 0), Vec2(1, 0), Vec2(1, 1), Vec2(0, 1)})).pass);
  const DelzantCertificate bad = delzant_check(polygon_of({Vec2(0, 0), Vec2(2, 0), Vec2(0, 3)}));
  CHECK_FALSE(bad.pass);
  CHECK(bad.violating == std::vector<int>{1, 2});
  CHECK_THROWS_AS(delzant_check(polygon_of({Vec2(0, 0), Vec2(1, 0), Vec2(std::sqrt(2.0), 1)})), Error);
}

TEST_CASE("rational directions") {
  const auto e = rational_direction(Vec2(2.0, -1.0) * 0.37, 64, 1e-9);
  REQUIRE(e.has_value());
  CHECK(e->direction == Vec2i(2, -1));
  CHECK_FALSE(rational_direction(Vec2(1.0, std::sqrt(2.0)), 64, 1e-9).has_value());
}

TEST_CASE("action chart is closed and identical serially and in parallel") {
  const auto jc = instantiate("jaynes_cummings");
  ActionOptions par, ser;
  ser.exec = Execution::serial();
  const ActionChart a = action_chart(*jc, {}, 8, par);
  const ActionChart b = action_chart(*jc, {}, 8, ser);
  CHECK(a.checked_edges > 0);
  CHECK(a.closure_defect < 1e-6);
  REQUIRE(a.i2.size() == b.i2.size());
  for (std::size_t i = 0; i < a.i2.size(); ++i)
    if (std::isfinite(a.i2[i])) CHECK(a.i2[i] == b.i2[i]);
}
