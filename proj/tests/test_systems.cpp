#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "semitoric/catalog.hpp"
#include "semitoric/error.hpp"
#include "semitoric/image.hpp"
#include "support.hpp"

using namespace semitoric;
using semitoric::test::vec_of;

namespace {
bool has(const std::string& id) {
  const auto all = catalog();
  return std::any_of(all.begin(), all.end(), [&](const ModelDescriptor& d) { return d.id == id; });
}
}  // namespace

TEST_CASE("catalog contents") {
  CHECK(has("jaynes_cummings"));
  CHECK(has("spherical_pendulum"));
  CHECK(has("coupled_angular_momenta"));
  CHECK(has("s2_height"));
  CHECK(has("cpn_rotation"));
}

TEST_CASE("cpn_rotation with n = 1 is a height-type system with image [0, lambda]") {
  const auto cp1 = instantiate("cpn_rotation", {{"n", 1.0}, {"lambda", 2.0}});
  const Interval r = f1_range(*cp1);
  CHECK(r.lo == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(r.hi == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("instantiate") {
  CHECK(instantiate("coupled_angular_momenta", {{"R1", 1.0}, {"R2", 2.5}, {"t", 0.5}}) != nullptr);
  CHECK(instantiate("jaynes_cummings") != nullptr);
  CHECK(instantiate("jaynes_cummings")->params().empty());
  try {
    instantiate("coupled_angular_momenta", {{"R1", 2.0}, {"R2", 1.0}});
    FAIL("expected BadParameter");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::BadParameter);
  }
  try {
    instantiate("no_such_model");
    FAIL("expected UnknownModel");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::UnknownModel);
  }
  CHECK_THROWS_AS(instantiate("coupled_angular_momenta", {{"t", 1.5}}), Error);
  CHECK_THROWS_AS(instantiate("jaynes_cummings", {{"unknown", 1.0}}), Error);
}

TEST_CASE("closed-form fixed points are critical") {
  for (const auto& d : catalog()) {
    const auto model = instantiate(d.id);
    for (const auto& x : model->metadata().fixed_points) {
      CHECK(model->chart().constraint_residual(x) < 1e-12);
      CHECK(model->field(1, x).norm() < 1e-12);
      CHECK(model->field(2, x).norm() < 1e-12);
    }
  }
}

TEST_CASE("image slices") {
  const auto cp = instantiate("cpn_rotation");
  for (double c1 : {0.05, 0.3, 0.6, 0.95}) {
    const Interval s = image_slice(*cp, c1);
    CHECK(s.lo == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(s.hi == doctest::Approx(1.0 - c1).epsilon(1e-6));
  }
  CHECK(image_slice(*cp, 1.5).empty());
  const auto s2 = instantiate("s2_height");
  const PointSet seg = classical_image_polygon(*s2);
  CHECK(seg.size() == 2);
}

TEST_CASE("sampled image serial and parallel agree") {
  const auto jc = instantiate("jaynes_cummings");
  CHECK(sample_image(*jc, 500, 3, Execution::serial()) == sample_image(*jc, 500, 3, Execution::threads(4)));
}
