#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "semitoric/image.hpp"
#include "semitoric/catalog.hpp"
#include "semitoric/error.hpp"
#include "semitoric/planar.hpp"
#include "semitoric/quantum.hpp"

using namespace semitoric;

namespace {
std::vector<double> sorted_first(const JointSpectrum& s) {
  std::vector<double> v;
  for (const auto& p : s.points) v.push_back(p[0]);
  std::sort(v.begin(), v.end());
  return v;
}
}  // namespace

TEST_CASE("spin toric") {
  const auto half = sorted_first(joint_spectrum(build_spin_toric(0.5)));
  REQUIRE(half.size() == 2);
  CHECK(half[0] == doctest::Approx(-1.0));
  CHECK(half[1] == doctest::Approx(1.0));

  const auto ten = sorted_first(joint_spectrum(build_spin_toric(10)));
  REQUIRE(ten.size() == 21);
  CHECK(ten.front() == doctest::Approx(-1.0));
  CHECK(ten.back() == doctest::Approx(1.0));
  for (std::size_t i = 1; i < ten.size(); ++i) CHECK(ten[i] - ten[i - 1] == doctest::Approx(0.1));

  const JointSpectrum two = joint_spectrum(build_spin_toric(2));
  CHECK(two.points.size() == 5);
  for (const auto& p : two.points) CHECK(p[0] == p[1]);

  CHECK_THROWS_AS(build_spin_toric(0.3), Error);
}

TEST_CASE("spin toric converges to [-1, 1]") {
  const PointSet segment = classical_image_polygon(*instantiate("s2_height"));
  double prev = 1e9;
  for (double j : {5.0, 10.0, 20.0}) {
    const double d = hausdorff_to_region(joint_spectrum(build_spin_toric(j)).points, segment, 0.1 / j);
    CHECK(d < prev);
    CHECK(d <= 1.0 / j);
    prev = d;
  }
}

TEST_CASE("Jaynes-Cummings operators") {
  const OperatorPair p = build_jaynes_cummings(5, 60);
  CHECK(hermiticity_defect(p.J) < 1e-12);
  CHECK(hermiticity_defect(p.H) < 1e-12);
  CHECK(relative_commutator(p) < 1e-12);
  SpectrumOptions opts;
  opts.keep_vectors = true;
  const JointSpectrum s = joint_spectrum(p, opts);
  CHECK(max_joint_residual(p, s) < 1e-8);
  // Distinct J eigenvalues are spaced by hbar.
  std::vector<double> levels;
  for (const auto& b : s.blocks) levels.push_back(b.lambda1);
  std::sort(levels.begin(), levels.end());
  for (std::size_t i = 1; i < std::min<std::size_t>(levels.size(), 30); ++i)
    CHECK(levels[i] - levels[i - 1] == doctest::Approx(p.hbar));
}

TEST_CASE("Jaynes-Cummings spectrum lies near the classical image") {
  const auto jc = instantiate("jaynes_cummings");
  const JointSpectrum s = joint_spectrum(build_jaynes_cummings(10, 100));
  const PointSet region = classical_image_polygon(*jc, 200);
  double worst = 0;
  for (const auto& p : clip_to_window(*jc, s.points)) worst = std::max(worst, distance_to_region(p, region));
  CHECK(worst < 0.2);
}

TEST_CASE("coupled spins") {
  const OperatorPair p = build_coupled_spins_for(10, 1.0, 2.5, 0.5);
  CHECK(relative_commutator(p) < 1e-12);
  const JointSpectrum s = joint_spectrum(p);
  CHECK(static_cast<long>(s.points.size()) + s.excluded == p.dims);
  CHECK(s.excluded == 0);
  CHECK(p.dims == 21 * 51);  // j1 = R1 j, j2 = R2 j
  for (const auto& v : s.points) {
    CHECK(std::abs(v[0]) <= 3.5 + 1e-9);
    CHECK(std::abs(v[1]) <= 1.0 + p.hbar);
  }
  CHECK_THROWS_AS(build_coupled_spins(10, 10, 1.0, 2.5, 0.5), Error);

  // t = 0: H is the first spin's s_z.
  const JointSpectrum z = joint_spectrum(build_coupled_spins_for(4, 1.0, 2.5, 0.0));
  for (const auto& v : z.points) {
    const double k = v[1] * 4.0;
    CHECK(std::abs(k - std::round(k)) < 1e-9);
  }
}

TEST_CASE("block spectrum matches the dense reference") {
  for (const OperatorPair& p : {build_coupled_spins_for(3, 1.0, 2.5, 0.5), build_jaynes_cummings(3, 20)}) {
    SpectrumOptions ser;
    ser.exec = Execution::serial();
    const JointSpectrum a = joint_spectrum(p), b = joint_spectrum(p, ser), ref = joint_spectrum_reference(p);
    REQUIRE(a.points.size() == b.points.size());
    for (std::size_t i = 0; i < a.points.size(); ++i) CHECK(a.points[i] == b.points[i]);
    auto key = [](PointSet v) {
      std::sort(v.begin(), v.end(), [](const Vec2& x, const Vec2& y) { return x[0] < y[0] || (x[0] == y[0] && x[1] < y[1]); });
      return v;
    };
    const PointSet ka = key(a.points), kr = key(ref.points);
    REQUIRE(ka.size() == kr.size());
    for (std::size_t i = 0; i < ka.size(); ++i) CHECK((ka[i] - kr[i]).norm() < 1e-9);
  }
}
