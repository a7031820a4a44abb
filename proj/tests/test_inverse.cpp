#include <cmath>
#include <numbers>

#include "doctest.h"
#include "semitoric/catalog.hpp"
#include "semitoric/error.hpp"
#include "semitoric/image.hpp"
#include "semitoric/inverse.hpp"

using namespace semitoric;

namespace {
LoopSpec loop_with(const Vec2& center, double radius, double window) {
  LoopSpec loop{center, radius, window, 8};
  const double half = std::asin(std::min(1.0, window / (2.0 * radius)));
  loop.windows = std::max(8, static_cast<int>(std::ceil(std::numbers::pi / half)));
  return loop;
}

const JointSpectrum& coupled40() {
  static const JointSpectrum s = joint_spectrum(build_coupled_spins_for(40, 1.0, 2.5, 0.5));
  return s;
}
}  // namespace

TEST_CASE("estimate_image") {
  const JointSpectrum spin = joint_spectrum(build_spin_toric(40));
  const double cell = 0.05;
  const ImageRegion r = estimate_image(spin, cell);
  CHECK_FALSE(r.empty());
  const PointSet segment{Vec2(-1, -1), Vec2(1, 1)};
  CHECK(hausdorff_to_region(r.cell_centers(), segment, 0.005) <= 2 * cell + spin.hbar);
  CHECK(estimate_image(PointSet{}, 0.1).empty());

  const JointSpectrum jc = joint_spectrum(build_jaynes_cummings(20, 200));
  const auto model = instantiate("jaynes_cummings");
  const double sigma = typical_spacing(jc.points);
  const ImageRegion jr = estimate_image(jc, 2 * sigma);
  const PointSet cells = clip_to_window(*model, jr.cell_centers());
  const PointSet sampled = clip_to_window(*model, sample_image(*model, 20000));
  CHECK(hausdorff(cells, sampled) < 0.1);
}

TEST_CASE("lattice fits") {
  // Exact lattice g0 (2 pi hbar Z^2).
  const double hbar = 0.01;
  Mat2 g0;
  g0 << 1.0, 0.3, -0.2, 0.8;
  PointSet pts;
  for (int a = -30; a <= 30; ++a)
    for (int b = -30; b <= 30; ++b) pts.push_back(Vec2(0.1, -0.2) + 2 * std::numbers::pi * hbar * g0 * Vec2(a, b));
  const LatticeFit f = fit_lattice(pts, Vec2(0.1, -0.2), 0.5, hbar);
  CHECK(f.residual < 1e-12);
  CHECK(std::abs(std::abs(f.basis.determinant()) - std::pow(2 * std::numbers::pi * hbar, 2) * g0.determinant()) < 1e-12);

  const JointSpectrum spin = joint_spectrum(build_spin_toric(40));
  CHECK_THROWS_AS(fit_lattice(spin.points, Vec2(0, 0), 0.5, spin.hbar), Error);
  const LadderFit ladder = fit_ladder(spin.points, Vec2(0, 0), 0.5);
  CHECK(ladder.step.norm() == doctest::Approx(std::sqrt(2.0) * spin.hbar));

  std::vector<double> res;
  for (double j : {20.0, 40.0}) {
    const JointSpectrum s = j == 40.0 ? coupled40() : joint_spectrum(build_coupled_spins_for(j, 1.0, 2.5, 0.5));
    const Vec2 c = s.points[static_cast<std::size_t>(PointIndex(s.points).nearest(Vec2(2.0, 0.3)))];
    res.push_back(fit_lattice(s.points, c, 4.5 * s.hbar, s.hbar).residual);
  }
  CHECK(res[0] / res[1] >= 3.0);
  CHECK(res[0] / res[1] <= 5.0);
}

TEST_CASE("monodromy") {
  const JointSpectrum& s = coupled40();
  const double sigma = typical_spacing(s.points);
  const MonodromyResult reg = transport_monodromy(s.points, loop_with(Vec2(1.0, 0.0), 6 * sigma, 3 * sigma), s.hbar);
  CHECK(reg.identity());
  const MonodromyResult ff = transport_monodromy(s.points, loop_with(Vec2(-1.5, 0.0), 6 * sigma, 3 * sigma), s.hbar);
  CHECK_FALSE(ff.identity());
  CHECK(ff.matrix.determinant() == 1);
  CHECK(std::abs(ff.matrix.trace()) == 2);
  CHECK(std::abs(ff.normal_form(0, 1)) == 1);
  const MonodromyResult wider = transport_monodromy(s.points, loop_with(Vec2(-1.5, 0.0), 7 * sigma, 3 * sigma), s.hbar);
  CHECK(wider.matrix == ff.matrix);

  const JointSpectrum jc = joint_spectrum(build_jaynes_cummings(40, 400));
  const double sj = typical_spacing(jc.points);
  const MonodromyResult m = transport_monodromy(jc.points, loop_with(Vec2(1.0, 0.0), 6 * sj, 3 * sj), jc.hbar);
  CHECK(std::abs(m.matrix.trace()) == 2);
  CHECK(std::abs(m.normal_form(0, 1)) == 1);

  CHECK_THROWS_AS(transport_monodromy(s.points, LoopSpec{Vec2(-1.5, 0), 0.3, 0.01, 8}, s.hbar), Error);
}

TEST_CASE("unipotent normal form") {
  Eigen::Matrix2i M;
  M << 1, 0, -1, 1;
  const Eigen::Matrix2i N = unipotent_normal_form(M);
  CHECK(N(0, 0) == 1);
  CHECK(N(1, 0) == 0);
  CHECK(N(1, 1) == 1);
  CHECK(std::abs(N(0, 1)) == 1);
}

TEST_CASE("locate marked values") {
  std::vector<JointSpectrum> spin, flat, jc;
  for (double j : {20.0, 40.0}) {
    spin.push_back(joint_spectrum(build_spin_toric(j)));
    flat.push_back(joint_spectrum(build_coupled_spins_for(j, 1.0, 2.5, 0.0)));
    jc.push_back(joint_spectrum(build_jaynes_cummings(j, static_cast<int>(10 * j))));
  }
  CHECK(locate_marked_values(spin).empty());
  CHECK(locate_marked_values(flat).empty());
  const auto found = locate_marked_values(jc);
  REQUIRE(found.size() == 1);
  CHECK((found[0].value - Vec2(1, 0)).norm() < 0.05);
}
