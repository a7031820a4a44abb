#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "doctest.h"
#include "semitoric/error.hpp"
#include "semitoric/io.hpp"

using namespace semitoric;

TEST_CASE("config round trip") {
  RunConfig c;
  c.command = "polygon";
  c.model = "coupled_angular_momenta";
  c.params = {{"t", 0.1 + 0.2}, {"R2", 2.5}};
  c.tol = 1e-11;
  c.j_values = {10, 20, 40.5};
  c.cut_signs = {1, -1};
  c.values = {Vec2(0.1, 1.0 / 3.0)};
  c.sweep_point = {0, 0, 1, 0, 0, -1};
  c.seed = 42;
  c.workers = 3;
  CHECK(parse_config(render_config(c)) == c);
  CHECK(parse_config(render_config(RunConfig{})) == RunConfig{});
}

TEST_CASE("a config naming only the model is complete") {
  const RunConfig c = parse_config(R"({"model": "jaynes_cummings"})");
  CHECK(c.model == "jaynes_cummings");
  CHECK(c.j_values == std::vector<double>{10, 20, 40});
  CHECK(c.resolution == RunConfig{}.resolution);
}

TEST_CASE("invalid configs") {
  CHECK_THROWS_AS(parse_config("{not json"), Error);
  CHECK_THROWS_AS(parse_config(R"({"model": 3})"), Error);
  CHECK_THROWS_AS(parse_config(R"({"mdoel": "jaynes_cummings"})"), Error);
  CHECK_THROWS_AS(parse_config(R"({"values": [[1, 2, 3]]})"), Error);
  CHECK_THROWS_AS(parse_config("[1, 2]"), Error);
}

TEST_CASE("output directory resolution") {
  RunConfig c;
  c.output_dir = "/tmp/explicit";
  CHECK(output_directory(c) == "/tmp/explicit");
  c.output_dir.clear();
  setenv("SEMITORIC_OUTPUT_DIR", "/tmp/from_env", 1);
  CHECK(output_directory(c) == "/tmp/from_env");
  unsetenv("SEMITORIC_OUTPUT_DIR");
  CHECK(output_directory(c) == std::filesystem::current_path());
}

TEST_CASE("spectrum CSV round trip") {
  JointSpectrum a;
  a.hbar = 0.1;
  a.points = {Vec2(0.1, 1.0 / 3.0), Vec2(-2.0 / 7.0, 1e-17)};
  a.block = {0, 1};
  JointSpectrum b;
  b.hbar = 0.05;
  b.points = {Vec2(1, 2)};
  b.block = {0};
  std::stringstream csv;
  write_spectrum_csv(csv, {a, b});
  CHECK(csv.str().rfind("hbar,lambda1,lambda2,block\n0.10000000000000001,", 0) == 0);
  const auto back = read_spectrum_csv(csv);
  REQUIRE(back.size() == 2);
  CHECK(back[0].hbar == a.hbar);
  CHECK(back[0].points == a.points);
  CHECK(back[0].block == a.block);
  CHECK(back[1].points == b.points);

  std::stringstream bad("x,y\n");
  CHECK_THROWS_AS(read_spectrum_csv(bad), Error);
  std::stringstream short_row("hbar,lambda1,lambda2,block\n0.1,2\n");
  CHECK_THROWS_AS(read_spectrum_csv(short_row), Error);
}

TEST_CASE("polygon JSON round trip") {
  MarkedPolygon p;
  p.vertices = {Vec2(0, 0), Vec2(1, 0), Vec2(0, 1.0 / 3.0)};
  p.marked_points = {Vec2(0.2, 0.1)};
  p.cut_signs = {-1};
  p.twisting_labels = {std::nullopt};
  p.edges = {{Vec2i(1, 0), 0.0, true}, {Vec2i(-3, 1), 1e-12, true}, {Vec2i(0, -1), 0.0, true}};
  p.cut_vertex = {false, true, false};
  const MarkedPolygon q = polygon_from_json(Json::parse(polygon_to_json(p).dump()));
  CHECK(q.vertices == p.vertices);
  CHECK(q.marked_points == p.marked_points);
  CHECK(q.cut_signs == p.cut_signs);
  CHECK(q.cut_vertex == p.cut_vertex);
  CHECK(q.twisting_labels.size() == 1);
  CHECK(q.edges[1].direction == Vec2i(-3, 1));
}

TEST_CASE("SVG embeds the config") {
  RunConfig c;
  c.model = "cpn_rotation";
  const std::string svg = render_svg({{{Vec2(0, 0), Vec2(1, 0), Vec2(0, 1)}, true, "#000000", 1.0}}, to_json(c));
  CHECK(svg.find("<svg") == 0);
  CHECK(svg.find("\"model\":\"cpn_rotation\"") != std::string::npos);
  CHECK(svg.find("<path") != std::string::npos);
}

TEST_CASE("shortest round-trip doubles") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
}
