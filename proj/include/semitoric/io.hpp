#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "semitoric/model.hpp"
#include "semitoric/planar.hpp"
#include "semitoric/polygon.hpp"
#include "semitoric/quantum.hpp"

namespace semitoric {

using Json = nlohmann::json;

// Everything a run depends on. Every field has a default, so a config that
// names only the model is complete.
struct RunConfig {
  std::string command;
  std::string model;
  Params params;
  double tol = 1e-10;              // period and flow tolerance
  int resolution = 48;             // polygon columns
  int grid = 20;                   // defect scan grid
  std::vector<double> j_values{10.0, 20.0, 40.0};  // hbar = 1 / j
  int n_max_factor = 10;           // oscillator truncation n_max = factor * j
  std::vector<int> cut_signs;      // empty: all cuts upward
  std::vector<Vec2> values;        // regular values for `periods`
  std::string sweep_param = "t";
  double sweep_from = 0.0, sweep_to = 1.0;
  int sweep_steps = 21;
  std::vector<double> sweep_point;  // empty: the model's first candidate
  std::string spectrum_file;       // input CSV for `recover`
  std::string output_dir;          // empty: environment default
  std::uint64_t seed = 0;
  int workers = 0;                 // 0: available parallelism

  bool operator==(const RunConfig&) const = default;
};

Json to_json(const RunConfig& config);
// Missing keys keep their defaults; unknown keys throw InvalidConfig.
RunConfig config_from_json(const Json& j);
std::string render_config(const RunConfig& config);
RunConfig parse_config(const std::string& text);

// Resolution order: the config field, SEMITORIC_OUTPUT_DIR, then the
// current directory.
std::filesystem::path output_directory(const RunConfig& config);

// Shortest representation that reads back to the same double.
std::string format_double(double v);

// Spectrum CSV, header `hbar,lambda1,lambda2,block`, 17 significant digits.
void write_spectrum_csv(std::ostream& out, const std::vector<JointSpectrum>& spectra);
std::vector<JointSpectrum> read_spectrum_csv(std::istream& in);

Json polygon_to_json(const MarkedPolygon& poly);
MarkedPolygon polygon_from_json(const Json& j);

// SVG with the config embedded as metadata. Polygons are drawn as closed
// paths, point sets as dots; everything is mapped into a fixed viewport.
struct SvgLayer {
  PointSet points;
  bool closed_path = false;
  std::string color = "#1f77b4";
  double radius = 1.5;  // dot radius in pixels
};
std::string render_svg(const std::vector<SvgLayer>& layers, const Json& config, int size = 640);

// Writes text to dir/name, creating dir as needed; returns the full path.
std::filesystem::path write_output(const std::filesystem::path& dir, const std::string& name, const std::string& text);

}  // namespace semitoric
