#include "semitoric/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "semitoric/error.hpp"

namespace semitoric {

namespace {

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <class T>
void read_field(const Json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::InvalidConfig, std::string("config field '") + key + "': " + e.what());
  }
}

}  // namespace

Json to_json(const RunConfig& c) {
  Json values = Json::array();
  for (const auto& v : c.values) values.push_back({v[0], v[1]});
  return {
      {"command", c.command},
      {"model", c.model},
      {"params", c.params},
      {"tol", c.tol},
      {"resolution", c.resolution},
      {"grid", c.grid},
      {"j_values", c.j_values},
      {"n_max_factor", c.n_max_factor},
      {"cut_signs", c.cut_signs},
      {"values", values},
      {"sweep_param", c.sweep_param},
      {"sweep_from", c.sweep_from},
      {"sweep_to", c.sweep_to},
      {"sweep_steps", c.sweep_steps},
      {"sweep_point", c.sweep_point},
      {"spectrum_file", c.spectrum_file},
      {"output_dir", c.output_dir},
      {"seed", c.seed},
      {"workers", c.workers},
  };
}

RunConfig config_from_json(const Json& j) {
  if (!j.is_object()) fail(ErrorKind::InvalidConfig, "config must be a JSON object");
  static const std::set<std::string> known = {
      "command",    "model",       "params",      "tol",        "resolution",  "grid",          "j_values",
      "n_max_factor", "cut_signs", "values",      "sweep_param", "sweep_from", "sweep_to",      "sweep_steps",
      "sweep_point", "spectrum_file", "output_dir", "seed",      "workers"};
  for (const auto& [key, value] : j.items())
    if (!known.count(key)) fail(ErrorKind::InvalidConfig, "unknown config field '" + key + "'");
  RunConfig c;
  read_field(j, "command", c.command);
  read_field(j, "model", c.model);
  read_field(j, "params", c.params);
  read_field(j, "tol", c.tol);
  read_field(j, "resolution", c.resolution);
  read_field(j, "grid", c.grid);
  read_field(j, "j_values", c.j_values);
  read_field(j, "n_max_factor", c.n_max_factor);
  read_field(j, "cut_signs", c.cut_signs);
  if (j.contains("values")) {
    std::vector<std::vector<double>> raw;
    read_field(j, "values", raw);
    for (const auto& v : raw) {
      if (v.size() != 2) fail(ErrorKind::InvalidConfig, "each entry of 'values' must be a pair");
      c.values.emplace_back(v[0], v[1]);
    }
  }
  read_field(j, "sweep_param", c.sweep_param);
  read_field(j, "sweep_from", c.sweep_from);
  read_field(j, "sweep_to", c.sweep_to);
  read_field(j, "sweep_steps", c.sweep_steps);
  read_field(j, "sweep_point", c.sweep_point);
  read_field(j, "spectrum_file", c.spectrum_file);
  read_field(j, "output_dir", c.output_dir);
  read_field(j, "seed", c.seed);
  read_field(j, "workers", c.workers);
  return c;
}

std::string render_config(const RunConfig& config) { return to_json(config).dump(2); }

RunConfig parse_config(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorKind::InvalidConfig, std::string("config is not valid JSON: ") + e.what());
  }
  return config_from_json(j);
}

std::filesystem::path output_directory(const RunConfig& config) {
  if (!config.output_dir.empty()) return config.output_dir;
  if (const char* env = std::getenv("SEMITORIC_OUTPUT_DIR"); env && *env) return env;
  return std::filesystem::current_path();
}

std::string format_double(double v) { return Json(v).dump(); }

void write_spectrum_csv(std::ostream& out, const std::vector<JointSpectrum>& spectra) {
  out << "hbar,lambda1,lambda2,block\n";
  for (const auto& s : spectra)
    for (std::size_t i = 0; i < s.points.size(); ++i)
      out << g17(s.hbar) << ',' << g17(s.points[i][0]) << ',' << g17(s.points[i][1]) << ','
          << (i < s.block.size() ? s.block[i] : -1) << '\n';
}

std::vector<JointSpectrum> read_spectrum_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) fail(ErrorKind::InvalidConfig, "spectrum CSV is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "hbar,lambda1,lambda2,block")
    fail(ErrorKind::InvalidConfig, "spectrum CSV header must be 'hbar,lambda1,lambda2,block'");
  std::vector<JointSpectrum> out;
  std::map<double, std::size_t> slot;
  long row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    std::istringstream fields(line);
    std::string a, b, c, d;
    if (!std::getline(fields, a, ',') || !std::getline(fields, b, ',') || !std::getline(fields, c, ',') ||
        !std::getline(fields, d))
      fail(ErrorKind::InvalidConfig, "spectrum CSV row " + std::to_string(row) + " needs 4 fields");
    double hbar = 0, l1 = 0, l2 = 0;
    int block = 0;
    try {
      hbar = std::stod(a);
      l1 = std::stod(b);
      l2 = std::stod(c);
      block = std::stoi(d);
    } catch (const std::exception&) {
      fail(ErrorKind::InvalidConfig, "spectrum CSV row " + std::to_string(row) + " is not numeric");
    }
    auto [it, inserted] = slot.try_emplace(hbar, out.size());
    if (inserted) {
      out.emplace_back();
      out.back().hbar = hbar;
    }
    out[it->second].points.emplace_back(l1, l2);
    out[it->second].block.push_back(block);
  }
  return out;
}

Json polygon_to_json(const MarkedPolygon& poly) {
  Json vertices = Json::array(), marked = Json::array(), edges = Json::array(), labels = Json::array();
  for (const auto& v : poly.vertices) vertices.push_back({v[0], v[1]});
  for (const auto& m : poly.marked_points) marked.push_back({m[0], m[1]});
  for (const auto& e : poly.edges)
    edges.push_back({{"direction", {e.direction[0], e.direction[1]}}, {"rational", e.rational}, {"slope_error", e.slope_error}});
  for (const auto& t : poly.twisting_labels) labels.push_back(t ? Json(*t) : Json(nullptr));
  std::vector<int> cut_vertices;
  for (std::size_t i = 0; i < poly.cut_vertex.size(); ++i)
    if (poly.cut_vertex[i]) cut_vertices.push_back(static_cast<int>(i));
  return {{"vertices", vertices},   {"marked_points", marked},  {"cut_signs", poly.cut_signs},
          {"twisting_labels", labels}, {"edges", edges},         {"cut_vertices", cut_vertices}};
}

MarkedPolygon polygon_from_json(const Json& j) {
  MarkedPolygon p;
  try {
    for (const auto& v : j.at("vertices")) p.vertices.emplace_back(v.at(0).get<double>(), v.at(1).get<double>());
    for (const auto& m : j.at("marked_points")) p.marked_points.emplace_back(m.at(0).get<double>(), m.at(1).get<double>());
    p.cut_signs = j.value("cut_signs", std::vector<int>{});
    if (j.contains("twisting_labels"))
      for (const auto& t : j.at("twisting_labels"))
        p.twisting_labels.push_back(t.is_null() ? std::nullopt : std::optional<int>(t.get<int>()));
    if (j.contains("edges"))
      for (const auto& e : j.at("edges")) {
        EdgeCertificate c;
        c.direction = Vec2i(e.at("direction").at(0).get<int>(), e.at("direction").at(1).get<int>());
        c.rational = e.at("rational").get<bool>();
        c.slope_error = e.at("slope_error").get<double>();
        p.edges.push_back(c);
      }
    p.cut_vertex.assign(p.vertices.size(), false);
    for (int i : j.value("cut_vertices", std::vector<int>{}))
      if (i >= 0 && static_cast<std::size_t>(i) < p.cut_vertex.size()) p.cut_vertex[static_cast<std::size_t>(i)] = true;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::InvalidConfig, std::string("malformed polygon JSON: ") + e.what());
  }
  return p;
}

std::string render_svg(const std::vector<SvgLayer>& layers, const Json& config, int size) {
  Vec2 lo = Vec2::Constant(std::numeric_limits<double>::infinity()), hi = -lo;
  for (const auto& l : layers)
    for (const auto& p : l.points) {
      lo = lo.cwiseMin(p);
      hi = hi.cwiseMax(p);
    }
  if (!lo.allFinite()) {
    lo = Vec2::Zero();
    hi = Vec2::Ones();
  }
  const double span = std::max((hi - lo).maxCoeff(), 1e-12);
  const double margin = 20.0, scale = (size - 2.0 * margin) / span;
  auto px = [&](const Vec2& p) {
    return std::make_pair(margin + (p[0] - lo[0]) * scale, size - margin - (p[1] - lo[1]) * scale);
  };
  auto num = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return std::string(buf);
  };
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size << "\" viewBox=\"0 0 "
      << size << ' ' << size << "\">\n";
  // The config goes into a metadata element; "--" cannot appear in JSON
  // output outside strings, so a CDATA section is safe.
  svg << "<metadata><![CDATA[" << config.dump() << "]]></metadata>\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (const auto& l : layers) {
    if (l.closed_path && l.points.size() >= 2) {
      svg << "<path fill=\"" << l.color << "\" fill-opacity=\"0.15\" stroke=\"" << l.color << "\" d=\"";
      for (std::size_t i = 0; i < l.points.size(); ++i) {
        const auto [x, y] = px(l.points[i]);
        svg << (i == 0 ? 'M' : 'L') << num(x) << ' ' << num(y) << ' ';
      }
      svg << "Z\"/>\n";
    } else {
      for (const auto& p : l.points) {
        const auto [x, y] = px(p);
        svg << "<circle cx=\"" << num(x) << "\" cy=\"" << num(y) << "\" r=\"" << num(l.radius) << "\" fill=\"" << l.color
            << "\"/>\n";
      }
    }
  }
  svg << "</svg>\n";
  return svg.str();
}

std::filesystem::path write_output(const std::filesystem::path& dir, const std::string& name, const std::string& text) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  const auto path = dir / name;
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::InvalidConfig, "cannot write " + path.string());
  out << text;
  return path;
}

}  // namespace semitoric
