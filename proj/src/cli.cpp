#include "semitoric/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <omp.h>

#include "CLI11.hpp"
#include "semitoric/acceptance.hpp"
#include "semitoric/catalog.hpp"
#include "semitoric/error.hpp"
#include "semitoric/fibration.hpp"
#include "semitoric/image.hpp"
#include "semitoric/inverse.hpp"
#include "semitoric/io.hpp"
#include "semitoric/polygon.hpp"
#include "semitoric/quantum.hpp"
#include "semitoric/singularity.hpp"
#include "semitoric/taylor.hpp"

namespace semitoric {

namespace {

Json vec_json(const Vec& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Json pair_json(const Vec2& v) { return Json::array({v[0], v[1]}); }

Json points_json(const PointSet& pts) {
  Json a = Json::array();
  for (const auto& p : pts) a.push_back(pair_json(p));
  return a;
}

Json matrix_json(const Eigen::Matrix2i& M) {
  return Json::array({Json::array({M(0, 0), M(0, 1)}), Json::array({M(1, 0), M(1, 1)})});
}

std::vector<double> parse_numbers(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      fail(ErrorKind::InvalidConfig, what + " expects comma-separated numbers, got '" + text + "'");
    }
  }
  return out;
}

Execution execution(const RunConfig& c) { return c.workers > 0 ? Execution::threads(c.workers) : Execution{}; }

// Everything that prints a result goes through here: the report embeds the
// config, is written to <command>.json and echoed on stdout.
struct Reporter {
  const RunConfig& config;
  std::ostream& out;

  void emit(Json body) const {
    body["config"] = to_json(config);
    const std::string text = body.dump(2) + "\n";
    write_output(output_directory(config), config.command + ".json", text);
    out << text;
  }
  void file(const std::string& name, const std::string& text) const {
    write_output(output_directory(config), name, text);
  }
};

ModelPtr model_of(const RunConfig& c) {
  if (c.model.empty()) fail(ErrorKind::InvalidConfig, "a model id is required (--model)");
  return instantiate(c.model, c.params);
}

CriticalSearchOptions census_options(const RunConfig& c) {
  CriticalSearchOptions o;
  o.seed = c.seed;
  o.exec = execution(c);
  return o;
}

Json critical_json(const CriticalPoint& p) {
  Json j{{"point", vec_json(p.point.coords)},
         {"rank", p.rank},
         {"type", to_string(p.type)},
         {"value", pair_json(p.value)}};
  if (p.rank == 0) {
    Json ev = Json::array();
    for (const auto& e : p.eigenvalues) ev.push_back(Json::array({e.real(), e.imag()}));
    j["eigenvalues"] = ev;
  }
  return j;
}

void cmd_systems(const Reporter& rep) {
  Json models = Json::array();
  for (const auto& d : catalog()) {
    Json params = Json::array();
    for (const auto& p : d.params) params.push_back({{"name", p.name}, {"default", p.default_value}, {"range", p.range}});
    models.push_back({{"id", d.id},
                      {"summary", d.summary},
                      {"dof", d.dof},
                      {"toric", d.flags.toric},
                      {"semitoric", d.flags.semitoric},
                      {"params", params}});
  }
  rep.emit({{"models", models}, {"quantum_models", {"spin_toric", "jaynes_cummings", "coupled_angular_momenta"}}});
}

void cmd_classify(const Reporter& rep) {
  const auto model = model_of(rep.config);
  const CriticalSearch census = find_critical_points(*model, census_options(rep.config));
  Json points = Json::array();
  std::map<std::string, int> counts;
  for (const auto& p : census.points) {
    points.push_back(critical_json(p));
    ++counts[to_string(p.type)];
  }
  rep.emit({{"model", model->id()}, {"points", points}, {"counts", counts}, {"dropped_seeds", census.dropped}});
}

void cmd_sweep(const Reporter& rep) {
  const RunConfig& c = rep.config;
  const auto base = model_of(c);
  if (c.sweep_steps < 2) fail(ErrorKind::InvalidConfig, "sweep needs at least 2 steps");
  Vec point;
  if (!c.sweep_point.empty()) {
    point = Eigen::Map<const Vec>(c.sweep_point.data(), static_cast<Eigen::Index>(c.sweep_point.size()));
  } else {
    // First closed-form rank-0 point that is focus-focus somewhere on the
    // sweep, else the first one.
    const auto& fixed = base->metadata().fixed_points;
    if (fixed.empty()) fail(ErrorKind::InvalidConfig, "model has no closed-form fixed point; pass --point");
    point = fixed.front();
    const double mid = 0.5 * (c.sweep_from + c.sweep_to);
    Params p = c.params;
    p[c.sweep_param] = mid;
    const auto probe = instantiate(c.model, p);
    for (const auto& x : fixed)
      if (classify(*probe, probe->point(x)).type == SingularityType::FocusFocus) {
        point = x;
        break;
      }
  }
  std::vector<double> grid;
  for (int i = 0; i < c.sweep_steps; ++i)
    grid.push_back(c.sweep_from + (c.sweep_to - c.sweep_from) * i / (c.sweep_steps - 1));
  const SweepResult result = sweep_parameter(
      [&](double t) {
        Params p = c.params;
        p[c.sweep_param] = t;
        return instantiate(c.model, p);
      },
      point, grid);
  Json samples = Json::array(), transitions = Json::array();
  for (const auto& s : result.samples) samples.push_back({{"t", s.t}, {"type", to_string(s.type)}});
  for (const auto& t : result.transitions)
    transitions.push_back(
        {{"t_low", t.t_low}, {"t_high", t.t_high}, {"before", to_string(t.before)}, {"after", to_string(t.after)}});
  rep.emit({{"model", c.model},
            {"parameter", c.sweep_param},
            {"point", vec_json(point)},
            {"samples", samples},
            {"transitions", transitions}});
}

void cmd_periods(const Reporter& rep) {
  const RunConfig& c = rep.config;
  const auto model = model_of(c);
  std::vector<Vec2> values = c.values;
  if (values.empty()) {
    const PointSet outline = classical_image_polygon(*model, 100, execution(c));
    Box box{outline.front(), outline.front()};
    for (const auto& p : outline) {
      box.lo = box.lo.cwiseMin(p);
      box.hi = box.hi.cwiseMax(p);
    }
    values = regular_grid(*model, box, std::max(2, c.grid / 4), 0.02 * (box.hi - box.lo).norm(), execution(c));
  }
  PeriodOptions opts;
  opts.tol = c.tol;
  opts.fiber.seed = c.seed;
  std::vector<PeriodLattice> lattices(values.size());
  for_each_index(values.size(), execution(c), [&](std::size_t i) { lattices[i] = period_lattice(*model, values[i], opts); });
  Json rows = Json::array();
  for (const auto& l : lattices)
    rows.push_back({{"value", pair_json(l.c)}, {"tau1", l.tau1}, {"tau2", l.tau2}, {"residual", l.residual}});
  rep.emit({{"model", model->id()}, {"lattices", rows}});
}

void cmd_polygon(const Reporter& rep) {
  const RunConfig& c = rep.config;
  const auto model = model_of(c);
  PolygonOptions opts;
  opts.action.periods.tol = std::max(c.tol, 1e-12);
  opts.action.exec = execution(c);
  const MarkedPolygon poly = build_polygon(*model, c.cut_signs, c.resolution, opts);
  Json report{{"model", model->id()}, {"polygon", polygon_to_json(poly)}};
  if (poly.vertices.size() >= 3) {
    try {
      const DelzantCertificate cert = delzant_check(poly);
      report["delzant"] = {{"pass", cert.pass}, {"violating", cert.violating}, {"determinants", cert.determinants}};
    } catch (const Error& e) {
      report["delzant"] = {{"pass", false}, {"error", e.name()}, {"message", e.what()}};
    }
  }
  std::vector<SvgLayer> layers{{poly.vertices, true, "#1f77b4", 1.5}};
  if (!poly.marked_points.empty()) layers.push_back({poly.marked_points, false, "#d62728", 4.0});
  rep.file("polygon.svg", render_svg(layers, to_json(c)));
  rep.emit(report);
}

void cmd_taylor(const Reporter& rep) {
  const RunConfig& c = rep.config;
  const auto model = model_of(c);
  const CriticalSearch census = find_critical_points(*model, census_options(c));
  TaylorOptions opts;
  opts.periods.tol = c.tol;
  opts.periods.fiber.seed = c.seed;
  opts.exec = execution(c);
  Json results = Json::array();
  for (const auto& p : census.points) {
    if (p.type != SingularityType::FocusFocus) continue;
    const TaylorLinear t = taylor_linear(*model, p, opts);
    results.push_back({{"point", vec_json(p.point.coords)},
                       {"value", pair_json(p.value)},
                       {"a10", t.a10},
                       {"a01", t.a01},
                       {"spread_a10", t.spread_a10},
                       {"spread_a01", t.spread_a01},
                       {"a10_representatives", t.a10_representatives},
                       {"alpha", t.normalization.alpha},
                       {"beta", t.normalization.beta}});
  }
  if (results.empty()) fail(ErrorKind::NotFocusFocus, "model " + model->id() + " has no focus-focus point");
  rep.emit({{"model", model->id()}, {"focus_focus", results}});
}

double param_or(const Params& p, const std::string& key, double fallback) {
  const auto it = p.find(key);
  return it == p.end() ? fallback : it->second;
}

OperatorPair quantum_pair(const RunConfig& c, double j) {
  if (c.model == "spin_toric") return build_spin_toric(j);
  if (c.model == "jaynes_cummings") {
    const double n = static_cast<double>(c.n_max_factor) * j;
    return build_jaynes_cummings(j, static_cast<int>(std::lround(n)));
  }
  if (c.model == "coupled_angular_momenta" || c.model == "coupled_spins")
    return build_coupled_spins_for(j, param_or(c.params, "R1", 1.0), param_or(c.params, "R2", 2.5),
                                   param_or(c.params, "t", 0.5));
  fail(ErrorKind::UnknownModel,
       "no quantization for '" + c.model + "' (spin_toric, jaynes_cummings, coupled_angular_momenta)");
}

std::vector<JointSpectrum> spectra_of(const RunConfig& c) {
  if (c.j_values.empty()) fail(ErrorKind::InvalidConfig, "j_values is empty");
  SpectrumOptions opts;
  opts.exec = execution(c);
  std::vector<JointSpectrum> out;
  for (double j : c.j_values) out.push_back(joint_spectrum(quantum_pair(c, j), opts));
  return out;
}

void cmd_spectrum(const Reporter& rep) {
  const std::vector<JointSpectrum> spectra = spectra_of(rep.config);
  std::ostringstream csv;
  write_spectrum_csv(csv, spectra);
  rep.file("spectrum.csv", csv.str());
  std::vector<SvgLayer> layers;
  Json summary = Json::array();
  for (const auto& s : spectra) {
    layers.push_back({s.points, false, "#1f77b4", 1.0});
    summary.push_back({{"hbar", s.hbar}, {"points", s.points.size()}, {"blocks", s.blocks.size()}, {"excluded", s.excluded}});
  }
  rep.file("spectrum.svg", render_svg({layers.back()}, to_json(rep.config)));
  rep.emit({{"model", rep.config.model}, {"spectra", summary}, {"csv", "spectrum.csv"}});
}

void cmd_recover(const Reporter& rep) {
  const RunConfig& c = rep.config;
  std::vector<JointSpectrum> spectra;
  if (!c.spectrum_file.empty()) {
    std::ifstream in(c.spectrum_file);
    if (!in) fail(ErrorKind::InvalidConfig, "cannot read spectrum file " + c.spectrum_file);
    spectra = read_spectrum_csv(in);
  } else {
    spectra = spectra_of(c);
  }
  if (spectra.empty()) fail(ErrorKind::EmptyGrid, "no spectrum points");
  std::sort(spectra.begin(), spectra.end(), [](const auto& a, const auto& b) { return a.hbar > b.hbar; });
  LocateOptions lo;
  lo.grid = c.grid;
  lo.exec = execution(c);
  Json per_hbar = Json::array();
  for (const auto& s : spectra) {
    const double sigma = typical_spacing(s.points);
    const ImageRegion region = estimate_image(s, lo.region_cell_spacings * sigma);
    per_hbar.push_back({{"hbar", s.hbar},
                        {"points", s.points.size()},
                        {"spacing", sigma},
                        {"region_cells", region.occupied_count()},
                        {"boundary_loops", region.boundaries.size()}});
  }
  const std::vector<MarkedValue> marked = locate_marked_values(spectra, lo);
  Json mv = Json::array();
  PointSet marks;
  for (const auto& m : marked) {
    mv.push_back({{"value", pair_json(m.value)}, {"monodromy", matrix_json(m.monodromy)}});
    marks.push_back(m.value);
  }
  const JointSpectrum& finest = spectra.back();
  std::vector<SvgLayer> layers{{finest.points, false, "#7f7f7f", 1.0}};
  const ImageRegion region = estimate_image(finest, lo.region_cell_spacings * typical_spacing(finest.points));
  for (const auto& loop : region.boundaries) layers.push_back({loop, true, "#1f77b4", 1.0});
  if (!marks.empty()) layers.push_back({marks, false, "#d62728", 5.0});
  rep.file("recover.svg", render_svg(layers, to_json(c)));
  rep.emit({{"spectra", per_hbar}, {"marked_values", mv}, {"boundary", points_json(region.boundaries.empty() ? PointSet{} : region.boundaries.front())}});
}

int cmd_selftest(const Reporter& rep, const std::vector<int>& criteria, std::ostream& log) {
  std::vector<int> ids = criteria;
  if (ids.empty())
    for (int i = 1; i <= 9; ++i) ids.push_back(i);
  Json results = Json::array();
  bool all = true;
  for (int id : ids) {
    const CriterionResult r = run_criterion(id);
    log << format_line(r) << '\n' << std::flush;
    results.push_back(to_json(r));
    all = all && r.pass;
  }
  Json body{{"criteria", results}, {"pass", all}, {"config", to_json(rep.config)}};
  rep.file("selftest.json", body.dump(2) + "\n");
  return all ? kExitOk : kExitNumeric;
}

void report_error(std::ostream& err, const std::string& kind, const std::string& message, int code) {
  err << Json{{"error", kind}, {"message", message}, {"exit_code", code}}.dump() << '\n';
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::InvalidConfig, "cannot read config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Semitoric integrable systems: singularities, periods, polygons, Taylor invariants and spectra"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, out_dir, model, spectrum_file;
  int workers = 0, resolution = 0, grid = 0, n_max_factor = 0, steps = 0, seed = 0;
  double tol = 0, from = 0, to = 0;
  std::string sweep_param, point_text, cuts_text, j_text;
  std::vector<std::string> param_items, value_items;
  std::vector<int> criteria;

  auto* o_config = app.add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
  auto* o_out = app.add_option("--out", out_dir, "output directory (default: $SEMITORIC_OUTPUT_DIR or .)");
  auto* o_workers = app.add_option("--workers", workers, "worker threads (0: available parallelism)")->check(CLI::NonNegativeNumber);
  auto* o_seed = app.add_option("--seed", seed, "quasi-random seed offset")->check(CLI::NonNegativeNumber);
  auto* o_model = app.add_option("--model", model, "model id");
  auto* o_param = app.add_option("--param", param_items, "model parameter name=value (repeatable)");
  auto* o_tol = app.add_option("--tol", tol, "period and flow tolerance")->check(CLI::PositiveNumber);
  auto* o_res = app.add_option("--resolution", resolution, "polygon columns")->check(CLI::Range(4, 4096));
  auto* o_grid = app.add_option("--grid", grid, "scan grid")->check(CLI::Range(2, 1000));

  app.add_subcommand("systems", "list the model catalog");
  app.add_subcommand("classify", "find and classify critical points");
  auto* sweep = app.add_subcommand("sweep", "classify a point across a parameter range");
  auto* o_sparam = sweep->add_option("--parameter", sweep_param, "parameter to vary");
  auto* o_from = sweep->add_option("--from", from, "start value");
  auto* o_to = sweep->add_option("--to", to, "end value");
  auto* o_steps = sweep->add_option("--steps", steps, "grid points")->check(CLI::Range(2, 100000));
  auto* o_point = sweep->add_option("--point", point_text, "phase-space point x1,x2,...");
  auto* periods = app.add_subcommand("periods", "period lattices at regular values");
  auto* o_value = periods->add_option("--value", value_items, "regular value c1,c2 (repeatable)");
  auto* polygon = app.add_subcommand("polygon", "marked semitoric polygon");
  auto* o_cuts = polygon->add_option("--cut-signs", cuts_text, "cut directions, e.g. 1,-1");
  app.add_subcommand("taylor", "linear Taylor invariant at each focus-focus point");
  auto* spectrum = app.add_subcommand("spectrum", "joint spectrum of the quantized system");
  auto* recover = app.add_subcommand("recover", "image, lattice and marked values from spectra");
  for (auto* sub : {spectrum, recover}) {
    sub->add_option("--j", j_text, "spin sizes j (hbar = 1/j), e.g. 10,20,40");
    sub->add_option("--n-max-factor", n_max_factor, "oscillator truncation n_max = factor * j")->check(CLI::Range(2, 1000));
  }
  auto* o_spectrum_file = recover->add_option("--spectrum", spectrum_file, "spectrum CSV to analyse");
  auto* selftest = app.add_subcommand("selftest", "run the acceptance suite");
  selftest->add_option("--criteria", criteria, "criteria to run (default: all)")->delimiter(',')->check(CLI::Range(1, 9));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return kExitOk;
    }
    report_error(err, "InvalidArguments", e.what(), kExitValidation);
    return kExitValidation;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    RunConfig c;
    if (*o_config) c = parse_config(read_file(config_path));
    c.command = command;
    if (*o_out) c.output_dir = out_dir;
    if (*o_workers) c.workers = workers;
    if (*o_seed) c.seed = static_cast<std::uint64_t>(seed);
    if (*o_model) c.model = model;
    for (const auto& item : param_items) {
      const auto eq = item.find('=');
      if (eq == std::string::npos || eq == 0) fail(ErrorKind::InvalidConfig, "--param expects name=value, got '" + item + "'");
      const auto v = parse_numbers(item.substr(eq + 1), "--param " + item.substr(0, eq));
      if (v.size() != 1) fail(ErrorKind::InvalidConfig, "--param expects one number, got '" + item + "'");
      c.params[item.substr(0, eq)] = v[0];
    }
    (void)o_param;
    if (*o_tol) c.tol = tol;
    if (*o_res) c.resolution = resolution;
    if (*o_grid) c.grid = grid;
    if (*o_sparam) c.sweep_param = sweep_param;
    if (*o_from) c.sweep_from = from;
    if (*o_to) c.sweep_to = to;
    if (*o_steps) c.sweep_steps = steps;
    if (*o_point) c.sweep_point = parse_numbers(point_text, "--point");
    if (*o_value) {
      c.values.clear();
      for (const auto& v : value_items) {
        const auto xy = parse_numbers(v, "--value");
        if (xy.size() != 2) fail(ErrorKind::InvalidConfig, "--value expects c1,c2, got '" + v + "'");
        c.values.emplace_back(xy[0], xy[1]);
      }
    }
    if (*o_cuts) {
      c.cut_signs.clear();
      for (double s : parse_numbers(cuts_text, "--cut-signs")) {
        if (s != 1.0 && s != -1.0) fail(ErrorKind::InvalidConfig, "cut signs must be 1 or -1");
        c.cut_signs.push_back(static_cast<int>(s));
      }
    }
    if (!j_text.empty()) c.j_values = parse_numbers(j_text, "--j");
    if (n_max_factor > 0) c.n_max_factor = n_max_factor;
    if (*o_spectrum_file) c.spectrum_file = spectrum_file;
    if (c.workers > 0) omp_set_num_threads(c.workers);

    const Reporter rep{c, out};
    if (command == "systems") cmd_systems(rep);
    else if (command == "classify") cmd_classify(rep);
    else if (command == "sweep") cmd_sweep(rep);
    else if (command == "periods") cmd_periods(rep);
    else if (command == "polygon") cmd_polygon(rep);
    else if (command == "taylor") cmd_taylor(rep);
    else if (command == "spectrum") cmd_spectrum(rep);
    else if (command == "recover") cmd_recover(rep);
    else if (command == "selftest") return cmd_selftest(rep, criteria, out);
    return kExitOk;
  } catch (const Error& e) {
    const int code = is_validation_error(e.kind()) ? kExitValidation : kExitNumeric;
    report_error(err, std::string(e.name()), e.what(), code);
    return code;
  } catch (const std::exception& e) {
    report_error(err, "InternalError", e.what(), kExitNumeric);
    return kExitNumeric;
  }
}

int run(int argc, const char* const* argv) { return run(argc, argv, std::cout, std::cerr); }

}  // namespace semitoric
