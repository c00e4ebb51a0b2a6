#include "workbench.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "stpa/channel.hpp"
#include "stpa/geometry_io.hpp"
#include "stpa/pattern.hpp"
#include "stpa/rng.hpp"

#ifndef STPA_VERSION
#define STPA_VERSION "0.0.0"
#endif

namespace workbench {

namespace fs = std::filesystem;
using namespace stpa;

json default_config() {
  return json::parse(R"({
    "seed": 2,
    "threads": 0,
    "output_dir": "out",
    "design_frequency_hz": 28e9,
    "tile": {
      "nx": 30, "ny": 30, "spacing": 0.5,
      "iterations": 200000, "initial_temperature": 0.002, "cooling_rate": 0.99997,
      "output": "tiling.json"
    },
    "sparsify": {
      "input": "",
      "r_c": 1.15, "s": 3.5, "tau": 1.618,
      "capture": "phase_center",
      "extent": "inside_aperture",
      "output": "thinned.json"
    },
    "optimize": {
      "input": "",
      "zeta": 1.5, "rb_tilde": 0.043, "mu": 0.04, "min_tile_distance": 1.0,
      "max_iterations": 60, "angle_step_deg": 1.0, "tolerance_db": 0.001,
      "output": "optimized.json",
      "trace": "trace.csv"
    },
    "pattern": {
      "input": "",
      "zeta": 1.5, "freq_ratio": 1.0, "angle_step_deg": 1.0,
      "csv": "pattern.csv",
      "metrics": "metrics.json"
    },
    "comm": {
      "input": "",
      "r_ue": 50.0, "theta_ue_deg": 70.0, "phi_ue_deg": 50.0,
      "rho": 0.5, "realizations": 200,
      "clusters": 8, "rays": 10, "nlos_offset_db": -10.0, "ray_spread_deg": 5.0,
      "snr_db": [0, 5, 10, 15, 20],
      "sensing_theta_deg": 70.0, "sensing_phi_deg": -130.0,
      "sweep_snr_db": 10.0, "sweep_step_deg": 1.0, "overlap_threshold": 0.05,
      "se_csv": "se_vs_snr.csv",
      "azimuth_csv": "scan_azimuth.csv",
      "elevation_csv": "scan_elevation.csv",
      "blockage": {
        "reference": "cupa:12x12",
        "r_ue": 70.0, "r_m": 35.0,
        "theta_min_deg": 40.0, "theta_max_deg": 89.5, "step_deg": 0.5,
        "eps_re": 0.1, "eps_im": -2.33, "sigma_b_db": 0.45, "gamma_blocked": 0.1,
        "snr_db": 10.0,
        "output": "blockage.json"
      }
    },
    "sensing": {
      "input": "",
      "carrier_hz": 28e9, "bandwidth_hz": 40e6, "subcarriers": 2048, "symbol_time_s": 51.2e-6,
      "dwell_symbols": 34,
      "elevation": {"min": 0.0, "max": 90.0, "step": 5.0},
      "azimuth": {"min": -180.0, "max": 180.0, "step": 5.0},
      "targets": [
        {"range_m": 70.0, "velocity_mps": 20.0, "theta_deg": 70.0, "phi_deg": 0.0},
        {"range_m": 70.0, "velocity_mps": 20.0, "theta_deg": 70.0, "phi_deg": 20.0}
      ],
      "rho": 0.5, "noise_offset_db": 10.0, "add_noise": true,
      "comm_beam": true, "comm_theta_deg": 70.0, "comm_phi_deg": 50.0,
      "range_velocity_angles": [[70.0, 0.0], [70.0, 20.0]],
      "range_velocity_max_range_m": 300.0,
      "range_velocity_prefix": "range_velocity",
      "angle_csv": "angle.csv",
      "detection": "detection.json"
    }
  })");
}

namespace {

json parse_value(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error&) {
    return text;
  }
}

void merge_into(json& base, const json& patch, const std::string& where) {
  for (const auto& [key, value] : patch.items()) {
    const std::string path = where.empty() ? key : where + "." + key;
    if (!base.contains(key)) throw std::invalid_argument("unknown config key '" + path + "'");
    if (base[key].is_object() && value.is_object())
      merge_into(base[key], value, path);
    else
      base[key] = value;
  }
}

void check_known(const json& reference, const json& config, const std::string& where) {
  for (const auto& [key, value] : config.items()) {
    const std::string path = where.empty() ? key : where + "." + key;
    if (!reference.contains(key)) throw std::invalid_argument("unknown config key '" + path + "'");
    if (reference[key].is_object() && value.is_object()) check_known(reference[key], value, path);
  }
}

fs::path out_path(const json& config, const std::string& name) {
  const fs::path p(name);
  return p.is_absolute() ? p : fs::path(config.at("output_dir").get<std::string>()) / p;
}

/// Explicit input, or the file the upstream stage writes by default.
std::string input_of(const json& config, const char* stage, const char* upstream, const char* key) {
  const auto explicit_input = config.at(stage).at("input").get<std::string>();
  if (!explicit_input.empty()) return explicit_input;
  return out_path(config, config.at(upstream).at(key).get<std::string>()).string();
}

std::ofstream open_csv(const fs::path& path, const RunInfo& info, const char* header) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << info.csv_comment() << '\n' << header << '\n';
  out << std::setprecision(10);
  return out;
}

void stamp(json& doc, const RunInfo& info) { doc["meta"] = info.to_json(); }

void prepare(const json& config) { set_thread_count(config.at("threads").get<int>()); }

ArrayGeometry load_centered(const std::string& source) { return load_geometry(source).centered(); }

}  // namespace

void apply_override(json& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw std::invalid_argument("override must look like path=value: '" + assignment + "'");
  const std::string path = assignment.substr(0, eq);
  json* node = &config;
  std::size_t start = 0;
  while (true) {
    const auto dot = path.find('.', start);
    const std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (key.empty()) throw std::invalid_argument("empty key in '" + path + "'");
    if (dot == std::string::npos) {
      (*node)[key] = parse_value(assignment.substr(eq + 1));
      return;
    }
    if (!node->contains(key) || !(*node)[key].is_object()) (*node)[key] = json::object();
    node = &(*node)[key];
    start = dot + 1;
  }
}

json resolve_config(const std::optional<json>& user, const std::vector<std::string>& overrides) {
  json config = default_config();
  if (user) {
    if (!user->is_object()) throw std::invalid_argument("config must be a JSON object");
    merge_into(config, *user, "");
  }
  for (const auto& o : overrides) apply_override(config, o);
  check_known(default_config(), config, "");
  return config;
}

std::string config_hash(const json& config) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(config.dump())));
  return buf;
}

std::string version() { return STPA_VERSION; }

RunInfo RunInfo::from(const json& config) {
  return {workbench::config_hash(config), config.at("seed").get<std::uint64_t>(), workbench::version()};
}

json RunInfo::to_json() const { return {{"config_hash", config_hash}, {"seed", seed}, {"version", version}}; }

std::string RunInfo::csv_comment() const {
  return "# config_hash=" + config_hash + " seed=" + std::to_string(seed) + " version=" + version;
}

ElementGrid element_grid(const json& config) {
  const auto& t = config.at("tile");
  return ElementGrid(t.at("nx").get<int>(), t.at("ny").get<int>(), t.at("spacing").get<double>());
}

DominoTiling design_tiling(const json& config) {
  const auto& t = config.at("tile");
  AnnealConfig anneal;
  anneal.iterations = t.at("iterations").get<int>();
  anneal.initial_temperature = t.at("initial_temperature").get<double>();
  anneal.cooling_rate = t.at("cooling_rate").get<double>();
  anneal.seed = stream_seed(config.at("seed").get<std::uint64_t>(), "tile");
  return maximize_entropy_tiling(element_grid(config), anneal);
}

ThinningParams thinning_params(const json& config) {
  const auto& s = config.at("sparsify");
  ThinningParams p;
  p.r_c = s.at("r_c").get<double>();
  p.s = s.at("s").get<double>();
  p.tau = s.at("tau").get<double>();
  const auto capture = s.at("capture").get<std::string>();
  if (capture == "phase_center")
    p.rule = CaptureRule::kPhaseCenter;
  else if (capture == "footprint")
    p.rule = CaptureRule::kFootprint;
  else
    throw std::invalid_argument("sparsify.capture must be phase_center or footprint");
  const auto extent = s.at("extent").get<std::string>();
  if (extent == "inside_aperture")
    p.extent = LatticeExtent::kInsideAperture;
  else if (extent == "cover_circumscribed")
    p.extent = LatticeExtent::kCoverCircumscribed;
  else
    throw std::invalid_argument("sparsify.extent must be inside_aperture or cover_circumscribed");
  return p;
}

SubarrayLayout sparsify(const json& config, const DominoTiling& tiling) {
  return select_tiles_by_sunflower(tiling, thinning_params(config));
}

PositionOptConfig position_config(const json& config) {
  const auto& o = config.at("optimize");
  PositionOptConfig p;
  p.zeta = o.at("zeta").get<double>();
  p.rb_tilde = o.at("rb_tilde").get<double>();
  p.mu = o.at("mu").get<double>();
  p.min_tile_distance = o.at("min_tile_distance").get<double>();
  p.max_iterations = o.at("max_iterations").get<int>();
  p.grid.step_deg = o.at("angle_step_deg").get<double>();
  p.tolerance_db = o.at("tolerance_db").get<double>();
  return p;
}

PositionOptResult optimize(const json& config, const SubarrayLayout& layout) {
  return optimize_subarray_positions(layout, position_config(config));
}

LinkConfig link_config(const json& config) {
  const auto& c = config.at("comm");
  LinkConfig l;
  l.r_ue = c.at("r_ue").get<double>();
  l.theta_ue_deg = c.at("theta_ue_deg").get<double>();
  l.phi_ue_deg = c.at("phi_ue_deg").get<double>();
  l.rho = c.at("rho").get<double>();
  l.realizations = c.at("realizations").get<int>();
  l.clusters.clusters = c.at("clusters").get<int>();
  l.clusters.rays = c.at("rays").get<int>();
  l.clusters.power_offset_db = c.at("nlos_offset_db").get<double>();
  l.clusters.ray_spread_deg = c.at("ray_spread_deg").get<double>();
  l.seed = stream_seed(config.at("seed").get<std::uint64_t>(), "comm");
  l.validate();
  return l;
}

BlockageScenario blockage_scenario(const json& config) {
  const auto& c = config.at("comm");
  const auto& b = c.at("blockage");
  BlockageScenario s;
  s.r_ue = b.at("r_ue").get<double>();
  s.theta_ue_deg = c.at("theta_ue_deg").get<double>();
  s.phi_ue_deg = c.at("phi_ue_deg").get<double>();
  s.r_m = b.at("r_m").get<double>();
  s.eps_b = {b.at("eps_re").get<double>(), b.at("eps_im").get<double>()};
  s.sigma_b_db = b.at("sigma_b_db").get<double>();
  s.gamma_blocked = b.at("gamma_blocked").get<double>();
  s.validate();
  return s;
}

OfdmParams ofdm_params(const json& config) {
  const auto& s = config.at("sensing");
  OfdmParams p;
  p.carrier_hz = s.at("carrier_hz").get<double>();
  p.bandwidth_hz = s.at("bandwidth_hz").get<double>();
  p.subcarriers = s.at("subcarriers").get<int>();
  p.symbol_time_s = s.at("symbol_time_s").get<double>();
  p.validate();
  return p;
}

ScanSchedule scan_schedule(const json& config) {
  const auto& s = config.at("sensing");
  const auto axis = [&](const char* name) {
    const auto& a = s.at(name);
    return linspace_step(a.at("min").get<double>(), a.at("max").get<double>(), a.at("step").get<double>());
  };
  ScanSchedule sch;
  sch.dwell_symbols = s.at("dwell_symbols").get<int>();
  sch.elevations_deg = axis("elevation");
  sch.azimuths_deg = axis("azimuth");
  sch.validate();
  return sch;
}

std::vector<SensingTarget> sensing_targets(const json& config) {
  std::vector<SensingTarget> out;
  for (const auto& t : config.at("sensing").at("targets"))
    out.push_back({t.at("range_m").get<double>(), t.at("velocity_mps").get<double>(),
                   t.at("theta_deg").get<double>(), t.at("phi_deg").get<double>()});
  if (out.empty()) throw std::invalid_argument("sensing.targets is empty");
  return out;
}

SensingSetup sensing_setup(const json& config, const ArrayGeometry& geometry) {
  const auto& s = config.at("sensing");
  SensingSetup setup;
  setup.rho = s.at("rho").get<double>();
  setup.noise_offset_db = s.at("noise_offset_db").get<double>();
  setup.add_noise = s.at("add_noise").get<bool>();
  setup.seed = stream_seed(config.at("seed").get<std::uint64_t>(), "sensing");
  if (s.at("comm_beam").get<bool>())
    setup.w_c = comm_weight(geometry, steering_vector(geometry, s.at("comm_theta_deg").get<double>(),
                                                      s.at("comm_phi_deg").get<double>()));
  return setup;
}

double beam_radius(const ArrayGeometry& geometry) {
  return extract_metrics(expanded_beam_pattern(geometry, 1.0, AngleGridSpec{})).beamwidth_radius;
}

std::vector<fs::path> cmd_tile(const json& config) {
  prepare(config);
  const RunInfo info = RunInfo::from(config);
  const auto tiling = design_tiling(config);
  const auto score = tiling_entropy(tiling);
  auto doc = geometry_to_json(geometry_from_tiling(tiling, config.at("design_frequency_hz").get<double>()),
                              tiling.grid);
  doc["entropy"] = {{"h_x", score.h_x}, {"h_y", score.h_y}, {"total", score.total}};
  stamp(doc, info);
  const auto path = out_path(config, config.at("tile").at("output").get<std::string>());
  write_json_file(path, doc);
  return {path};
}

std::vector<fs::path> cmd_sparsify(const json& config) {
  prepare(config);
  const RunInfo info = RunInfo::from(config);
  const auto source = read_json_file(input_of(config, "sparsify", "tile", "output"));
  const auto grid = grid_from_json(source);
  if (!grid) throw std::invalid_argument("sparsify input must be a tiling written by 'tile'");
  const auto tiling = tiling_from_geometry(geometry_from_json(source), *grid);
  const auto layout = sparsify(config, tiling);
  auto doc = geometry_to_json(geometry_from_layout(layout, config.at("design_frequency_hz").get<double>()));
  if (layout.subarrays.size() > 1) doc["min_tile_distance"] = min_inter_subarray_tile_distance(layout);
  stamp(doc, info);
  const auto path = out_path(config, config.at("sparsify").at("output").get<std::string>());
  write_json_file(path, doc);
  return {path};
}

std::vector<fs::path> cmd_optimize(const json& config) {
  prepare(config);
  const RunInfo info = RunInfo::from(config);
  const auto layout = layout_from_geometry(load_geometry(input_of(config, "optimize", "sparsify", "output")));
  const auto result = optimize(config, layout);

  auto doc = geometry_to_json(geometry_from_layout(result.layout, config.at("design_frequency_hz").get<double>()));
  doc["initial_sll_db"] = result.initial_sll_db;
  doc["final_sll_db"] = result.trace.exact_sll_db.empty() ? result.initial_sll_db : result.trace.exact_sll_db.back();
  if (result.layout.subarrays.size() > 1)
    doc["min_tile_distance"] = min_inter_subarray_tile_distance(result.layout);
  stamp(doc, info);
  const auto& o = config.at("optimize");
  const auto geo_path = out_path(config, o.at("output").get<std::string>());
  write_json_file(geo_path, doc);

  const auto trace_path = out_path(config, o.at("trace").get<std::string>());
  auto csv = open_csv(trace_path, info, "iteration,gamma_db,exact_sll_db");
  csv << 0 << ",," << result.initial_sll_db << '\n';
  for (std::size_t i = 0; i < result.trace.gamma_db.size(); ++i)
    csv << i + 1 << ',' << result.trace.gamma_db[i] << ',' << result.trace.exact_sll_db[i] << '\n';
  return {geo_path, trace_path};
}

std::vector<fs::path> cmd_pattern(const json& config) {
  prepare(config);
  const RunInfo info = RunInfo::from(config);
  const auto& p = config.at("pattern");
  const auto geometry = load_centered(input_of(config, "pattern", "optimize", "output"));
  const double zeta = p.at("zeta").get<double>();
  const double ratio = p.at("freq_ratio").get<double>();
  AngleGridSpec grid;
  grid.step_deg = p.at("angle_step_deg").get<double>();
  const auto pattern = expanded_beam_pattern(geometry, zeta, grid, ratio);
  const auto metrics = extract_metrics(pattern);

  const auto csv_path = out_path(config, p.at("csv").get<std::string>());
  auto csv = open_csv(csv_path, info, "u_tilde,v_tilde,power_db");
  for (std::size_t i = 0; i < pattern.samples.size(); ++i)
    csv << pattern.samples[i].u << ',' << pattern.samples[i].v << ',' << power_db(pattern.values[i]) << '\n';

  json doc = {{"max_sll_db", metrics.max_sll_db},
              {"beamwidth_radius", metrics.beamwidth_radius},
              {"zeta", zeta},
              {"freq_ratio", ratio},
              {"half_power_radius", metrics.half_power_radius},
              {"exclusion_radius", metrics.exclusion_radius},
              {"elements", geometry.element_count()},
              {"ports", port_count(geometry)}};
  stamp(doc, info);
  const auto metrics_path = out_path(config, p.at("metrics").get<std::string>());
  write_json_file(metrics_path, doc);
  return {csv_path, metrics_path};
}

std::vector<fs::path> cmd_simulate_comm(const json& config) {
  prepare(config);
  const RunInfo info = RunInfo::from(config);
  const auto& c = config.at("comm");
  const auto geometry = load_centered(input_of(config, "comm", "optimize", "output"));
  const auto link = link_config(config);
  const double theta_s = c.at("sensing_theta_deg").get<double>();
  const double phi_s = c.at("sensing_phi_deg").get<double>();
  std::vector<fs::path> written;

  const auto se_path = out_path(config, c.at("se_csv").get<std::string>());
  {
    auto csv = open_csv(se_path, info, "snr_db,se_mean,se_std");
    for (double snr : c.at("snr_db").get<std::vector<double>>()) {
      const auto s = average_se(geometry, link, snr, theta_s, phi_s);
      csv << snr << ',' << s.mean << ',' << s.stddev << '\n';
    }
  }
  written.push_back(se_path);

  const double sweep_snr = c.at("sweep_snr_db").get<double>();
  const double step = c.at("sweep_step_deg").get<double>();
  const auto write_sweep = [&](ScanAxis axis, const std::vector<double>& angles, const char* key) {
    const auto sweep = scan_sweep_se(geometry, link, axis, angles, sweep_snr);
    const auto path = out_path(config, c.at(key).get<std::string>());
    auto csv = open_csv(path, info, "angle_deg,se_mean,se_std");
    for (const auto& pt : sweep) csv << pt.angle_deg << ',' << pt.se_mean << ',' << pt.se_std << '\n';
    written.push_back(path);
  };
  write_sweep(ScanAxis::kAzimuth, linspace_step(-180.0, 180.0 - step, step), "azimuth_csv");
  write_sweep(ScanAxis::kElevation, linspace_step(0.0, 90.0, step), "elevation_csv");

  const auto& b = c.at("blockage");
  const auto scenario = blockage_scenario(config);
  LinkConfig blink = link;
  blink.r_ue = scenario.r_ue;
  const auto thetas = linspace_step(b.at("theta_min_deg").get<double>(), b.at("theta_max_deg").get<double>(),
                                    b.at("step_deg").get<double>());
  const double bsnr = b.at("snr_db").get<double>();
  const double rb = beam_radius(geometry);
  const auto timeline = blockage_sweep(geometry, blink, scenario, rb, thetas, bsnr);

  json doc;
  doc["blockage_interval_deg"] = timeline.interval_deg;
  const auto reference_source = b.at("reference").get<std::string>();
  if (!reference_source.empty()) {
    const auto reference = load_centered(reference_source);
    const auto ref = blockage_sweep(reference, blink, scenario, beam_radius(reference), thetas, bsnr);
    doc["ratio_vs_reference"] = ref.interval_deg > 0.0 ? json(timeline.interval_deg / ref.interval_deg) : json();
    doc["reference"] = {{"source", reference_source}, {"blockage_interval_deg", ref.interval_deg}};
  } else {
    doc["ratio_vs_reference"] = nullptr;
  }
  doc["beam_radius"] = rb;
  doc["se_inside"] = timeline.se_inside;
  doc["se_inside_unblocked"] = timeline.se_inside_unblocked;
  doc["se_outside"] = timeline.se_outside;
  doc["drop_db"] = timeline.drop_db;
  json samples = json::array();
  for (std::size_t i = 0; i < timeline.theta_deg.size(); ++i)
    samples.push_back({{"theta_deg", timeline.theta_deg[i]},
                       {"se_mean", timeline.se_mean[i]},
                       {"se_unblocked", timeline.se_unblocked[i]},
                       {"overlap", timeline.overlap[i] != 0}});
  doc["timeline"] = std::move(samples);
  stamp(doc, info);
  const auto path = out_path(config, b.at("output").get<std::string>());
  write_json_file(path, doc);
  written.push_back(path);
  return written;
}

std::vector<fs::path> cmd_simulate_sensing(const json& config) {
  prepare(config);
  const RunInfo info = RunInfo::from(config);
  const auto& s = config.at("sensing");
  const auto geometry = load_centered(input_of(config, "sensing", "optimize", "output"));
  const auto params = ofdm_params(config);
  const auto schedule = scan_schedule(config);
  const auto targets = sensing_targets(config);
  const auto setup = sensing_setup(config, geometry);
  std::vector<fs::path> written;

  const auto report = run_sensing(geometry, targets, schedule, params, setup);

  const EchoSynthesizer synth(geometry, targets, schedule, params, setup);
  const double max_range = s.at("range_velocity_max_range_m").get<double>();
  const auto nearest = [](const std::vector<double>& axis, double x) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < axis.size(); ++i)
      if (std::abs(axis[i] - x) < std::abs(axis[best] - x)) best = i;
    return static_cast<int>(best);
  };
  for (const auto& angle : s.at("range_velocity_angles")) {
    const int e = nearest(schedule.elevations_deg, angle.at(0).get<double>());
    const int a = nearest(schedule.azimuths_deg, angle.at(1).get<double>());
    const double theta = schedule.elevations_deg[e];
    const double phi = schedule.azimuths_deg[a];
    const auto map = range_doppler_map(synth.dwell(a, e), params);
    double peak = 0.0;
    for (double v : map.power) peak = std::max(peak, v);
    std::ostringstream name;
    name << s.at("range_velocity_prefix").get<std::string>() << "_theta" << theta << "_phi" << phi << ".csv";
    const auto path = out_path(config, name.str());
    auto csv = open_csv(path, info, "range_m,velocity_mps,power_norm");
    const int half = map.doppler_bins / 2;
    for (int r = 0; r < map.range_bins; ++r) {
      if (max_range > 0.0 && map.range_of(r) > max_range) break;
      for (int k = 0; k < map.doppler_bins; ++k) {
        const int d = (k + map.doppler_bins - half) % map.doppler_bins;  // ascending velocity
        csv << map.range_of(r) << ',' << map.velocity_of(d) << ',' << (peak > 0.0 ? map.at(r, d) / peak : 0.0)
            << '\n';
      }
    }
    written.push_back(path);
  }

  const auto angle_path = out_path(config, s.at("angle_csv").get<std::string>());
  {
    auto csv = open_csv(angle_path, info, "theta_deg,phi_deg,power_norm");
    for (std::size_t e = 0; e < report.image.theta_deg.size(); ++e)
      for (std::size_t a = 0; a < report.image.phi_deg.size(); ++a)
        csv << report.image.theta_deg[e] << ',' << report.image.phi_deg[a] << ','
            << report.image.at(static_cast<int>(e), static_cast<int>(a)) << '\n';
  }
  written.push_back(angle_path);

  json doc;
  json found = json::array();
  for (const auto& d : report.detections)
    found.push_back({{"range_m", d.range_m}, {"velocity_mps", d.velocity_mps}, {"theta_deg", d.theta_deg},
                     {"phi_deg", d.phi_deg}});
  doc["targets"] = std::move(found);
  doc["resolved"] = report.peaks.resolved;
  doc["range_bin"] = report.range_bin;
  doc["doppler_bin"] = report.doppler_bin;
  doc["noise_variance"] = report.noise_variance;
  doc["range_resolution_m"] = params.range_resolution_m();
  doc["velocity_resolution_mps"] = params.velocity_resolution_mps(schedule.dwell_symbols);
  stamp(doc, info);
  const auto det_path = out_path(config, s.at("detection").get<std::string>());
  write_json_file(det_path, doc);
  written.push_back(det_path);
  return written;
}

std::vector<fs::path> cmd_run(const json& config) {
  std::vector<fs::path> all;
  for (auto* stage : {cmd_tile, cmd_sparsify, cmd_optimize, cmd_pattern, cmd_simulate_comm, cmd_simulate_sensing}) {
    auto paths = stage(config);
    all.insert(all.end(), paths.begin(), paths.end());
  }
  return all;
}

}  // namespace workbench
