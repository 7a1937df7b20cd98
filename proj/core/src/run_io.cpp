#include "kcover/run_io.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

namespace kcover {

using nlohmann::json;

namespace {

json config_to_json(const GreedyConfig& config) {
  return json{{"k", config.k},
              {"weights", config.weights.w},
              {"epsilon", config.epsilon},
              {"tau", config.tau},
              {"max_sensors", config.max_sensors},
              {"stop_on_zero_gain", config.stop_on_zero_gain},
              {"visibility_method", to_string(config.visibility_method)},
              {"candidate_policy", to_string(config.candidate_policy)},
              {"termination", to_string(config.termination)},
              {"seed", config.seed}};
}

GreedyConfig config_from_json(const json& j) {
  GreedyConfig config;
  if (j.contains("k")) config.k = j.at("k").get<int>();
  if (j.contains("weights"))
    config.weights = Weights(j.at("weights").get<std::vector<double>>(), true);
  else if (j.contains("k"))
    config.weights = Weights::halving(config.k);
  if (j.contains("epsilon")) config.epsilon = j.at("epsilon").get<double>();
  if (j.contains("tau")) config.tau = j.at("tau").get<double>();
  if (j.contains("max_sensors")) config.max_sensors = j.at("max_sensors").get<int>();
  if (j.contains("stop_on_zero_gain")) config.stop_on_zero_gain = j.at("stop_on_zero_gain").get<bool>();
  if (j.contains("visibility_method"))
    config.visibility_method = parse_visibility_method(j.at("visibility_method").get<std::string>());
  if (j.contains("candidate_policy"))
    config.candidate_policy = parse_candidate_policy(j.at("candidate_policy").get<std::string>());
  if (j.contains("termination")) config.termination = parse_termination(j.at("termination").get<std::string>());
  if (j.contains("seed")) config.seed = j.at("seed").get<std::uint64_t>();
  return config;
}

json run_to_json(const PlacementRun& run) {
  json sensors = json::array();
  for (const SensorPose& p : run.sensors) sensors.push_back({{"i", p.cell.i}, {"j", p.cell.j}, {"z_s", p.z_s}});
  json trace = json::array();
  for (const TraceStep& s : run.trace) {
    trace.push_back({{"frac", s.frac},
                     {"cell", {{"i", s.selected.i}, {"j", s.selected.j}}},
                     {"gain", s.gain},
                     {"band_size", s.band_size}});
  }
  json j{{"method", run.method},
         {"config", config_to_json(run.config)},
         {"sensors", std::move(sensors)},
         {"trace", std::move(trace)},
         {"terminated_by", to_string(run.terminated_by)}};
  if (!run.sub_runs.empty()) {
    json subs = json::array();
    for (const PlacementRun& sub : run.sub_runs) subs.push_back(run_to_json(sub));
    j["sub_runs"] = std::move(subs);
  }
  return j;
}

PlacementRun run_from_json(const json& j) {
  PlacementRun run;
  run.method = j.at("method").get<std::string>();
  run.config = config_from_json(j.at("config"));
  for (const json& p : j.at("sensors"))
    run.sensors.push_back({{p.at("i").get<int>(), p.at("j").get<int>()}, p.at("z_s").get<double>()});
  for (const json& s : j.at("trace")) {
    TraceStep step;
    step.frac = s.at("frac").get<std::vector<double>>();
    step.selected = {s.at("cell").at("i").get<int>(), s.at("cell").at("j").get<int>()};
    step.gain = s.at("gain").get<double>();
    step.band_size = s.at("band_size").get<std::size_t>();
    run.trace.push_back(std::move(step));
  }
  run.terminated_by = parse_terminated_by(j.at("terminated_by").get<std::string>());
  if (j.contains("sub_runs"))
    for (const json& sub : j.at("sub_runs")) run.sub_runs.push_back(run_from_json(sub));
  return run;
}

json load_json_file(const std::filesystem::path& path, const char* what) {
  std::ifstream in(path);
  if (!in) throw IoError(std::string(what) + ": cannot open " + path.string());
  try {
    json j;
    in >> j;
    return j;
  } catch (const json::exception& e) {
    throw ParseError(-1, -1, std::string(what) + ": " + e.what());
  }
}

void dump_json_file(const json& j, const std::filesystem::path& path, const char* what) {
  std::ofstream out(path);
  if (!out) throw IoError(std::string(what) + ": cannot open " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw IoError(std::string(what) + ": write failed for " + path.string());
}

}  // namespace

void save_run_json(const PlacementRun& run, const std::filesystem::path& path) {
  dump_json_file(run_to_json(run), path, "save_run_json");
}

PlacementRun load_run_json(const std::filesystem::path& path) {
  const json j = load_json_file(path, "load_run_json");
  try {
    return run_from_json(j);
  } catch (const json::exception& e) {
    throw ParseError(-1, -1, "load_run_json: missing or mistyped field: " + std::string(e.what()));
  }
}

GreedyConfig load_greedy_config_json(const std::filesystem::path& path) {
  const json j = load_json_file(path, "load_greedy_config_json");
  try {
    return config_from_json(j);
  } catch (const json::exception& e) {
    throw ParseError(-1, -1, "load_greedy_config_json: mistyped field: " + std::string(e.what()));
  }
}

void save_greedy_config_json(const GreedyConfig& config, const std::filesystem::path& path) {
  dump_json_file(config_to_json(config), path, "save_greedy_config_json");
}

void save_theorem_report_json(const oracle::TheoremReport& report, const std::filesystem::path& path) {
  json checks = json::array();
  for (const oracle::TheoremCheck& c : report.checks)
    checks.push_back({{"n", c.n}, {"l", c.l}, {"lhs", c.lhs}, {"rhs", c.rhs}, {"pass", c.pass}});
  json sensors = json::array();
  for (const SensorPose& p : report.greedy_sensors)
    sensors.push_back({{"i", p.cell.i}, {"j", p.cell.j}, {"z_s", p.z_s}});
  dump_json_file(json{{"all_pass", report.all_pass}, {"checks", std::move(checks)}, {"greedy_sensors", std::move(sensors)}},
                 path, "save_theorem_report_json");
}

void save_gain_field_json(const GainField& field, const std::filesystem::path& path) {
  json candidates = json::array();
  for (std::uint8_t b : field.candidates.v) candidates.push_back(b != 0);
  json v_planes = json::array();
  const std::size_t n = field.G.size();
  for (int i = 0; i < field.k; ++i) {
    v_planes.push_back(std::vector<double>(field.V.begin() + static_cast<std::ptrdiff_t>(i * n),
                                           field.V.begin() + static_cast<std::ptrdiff_t>((i + 1) * n)));
  }
  dump_json_file(json{{"nx", field.nx},
                      {"ny", field.ny},
                      {"k", field.k},
                      {"G", field.G},
                      {"V", std::move(v_planes)},
                      {"candidates", std::move(candidates)},
                      {"max_gain", field.max_gain},
                      {"argmax_cell", {{"i", field.argmax_cell.i}, {"j", field.argmax_cell.j}}}},
                 path, "save_gain_field_json");
}

harness::ExperimentConfig load_experiment_config_json(const std::filesystem::path& path) {
  const json j = load_json_file(path, "load_experiment_config_json");
  harness::ExperimentConfig config;
  try {
    if (j.contains("n_envs")) config.n_envs = j.at("n_envs").get<int>();
    if (j.contains("grid")) {
      const json& g = j.at("grid");
      if (g.contains("nx")) config.grid.nx = g.at("nx").get<int>();
      if (g.contains("ny")) config.grid.ny = g.at("ny").get<int>();
      if (g.contains("cell_size")) config.grid.cell_size = g.at("cell_size").get<double>();
      if (g.contains("z_max")) config.grid.z_max = g.at("z_max").get<double>();
    }
    if (j.contains("city")) {
      const json& c = j.at("city");
      if (c.contains("n_rect_range")) config.city.n_rect_range = c.at("n_rect_range").get<std::pair<int, int>>();
      if (c.contains("rect_w_range")) config.city.rect_w_range = c.at("rect_w_range").get<std::pair<int, int>>();
      if (c.contains("rect_h_range")) config.city.rect_h_range = c.at("rect_h_range").get<std::pair<int, int>>();
      if (c.contains("height_range"))
        config.city.height_range = c.at("height_range").get<std::pair<double, double>>();
    }
    if (j.contains("methods")) config.methods = j.at("methods").get<std::vector<std::string>>();
    if (j.contains("thresholds")) config.thresholds = j.at("thresholds").get<std::vector<double>>();
    if (j.contains("k")) config.k = j.at("k").get<int>();
    if (j.contains("epsilon")) config.epsilon = j.at("epsilon").get<double>();
    if (j.contains("max_sensors")) config.max_sensors = j.at("max_sensors").get<int>();
    if (j.contains("master_seed")) config.master_seed = j.at("master_seed").get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw ParseError(-1, -1, "load_experiment_config_json: mistyped field: " + std::string(e.what()));
  }
  return config;
}

void save_experiment_config_json(const harness::ExperimentConfig& config, const std::filesystem::path& path) {
  dump_json_file(json{{"n_envs", config.n_envs},
                      {"grid",
                       {{"nx", config.grid.nx},
                        {"ny", config.grid.ny},
                        {"cell_size", config.grid.cell_size},
                        {"z_max", config.grid.z_max}}},
                      {"city",
                       {{"n_rect_range", config.city.n_rect_range},
                        {"rect_w_range", config.city.rect_w_range},
                        {"rect_h_range", config.city.rect_h_range},
                        {"height_range", config.city.height_range}}},
                      {"methods", config.methods},
                      {"thresholds", config.thresholds},
                      {"k", config.k},
                      {"epsilon", config.epsilon},
                      {"max_sensors", config.max_sensors},
                      {"master_seed", config.master_seed}},
                 path, "save_experiment_config_json");
}

}  // namespace kcover
