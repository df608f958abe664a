#include "prefgame/trajectory_io.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "prefgame/errors.hpp"
#include "prefgame/rng.hpp"

namespace prefgame {

namespace {

using nlohmann::json;

void require_keys(const json& j, const std::vector<std::string>& allowed,
                  const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end())
      throw ConfigError(where + ": unknown field \"" + it.key() + "\"");
  }
}

std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Infinite metrics (support violations) have no JSON number; store/read null.
json metric_to_json(double v) {
  if (std::isinf(v)) return nullptr;
  return v;
}

double metric_from_json(const json& j) {
  if (j.is_null()) return std::numeric_limits<double>::infinity();
  return j.get<double>();
}

json step_to_json(const TrajectoryStep& s) {
  return json{{"outer_iter", s.outer_iter},
              {"inner_iter", s.inner_iter},
              {"policy", s.policy.probs()},
              {"kl_to_nash", metric_to_json(s.kl_to_nash)},
              {"duality_gap", s.duality_gap},
              {"kl_to_reference", metric_to_json(s.kl_to_reference)}};
}

TrajectoryStep step_from_json(const json& j) {
  require_keys(j, {"outer_iter", "inner_iter", "policy", "kl_to_nash",
                   "duality_gap", "kl_to_reference"},
               "trajectory step");
  return TrajectoryStep{j.at("outer_iter").get<std::size_t>(),
                        j.at("inner_iter").get<std::size_t>(),
                        Policy(j.at("policy").get<std::vector<double>>()),
                        metric_from_json(j.at("kl_to_nash")),
                        j.at("duality_gap").get<double>(),
                        metric_from_json(j.at("kl_to_reference"))};
}

std::string inner_schedule_name(InnerSchedule s) {
  return s == InnerSchedule::kFixedK ? "FixedK" : "Theoretical";
}

InnerSchedule inner_schedule_from_name(const std::string& s) {
  if (s == "FixedK") return InnerSchedule::kFixedK;
  if (s == "Theoretical") return InnerSchedule::kTheoretical;
  throw ConfigError("unknown epsilon_schedule: " + s);
}

}  // namespace

RunSummary summarize(const Trajectory& traj) {
  if (traj.steps.empty()) throw StructuralError("summarize: empty trajectory");
  RunSummary s;
  s.iterations = traj.steps.size();
  s.final_gap = traj.steps.back().duality_gap;
  s.final_kl_to_nash = traj.steps.back().kl_to_nash;
  s.min_gap = std::numeric_limits<double>::infinity();
  for (const auto& st : traj.steps) s.min_gap = std::min(s.min_gap, st.duality_gap);
  std::size_t window = std::max<std::size_t>(1, traj.steps.size() / 10);
  s.min_gap_window = std::numeric_limits<double>::infinity();
  for (std::size_t i = traj.steps.size() - window; i < traj.steps.size(); ++i)
    s.min_gap_window = std::min(s.min_gap_window, traj.steps[i].duality_gap);
  return s;
}

RunRecord make_run_record(Trajectory traj, double wall_time_ms) {
  RunSummary s = summarize(traj);
  s.wall_time_ms = wall_time_ms;
  std::string id = run_id_for(traj.config);
  return RunRecord{std::move(id), std::move(traj), s};
}

nlohmann::json config_to_json(const SolverConfig& config) {
  json oracle;
  if (config.oracle.is_exact()) {
    oracle = json{{"mode", "Exact"}};
  } else {
    oracle = json{{"mode", "Sampled"},
                  {"pairs_per_iteration", config.oracle.pairs_per_iteration}};
  }
  return json{{"algorithm", algorithm_name(config.algorithm)},
              {"eta", config.eta},
              {"tau", config.tau},
              {"outer_iterations", config.outer_iterations},
              {"inner_iterations", config.inner_iterations},
              {"epsilon_schedule", inner_schedule_name(config.epsilon_schedule)},
              {"oracle", oracle},
              {"seed", config.seed},
              {"stream", config.stream},
              {"initial", config.initial},
              {"rng", RngState::kGeneratorName}};
}

SolverConfig config_from_json(const nlohmann::json& j) {
  require_keys(j,
               {"algorithm", "eta", "tau", "outer_iterations",
                "inner_iterations", "epsilon_schedule", "oracle", "seed",
                "stream", "initial", "rng", "label"},
               "run config");
  SolverConfig c;
  c.algorithm = algorithm_from_name(j.at("algorithm").get<std::string>());
  c.eta = j.at("eta").get<double>();
  c.tau = j.value("tau", 0.0);
  c.outer_iterations = j.at("outer_iterations").get<std::size_t>();
  c.inner_iterations = j.value("inner_iterations", std::size_t{1});
  c.epsilon_schedule =
      inner_schedule_from_name(j.value("epsilon_schedule", "FixedK"));
  if (j.contains("oracle")) {
    const json& o = j.at("oracle");
    require_keys(o, {"mode", "pairs_per_iteration"}, "oracle");
    std::string mode = o.at("mode").get<std::string>();
    if (mode == "Exact") {
      c.oracle = OracleMode::exact();
    } else if (mode == "Sampled") {
      c.oracle = OracleMode::sampled(
          o.value("pairs_per_iteration", std::size_t{100000}));
    } else {
      throw ConfigError("unknown oracle mode: " + mode);
    }
  }
  c.seed = j.value("seed", std::uint64_t{0});
  c.stream = j.value("stream", std::uint64_t{0});
  c.initial = j.at("initial").get<std::vector<double>>();
  if (j.contains("rng") &&
      j.at("rng").get<std::string>() != RngState::kGeneratorName)
    throw ConfigError("config was produced with a different generator: " +
                      j.at("rng").get<std::string>());
  return c;
}

std::string run_id_for(const SolverConfig& config) {
  std::string canonical = config_to_json(config).dump();
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, fnv1a64(canonical));
  return std::string(buf);
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return std::string(buf);
}

void write_csv(const RunRecord& record, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("write_csv: cannot open " + path.string());
  const std::size_t n = record.trajectory.nash_reference.size();
  out << "run_id,outer_iter,inner_iter";
  for (std::size_t i = 0; i < n; ++i) out << ",p_" << i;
  out << ",kl_to_nash,duality_gap,kl_to_reference\n";
  for (const auto& s : record.trajectory.steps) {
    out << record.run_id << ',' << s.outer_iter << ',' << s.inner_iter;
    for (std::size_t i = 0; i < n; ++i) out << ',' << format_double(s.policy[i]);
    out << ',' << format_double(s.kl_to_nash) << ','
        << format_double(s.duality_gap) << ','
        << format_double(s.kl_to_reference) << '\n';
  }
  if (!out) throw IoError("write_csv: write failed for " + path.string());
}

CsvTrajectory read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("read_csv: cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line))
    throw IoError("read_csv: empty file " + path.string());
  std::size_t columns = 1 + static_cast<std::size_t>(std::count(
                                line.begin(), line.end(), ','));
  if (columns < 7) throw IoError("read_csv: malformed header");
  std::size_t n = columns - 6;
  CsvTrajectory out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != columns) throw IoError("read_csv: malformed row");
    out.run_id = fields[0];
    std::vector<double> probs(n);
    for (std::size_t i = 0; i < n; ++i) probs[i] = std::stod(fields[3 + i]);
    out.steps.push_back(TrajectoryStep{
        static_cast<std::size_t>(std::stoull(fields[1])),
        static_cast<std::size_t>(std::stoull(fields[2])), Policy(probs),
        std::stod(fields[3 + n]), std::stod(fields[4 + n]),
        std::stod(fields[5 + n])});
  }
  return out;
}

void write_json(const RunRecord& record, const std::filesystem::path& path) {
  json steps = json::array();
  for (const auto& s : record.trajectory.steps) steps.push_back(step_to_json(s));
  json j{{"run_id", record.run_id},
         {"config", config_to_json(record.trajectory.config)},
         {"nash_reference", record.trajectory.nash_reference.probs()},
         {"steps", steps},
         {"summary",
          {{"final_gap", record.summary.final_gap},
           {"final_kl_to_nash", metric_to_json(record.summary.final_kl_to_nash)},
           {"min_gap", record.summary.min_gap},
           {"min_gap_window", record.summary.min_gap_window},
           {"iterations", record.summary.iterations},
           {"wall_time_ms", record.summary.wall_time_ms}}}};
  std::ofstream out(path);
  if (!out) throw IoError("write_json: cannot open " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw IoError("write_json: write failed for " + path.string());
}

RunRecord read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("read_json: cannot open " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw IoError("read_json: " + path.string() + ": " + e.what());
  }
  require_keys(j, {"run_id", "config", "nash_reference", "steps", "summary"},
               "run record");
  Trajectory traj{config_from_json(j.at("config")), {},
                  Policy(j.at("nash_reference").get<std::vector<double>>())};
  for (const auto& sj : j.at("steps")) traj.steps.push_back(step_from_json(sj));
  const json& s = j.at("summary");
  RunSummary summary{s.at("final_gap").get<double>(),
                     metric_from_json(s.at("final_kl_to_nash")),
                     s.at("min_gap").get<double>(),
                     s.at("min_gap_window").get<double>(),
                     s.at("iterations").get<std::size_t>(),
                     s.at("wall_time_ms").get<double>()};
  return RunRecord{j.at("run_id").get<std::string>(), std::move(traj), summary};
}

PreferenceModel game_from_json(const nlohmann::json& j) {
  require_keys(j, {"n", "p"}, "game");
  std::size_t n = j.at("n").get<std::size_t>();
  auto rows = j.at("p").get<std::vector<std::vector<double>>>();
  if (rows.size() != n)
    throw ConfigError("game: \"p\" must have exactly n rows");
  try {
    return PreferenceModel::from_matrix(rows, 1e-9);
  } catch (const DomainError& e) {
    throw ConfigError(std::string("game: ") + e.what());
  } catch (const StructuralError& e) {
    throw ConfigError(std::string("game: ") + e.what());
  }
}

PreferenceModel load_game(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("load_game: cannot open " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw IoError("load_game: " + path.string() + ": " + e.what());
  }
  return game_from_json(j);
}

void save_game(const PreferenceModel& model, const std::filesystem::path& path) {
  json rows = json::array();
  for (std::size_t i = 0; i < model.size(); ++i) {
    json row = json::array();
    for (std::size_t j2 = 0; j2 < model.size(); ++j2) row.push_back(model(i, j2));
    rows.push_back(row);
  }
  json j{{"n", model.size()}, {"p", rows}};
  std::ofstream out(path);
  if (!out) throw IoError("save_game: cannot open " + path.string());
  out << j.dump(2) << '\n';
}

}  // namespace prefgame
