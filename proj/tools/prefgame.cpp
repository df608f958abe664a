// Experiment driver for finite preference games: batch solver runs from a
// JSON config, a symmetric-equilibrium query, and a barycentric trajectory
// plot. Exit codes: 0 ok, 1 validation, 2 solver/runtime, 3 I/O.

#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "prefgame/errors.hpp"
#include "prefgame/nash.hpp"
#include "prefgame/solvers.hpp"
#include "prefgame/svg.hpp"
#include "prefgame/trajectory_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace prefgame;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;
constexpr int kExitIo = 3;

struct RunSpec {
  SolverConfig config;
  std::string label;
};

struct Experiment {
  PreferenceModel model;
  std::vector<RunSpec> runs;
  fs::path output_dir;
  bool emit_csv = true;
  bool emit_json = true;
  bool emit_svg = false;
};

void require_keys(const json& j, const std::vector<std::string>& allowed,
                  const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it)
    if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end())
      throw ConfigError(where + ": unknown field \"" + it.key() + "\"");
}

json load_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    json j;
    in >> j;
    return j;
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

Experiment parse_experiment(const fs::path& config_path) {
  json j = load_json_file(config_path);
  require_keys(j, {"game", "runs", "output_dir", "emit"}, "config");
  if (!j.contains("game") || !j.contains("runs"))
    throw ConfigError("config: \"game\" and \"runs\" are required");

  PreferenceModel model = [&]() {
    const json& g = j.at("game");
    if (g.is_string())
      return load_game(config_path.parent_path() / g.get<std::string>());
    return game_from_json(g);
  }();

  Experiment exp{std::move(model), {}, "runs_out", true, true, false};
  if (j.contains("output_dir")) exp.output_dir = j.at("output_dir").get<std::string>();

  if (j.contains("emit")) {
    exp.emit_csv = exp.emit_json = exp.emit_svg = false;
    for (const auto& e : j.at("emit")) {
      std::string v = e.get<std::string>();
      if (v == "csv") exp.emit_csv = true;
      else if (v == "json") exp.emit_json = true;
      else if (v == "svg") exp.emit_svg = true;
      else throw ConfigError("config: unknown emit target \"" + v + "\"");
    }
  }

  const json& runs = j.at("runs");
  if (!runs.is_array() || runs.empty())
    throw ConfigError("config: \"runs\" must be a non-empty list");
  std::size_t index = 0;
  for (const auto& rj : runs) {
    SolverConfig c = config_from_json(rj);
    if (c.initial.size() != exp.model.size())
      throw ConfigError("config: run " + std::to_string(index) +
                        ": initial policy size does not match the game");
    // distinct sampling streams per run position
    if (!rj.contains("stream")) c.stream = index;
    std::string label = rj.value("label", std::string{});
    if (label.empty())
      label = algorithm_name(c.algorithm) + "_" + std::to_string(index);
    exp.runs.push_back(RunSpec{std::move(c), std::move(label)});
    ++index;
  }
  if (exp.emit_svg && exp.model.size() != 3)
    throw ConfigError("config: svg output needs a 3-response game");
  return exp;
}

struct RunOutcome {
  std::string label;
  std::string run_id;
  std::string algorithm;
  std::string error;  // empty on success
  RunSummary summary{};
};

int cmd_run(const fs::path& config_path, const std::optional<fs::path>& out_dir,
            const std::optional<std::uint64_t>& seed_override,
            unsigned jobs, const std::string& format) {
  Experiment exp = parse_experiment(config_path);
  if (out_dir) exp.output_dir = *out_dir;
  if (format == "csv") {
    exp.emit_csv = true;
    exp.emit_json = false;
  } else if (format == "json") {
    exp.emit_csv = false;
    exp.emit_json = true;
  } else if (format == "both") {
    exp.emit_csv = exp.emit_json = true;
  } else if (!format.empty()) {
    throw ConfigError("--format must be csv, json or both");
  }
  if (seed_override)
    for (auto& r : exp.runs) r.config.seed = *seed_override;

  std::error_code ec;
  fs::create_directories(exp.output_dir, ec);
  if (ec) throw IoError("cannot create " + exp.output_dir.string());

  std::vector<RunOutcome> outcomes(exp.runs.size());
  std::atomic<std::size_t> next{0};
  std::mutex io_mutex;

  auto worker = [&]() {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= exp.runs.size()) return;
      const RunSpec& rs = exp.runs[i];
      RunOutcome& out = outcomes[i];
      out.label = rs.label;
      out.algorithm = algorithm_name(rs.config.algorithm);
      try {
        auto t0 = std::chrono::steady_clock::now();
        Trajectory traj = run_solver(exp.model, rs.config);
        double ms = std::chrono::duration<double, std::milli>(
                        std::chrono::steady_clock::now() - t0)
                        .count();
        RunRecord rec = make_run_record(std::move(traj), ms);
        out.run_id = rec.run_id;
        out.summary = rec.summary;
        fs::path base = exp.output_dir / (rs.label + "_" + rec.run_id);
        if (exp.emit_csv) write_csv(rec, base.string() + ".csv");
        if (exp.emit_json) write_json(rec, base.string() + ".json");
        if (exp.emit_svg) {
          PlotSeries series{rs.label, {}};
          for (const auto* s : outer_steps(rec.trajectory))
            series.points.push_back(s->policy);
          std::ofstream svg(base.string() + ".svg");
          svg << render_simplex_svg({series}, rec.trajectory.nash_reference);
        }
        std::lock_guard<std::mutex> lock(io_mutex);
        std::cout << rs.label << ": ok (" << rec.summary.iterations
                  << " steps, final gap "
                  << format_double(rec.summary.final_gap) << ")\n";
      } catch (const std::exception& e) {
        out.error = e.what();
        std::lock_guard<std::mutex> lock(io_mutex);
        std::cerr << rs.label << ": error: " << e.what() << "\n";
      }
    }
  };

  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = std::min<unsigned>(jobs, static_cast<unsigned>(exp.runs.size()));
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();

  json index = json::array();
  bool any_error = false;
  for (const auto& out : outcomes) {
    json entry{{"label", out.label}, {"algorithm", out.algorithm}};
    if (out.error.empty()) {
      entry["run_id"] = out.run_id;
      entry["status"] = "ok";
      entry["summary"] = {{"final_gap", out.summary.final_gap},
                          {"final_kl_to_nash", out.summary.final_kl_to_nash},
                          {"min_gap", out.summary.min_gap},
                          {"min_gap_window", out.summary.min_gap_window},
                          {"iterations", out.summary.iterations},
                          {"wall_time_ms", out.summary.wall_time_ms}};
    } else {
      entry["status"] = "error";
      entry["error"] = out.error;
      any_error = true;
    }
    index.push_back(entry);
  }
  std::ofstream idx(exp.output_dir / "index.json");
  if (!idx) throw IoError("cannot write index.json");
  idx << json{{"runs", index}}.dump(2) << '\n';
  return any_error ? kExitRuntime : kExitOk;
}

int cmd_nash(const fs::path& game_path, std::optional<double> tau,
             const std::optional<fs::path>& ref_path) {
  PreferenceModel model = load_game(game_path);
  json out;
  if (!tau) {
    NashResult res = solve_nash(model, 1e-10);
    out = json{{"policy", res.policy.probs()},
               {"gap", res.gap},
               {"method", "support_enumeration"}};
  } else {
    Policy ref = Policy::uniform(model.size());
    if (ref_path) {
      json rj = load_json_file(*ref_path);
      ref = Policy(rj.get<std::vector<double>>());
    }
    RegularizedGame game{model, *tau, ref};
    NashResult res = solve_regularized_nash(game, 1e-12);
    out = json{{"policy", res.policy.probs()},
               {"gap", res.gap},
               {"tau", *tau},
               {"method", "fixed_point"}};
  }
  std::cout << out.dump(2) << '\n';
  return kExitOk;
}

int cmd_plot(const std::vector<fs::path>& record_paths, const fs::path& out) {
  if (record_paths.empty()) throw ConfigError("plot: no trajectory files given");
  std::vector<PlotSeries> series;
  std::optional<Policy> nash;
  for (const auto& p : record_paths) {
    RunRecord rec = read_json(p);
    if (rec.trajectory.nash_reference.size() != 3)
      throw StructuralError("plot: only 3-response games can be drawn");
    PlotSeries s{algorithm_name(rec.trajectory.config.algorithm), {}};
    for (const auto* st : outer_steps(rec.trajectory))
      s.points.push_back(st->policy);
    series.push_back(std::move(s));
    nash = rec.trajectory.nash_reference;
  }
  std::ofstream f(out);
  if (!f) throw IoError("plot: cannot open " + out.string());
  f << render_simplex_svg(series, *nash);
  if (!f) throw IoError("plot: write failed for " + out.string());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite preference-game solvers and experiment runner"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
  unsigned jobs = 0;
  std::string format;

  CLI::App* run = app.add_subcommand("run", "Execute every run in a config");
  run->add_option("--config", config_path, "Experiment config (JSON)")
      ->required();
  run->add_option("--out", out_dir, "Output directory (overrides the config)");
  run->add_option("--seed", seed, "Override the seed of every run")
      ->each([&](const std::string&) { seed_set = true; });
  run->add_option("--jobs", jobs, "Parallel runs (default: logical cores)");
  run->add_option("--format", format, "Trajectory files: csv, json or both");

  std::string game_path;
  double tau = 0.0;
  bool tau_set = false;
  std::string ref_path;

  CLI::App* nash = app.add_subcommand("nash", "Print a symmetric equilibrium");
  nash->add_option("game", game_path, "Game file (JSON)")->required();
  nash->add_option("--tau", tau, "Solve the KL-regularized game instead")
      ->each([&](const std::string&) { tau_set = true; });
  nash->add_option("--ref", ref_path,
                   "Reference policy file (JSON array) for --tau");

  std::vector<std::string> traj_paths;
  std::string svg_out;

  CLI::App* plot = app.add_subcommand("plot", "Render trajectories as SVG");
  plot->add_option("trajectories", traj_paths, "Run-record JSON files")
      ->required();
  plot->add_option("--out", svg_out, "Output SVG path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      return cmd_run(config_path,
                     out_dir.empty() ? std::nullopt
                                     : std::optional<fs::path>(out_dir),
                     seed_set ? std::optional<std::uint64_t>(seed) : std::nullopt,
                     jobs, format);
    }
    if (nash->parsed()) {
      return cmd_nash(game_path,
                      tau_set ? std::optional<double>(tau) : std::nullopt,
                      ref_path.empty() ? std::nullopt
                                       : std::optional<fs::path>(ref_path));
    }
    if (plot->parsed()) {
      std::vector<fs::path> paths(traj_paths.begin(), traj_paths.end());
      return cmd_plot(paths, svg_out);
    }
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const StructuralError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const DomainError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const SolverFailure& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}
