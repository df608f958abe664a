#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "prefgame/preference_model.hpp"
#include "prefgame/solvers.hpp"

namespace prefgame {

struct RunSummary {
  double final_gap = 0.0;
  double final_kl_to_nash = 0.0;
  double min_gap = 0.0;
  double min_gap_window = 0.0;  // min over the last 10% of steps
  std::size_t iterations = 0;
  double wall_time_ms = 0.0;
};

RunSummary summarize(const Trajectory& traj);

struct RunRecord {
  std::string run_id;  // 16 hex digits of FNV-1a over the canonical config
  Trajectory trajectory;
  RunSummary summary;
};

RunRecord make_run_record(Trajectory traj, double wall_time_ms = 0.0);

// Canonical config serialization; echoes the RNG family so sampled runs are
// reproducible from the record alone. Strict parse: unknown keys rejected.
nlohmann::json config_to_json(const SolverConfig& config);
SolverConfig config_from_json(const nlohmann::json& j);
std::string run_id_for(const SolverConfig& config);

// CSV: header run_id,outer_iter,inner_iter,p_0..p_{n-1},kl_to_nash,
// duality_gap,kl_to_reference; one row per step, floats at 17 significant
// digits so values round-trip bit for bit.
void write_csv(const RunRecord& record, const std::filesystem::path& path);

struct CsvTrajectory {
  std::string run_id;
  std::vector<TrajectoryStep> steps;
};
CsvTrajectory read_csv(const std::filesystem::path& path);

void write_json(const RunRecord& record, const std::filesystem::path& path);
RunRecord read_json(const std::filesystem::path& path);

// Game files: {"n": int, "p": [[row-major win probabilities]]}, validated
// against the complement identity at 1e-9 (hand-written files), then
// symmetrized.
PreferenceModel load_game(const std::filesystem::path& path);
void save_game(const PreferenceModel& model, const std::filesystem::path& path);
PreferenceModel game_from_json(const nlohmann::json& j);

std::string format_double(double v);  // %.17g

}  // namespace prefgame
