#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "qoestream/engine.hpp"

namespace qoe {

/// Named scenarios; each expands to a fixed list of points.
inline constexpr const char* kExperimentNames[] = {
    "fig5", "fig4-sweep", "fig6a", "fig6b", "fig7-grid", "fig8-sweep", "fig9", "custom"};

struct ExperimentSpec {
  std::string scenario = "custom";
  /// Scenario JSON applied on top of the preset before per-point settings.
  nlohmann::json overrides = nlohmann::json::object();
  std::filesystem::path base_dir;  ///< resolves relative paths in overrides
  std::vector<std::uint64_t> seeds;
  std::filesystem::path out_dir = "results";
  std::vector<double> gammas;  ///< empty: preset default
  std::vector<double> thetas;  ///< fixed-threshold sweep (fig4-sweep)
  std::vector<double> theta1;  ///< fig7-grid axes
  std::vector<double> theta2;
  std::size_t workers = 1;

  /// Throws std::invalid_argument on unknown scenarios or empty seeds.
  void validate() const;
};

/// Parses {"experiment", "seeds", "out", "overrides", "gammas", "thetas",
/// "theta_grid": {"theta1", "theta2"}, "workers"}.
ExperimentSpec parse_experiment(const nlohmann::json& doc,
                                const std::filesystem::path& base_dir = {});

/// One scenario point of a sweep; every seed runs this config.
struct SweepPoint {
  std::string variant;  ///< e.g. "proposed+ac", "proposed", "baseline", "fixed"
  ScenarioConfig config;
};

/// The scenario points of an experiment, in output order.
std::vector<SweepPoint> expand(const ExperimentSpec& spec);

/// Per-user summary kept after a run (the traces themselves are dropped).
struct UserRow {
  std::uint64_t id = 0;
  std::optional<std::size_t> type;
  std::int64_t arrival_slot = 0;
  int sojourn = 0;
  bool admitted = false;
  bool satisfied = false;
  bool counted = false;  ///< part of the run's summary (after warm-up)
  double admission_estimate = 0.0;
  double mean_quality = 0.0;
  std::vector<double> ecdf;  ///< at each level of ecdf_levels(constraints)
};

/// Levels reported per user: the grid for Case I, each type's g for Case II.
std::vector<double> ecdf_levels(const ConstraintSet& constraints);

struct RunDigest {
  std::vector<UserRow> users;
  std::vector<ThresholdStep> thresholds;
  RunSummary summary;
  /// Case II: admitted-and-violated Type-j users over all counted Type-j users.
  std::vector<double> e_by_type;
  std::int64_t slots_simulated = 0;
  std::int64_t overloaded_slots = 0;
  std::int64_t total_arrivals = 0;
};

RunDigest digest(const RunResult& result, const ScenarioConfig& config);

struct RunOutcome {
  std::size_t point = 0;
  std::uint64_t seed = 0;
  std::string run_id;
  std::optional<RunDigest> digest;
  std::string error;  ///< set when the run threw
  double seconds = 0.0;
};

std::string make_run_id(std::size_t point, std::uint64_t seed);

/// Runs every (point, seed) pair on `workers` threads. Results are ordered by
/// point then seed regardless of scheduling. A failing run is recorded, not
/// rethrown. `progress` is called once per finished run, serialized.
std::vector<RunOutcome> execute(const std::vector<SweepPoint>& points,
                                const std::vector<std::uint64_t>& seeds, std::size_t workers,
                                const std::function<void(const RunOutcome&)>& progress = {});

struct MeanStderr {
  double mean = 0.0;
  double se = 0.0;  ///< standard error: sample standard deviation / sqrt(n); 0 for n < 2
};

MeanStderr mean_stderr(const std::vector<double>& values);

/// Across-seed statistics of one sweep point (successful runs only).
struct AggregateRow {
  std::size_t point = 0;
  std::size_t runs = 0;
  MeanStderr satisfied;
  MeanStderr admitted;
  MeanStderr e;
  std::vector<MeanStderr> e_by_type;
  double n_users = 0.0;  ///< mean counted users per run
};

std::vector<AggregateRow> aggregate(std::size_t point_count,
                                    const std::vector<RunOutcome>& outcomes);

}  // namespace qoe
