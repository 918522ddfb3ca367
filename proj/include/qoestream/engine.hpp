#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "qoestream/adaptation.hpp"
#include "qoestream/metrics.hpp"
#include "qoestream/population.hpp"
#include "qoestream/ratequality.hpp"
#include "qoestream/thresholdopt.hpp"

namespace qoe {

enum class AdmissionMode { Off, Fixed, AutoTune };

std::string_view to_string(AdmissionMode mode);
/// Accepts "off", "fixed", "auto".
AdmissionMode parse_admission(std::string_view name);

enum class InversePeakEstimate { Analytic, Trailing };

struct StopCondition {
  /// Run until the first `video_arrivals` video users have left (or were
  /// blocked). Later arrivals keep the load stationary but are not recorded.
  std::int64_t video_arrivals = 2000;
  /// Additionally require this many threshold iterations per component.
  std::int64_t threshold_updates = 0;
  std::int64_t max_slots = 100'000'000;
};

struct ScenarioConfig {
  double gamma = 6.0;
  PolicyKind policy = PolicyKind::QueueDrivenCaseI;
  AdmissionMode admission = AdmissionMode::Off;
  /// Fixed thresholds (one, or one per type), or the starting point of auto-tuning.
  std::vector<double> thresholds{0.0};
  double step0 = 10.0;
  std::size_t batch = 100;

  ConstraintSet constraints = default_case_one_constraints();
  /// Case-II type law; empty for Case I.
  std::vector<double> type_probabilities;

  SojournSpec video = default_video_sojourn();
  SojournSpec hp = default_hp_sojourn();
  double hp_rate_low = 100.0;
  double hp_rate_high = 300.0;
  /// When set, high-priority users draw peaks with this γ instead of `gamma`.
  std::optional<double> hp_gamma;

  RQSource rq;
  /// File the trace source was read from (empty for synthetic sources).
  std::filesystem::path trace_path;
  double r_min = kRateMinKbps;
  double r_max = kRateMaxKbps;
  AdaptOptions adapt;

  InversePeakEstimate inverse_peak = InversePeakEstimate::Analytic;
  std::size_t budget_window = 1000;

  StopCondition stop;
  std::uint64_t seed = 1;
  /// First users (by arrival) excluded from summary fractions.
  std::size_t warmup = 50;
  bool record_slots = false;

  /// Throws std::invalid_argument describing the first problem found.
  void validate() const;
};

struct SlotLog {
  std::int64_t slot = 0;
  double utilization = 0.0;
  double hp_load = 0.0;
  bool overloaded = false;
  int active_video = 0;
  int active_hp = 0;
  std::vector<std::uint64_t> served;  ///< ids of users that received a rate
};

struct RunSummary {
  std::size_t n_users = 0;
  double satisfied_frac = 0.0;
  double admitted_frac = 0.0;
  double e_frac = 0.0;  ///< admitted but violated
};

struct RunResult {
  std::vector<UserRecord> users;  ///< the recorded video users, in id order
  std::vector<SlotLog> slots;     ///< empty unless record_slots
  std::vector<ThresholdStep> thresholds;
  RunSummary summary;
  std::int64_t slots_simulated = 0;
  std::int64_t overloaded_slots = 0;
  std::int64_t total_arrivals = 0;  ///< video arrivals including unrecorded tail
};

/// Blocked users are unsatisfied; admitted users are judged on their full trace.
bool verdict(const UserRecord& user, const ConstraintSet& constraints);

/// Fractions over users[warmup:] (all users when warmup >= size).
RunSummary summarize(std::span<const UserRecord> users, std::size_t warmup);

/// Mean high-priority load implied by the configuration, used before any
/// load has been observed.
double prior_hp_load(const ScenarioConfig& config);

/// Runs one scenario. Deterministic in (config, seed).
RunResult run(const ScenarioConfig& config);

}  // namespace qoe
