#include "qoestream/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "qoestream/config.hpp"

namespace qoe {

using nlohmann::json;

namespace {

bool known_scenario(const std::string& name) {
  return std::ranges::any_of(kExperimentNames, [&](const char* n) { return name == n; });
}

std::vector<double> arange(double lo, double hi, double step) {
  std::vector<double> out;
  for (int k = 0; lo + k * step <= hi + 1e-9; ++k) out.push_back(lo + k * step);
  return out;
}

bool is_case_two(const std::string& scenario) {
  return scenario == "fig7-grid" || scenario == "fig8-sweep" || scenario == "fig9";
}

ScenarioConfig preset(const std::string& scenario) {
  ScenarioConfig c;
  if (is_case_two(scenario)) {
    c.constraints = ConstraintSet::case_two({{40.0, 1.0}, {60.0, 1.0}});
    c.type_probabilities = {0.5, 0.5};
    c.policy = PolicyKind::QueueDrivenCaseII;
    c.thresholds = {0.0, 0.0};
  }
  if (scenario == "fig5") {
    c.gamma = 12.0;
    c.stop.video_arrivals = 100;
    c.warmup = 0;
  }
  if (scenario == "fig6a" || scenario == "fig9") c.stop.threshold_updates = 400;
  return c;
}

std::vector<double> default_gammas(const std::string& scenario) {
  if (scenario == "fig6b" || scenario == "fig8-sweep") return arange(6.0, 16.0, 1.0);
  if (scenario == "fig5") return {12.0};
  return {6.0};
}

PolicyKind queue_policy(const ScenarioConfig& c) {
  return c.constraints.is_case_one() ? PolicyKind::QueueDrivenCaseI : PolicyKind::QueueDrivenCaseII;
}

SweepPoint variant_point(const ScenarioConfig& base, const std::string& variant) {
  SweepPoint p{variant, base};
  ScenarioConfig& c = p.config;
  if (variant == "proposed+ac") {
    c.policy = queue_policy(c);
    c.admission = AdmissionMode::AutoTune;
  } else if (variant == "proposed") {
    c.policy = queue_policy(c);
    c.admission = AdmissionMode::Off;
  } else if (variant == "baseline") {
    c.policy = PolicyKind::AvgQualityMax;
    c.admission = AdmissionMode::Off;
  }
  return p;
}

SweepPoint fixed_point(const ScenarioConfig& base, std::vector<double> thetas) {
  SweepPoint p{"fixed", base};
  p.config.policy = queue_policy(base);
  p.config.admission = AdmissionMode::Fixed;
  p.config.thresholds = std::move(thetas);
  return p;
}

template <class T>
std::vector<T> read_list(const json& doc, const char* key) {
  if (!doc.contains(key)) return {};
  try {
    return doc.at(key).get<std::vector<T>>();
  } catch (const json::exception&) {
    throw std::invalid_argument(std::string("experiment: ") + key + " must be a list of numbers");
  }
}

}  // namespace

void ExperimentSpec::validate() const {
  if (!known_scenario(scenario))
    throw std::invalid_argument("unknown experiment '" + scenario + "'");
  if (seeds.empty()) throw std::invalid_argument("experiment needs at least one seed");
  if (workers == 0) throw std::invalid_argument("workers must be positive");
  for (double g : gammas)
    if (!(g > 0.0)) throw std::invalid_argument("gammas must be positive");
}

ExperimentSpec parse_experiment(const json& doc, const std::filesystem::path& base_dir) {
  if (!doc.is_object()) throw std::invalid_argument("experiment: expected an object");
  static const char* known[] = {"experiment", "seeds",      "out",    "overrides",
                                "gammas",     "thetas",     "theta_grid", "workers"};
  for (const auto& item : doc.items())
    if (std::ranges::none_of(known, [&](const char* k) { return item.key() == k; }))
      throw std::invalid_argument("experiment: " + item.key() + " is not a known key");

  ExperimentSpec spec;
  spec.base_dir = base_dir;
  try {
    if (doc.contains("experiment")) spec.scenario = doc.at("experiment").get<std::string>();
    if (doc.contains("out")) spec.out_dir = doc.at("out").get<std::string>();
    if (doc.contains("workers")) spec.workers = doc.at("workers").get<std::size_t>();
  } catch (const json::exception&) {
    throw std::invalid_argument("experiment: experiment/out/workers have the wrong type");
  }
  if (doc.contains("overrides")) spec.overrides = doc.at("overrides");
  spec.seeds = read_list<std::uint64_t>(doc, "seeds");
  spec.gammas = read_list<double>(doc, "gammas");
  spec.thetas = read_list<double>(doc, "thetas");
  if (doc.contains("theta_grid")) {
    const json& grid = doc.at("theta_grid");
    spec.theta1 = read_list<double>(grid, "theta1");
    spec.theta2 = read_list<double>(grid, "theta2");
  }
  return spec;
}

std::vector<SweepPoint> expand(const ExperimentSpec& spec) {
  spec.validate();
  ScenarioConfig base = apply_scenario_json(spec.overrides, preset(spec.scenario), spec.base_dir);
  const std::vector<double> gammas =
      !spec.gammas.empty()             ? spec.gammas
      : spec.overrides.contains("gamma") ? std::vector<double>{base.gamma}
                                         : default_gammas(spec.scenario);

  std::vector<SweepPoint> points;
  for (double gamma : gammas) {
    ScenarioConfig c = base;
    c.gamma = gamma;
    const std::string& s = spec.scenario;
    if (s == "fig5") {
      points.push_back(variant_point(c, "proposed"));
      points.push_back(variant_point(c, "baseline"));
    } else if (s == "fig4-sweep") {
      for (double theta : spec.thetas.empty() ? arange(0.0, 80.0, 5.0) : spec.thetas)
        points.push_back(fixed_point(c, {theta}));
    } else if (s == "fig6a" || s == "fig9") {
      points.push_back(variant_point(c, "proposed+ac"));
    } else if (s == "fig6b" || s == "fig8-sweep") {
      points.push_back(variant_point(c, "proposed+ac"));
      points.push_back(variant_point(c, "proposed"));
      points.push_back(variant_point(c, "baseline"));
    } else if (s == "fig7-grid") {
      for (double t1 : spec.theta1.empty() ? arange(0.0, 70.0, 10.0) : spec.theta1)
        for (double t2 : spec.theta2.empty() ? arange(0.0, 80.0, 10.0) : spec.theta2)
          points.push_back(fixed_point(c, {t1, t2}));
    } else {
      points.push_back({"custom", c});
    }
  }
  for (const SweepPoint& p : points) p.config.validate();
  return points;
}

std::vector<double> ecdf_levels(const ConstraintSet& constraints) {
  std::vector<double> levels;
  if (constraints.is_case_one()) {
    for (const GridPoint& p : constraints.grid()) levels.push_back(p.x);
  } else {
    for (const TypeConstraint& t : constraints.types()) levels.push_back(t.g);
  }
  return levels;
}

RunDigest digest(const RunResult& result, const ScenarioConfig& config) {
  RunDigest d;
  d.thresholds = result.thresholds;
  d.summary = result.summary;
  d.slots_simulated = result.slots_simulated;
  d.overloaded_slots = result.overloaded_slots;
  d.total_arrivals = result.total_arrivals;

  const std::vector<double> levels = ecdf_levels(config.constraints);
  const std::size_t warmup = config.warmup >= result.users.size() ? 0 : config.warmup;
  const std::size_t types = config.constraints.is_case_one() ? 0 : config.constraints.types().size();
  std::vector<std::size_t> of_type(types, 0);
  std::vector<std::size_t> violated(types, 0);

  d.users.reserve(result.users.size());
  for (std::size_t k = 0; k < result.users.size(); ++k) {
    const UserRecord& u = result.users[k];
    UserRow row;
    row.id = u.id;
    row.type = u.type;
    row.arrival_slot = u.arrival_slot;
    row.sojourn = u.sojourn;
    row.admitted = u.admitted;
    row.satisfied = u.satisfied;
    row.counted = k >= warmup;
    row.admission_estimate = u.admission_estimate;
    row.mean_quality = u.mean_quality;
    for (double x : levels) row.ecdf.push_back(u.trace.empty() ? 0.0 : ecdf2(u.trace, x));
    if (row.counted && u.type && *u.type < types) {
      ++of_type[*u.type];
      if (u.admitted && !u.satisfied) ++violated[*u.type];
    }
    d.users.push_back(std::move(row));
  }
  for (std::size_t j = 0; j < types; ++j)
    d.e_by_type.push_back(of_type[j] == 0 ? 0.0
                                          : static_cast<double>(violated[j]) /
                                                static_cast<double>(of_type[j]));
  return d;
}

std::string make_run_id(std::size_t point, std::uint64_t seed) {
  return "p" + std::to_string(point) + "-s" + std::to_string(seed);
}

std::vector<RunOutcome> execute(const std::vector<SweepPoint>& points,
                                const std::vector<std::uint64_t>& seeds, std::size_t workers,
                                const std::function<void(const RunOutcome&)>& progress) {
  std::vector<RunOutcome> outcomes(points.size() * seeds.size());
  for (std::size_t p = 0; p < points.size(); ++p)
    for (std::size_t s = 0; s < seeds.size(); ++s) {
      RunOutcome& o = outcomes[p * seeds.size() + s];
      o.point = p;
      o.seed = seeds[s];
      o.run_id = make_run_id(p, seeds[s]);
    }

  std::atomic<std::size_t> next{0};
  std::mutex report;
  auto worker = [&] {
    for (std::size_t k = next++; k < outcomes.size(); k = next++) {
      RunOutcome& o = outcomes[k];
      const auto start = std::chrono::steady_clock::now();
      try {
        ScenarioConfig config = points[o.point].config;
        config.seed = o.seed;
        o.digest = digest(run(config), config);
      } catch (const std::exception& e) {
        o.error = e.what();
      }
      o.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      if (progress) {
        std::lock_guard lock(report);
        progress(o);
      }
    }
  };

  const std::size_t n = std::max<std::size_t>(1, std::min(workers, outcomes.size()));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < n; ++t) pool.emplace_back(worker);
  }
  return outcomes;
}

MeanStderr mean_stderr(const std::vector<double>& values) {
  MeanStderr out;
  if (values.empty()) return out;
  const double n = static_cast<double>(values.size());
  for (double v : values) out.mean += v;
  out.mean /= n;
  if (values.size() < 2) return out;
  double ss = 0.0;
  for (double v : values) ss += (v - out.mean) * (v - out.mean);
  out.se = std::sqrt(ss / (n - 1.0) / n);
  return out;
}

std::vector<AggregateRow> aggregate(std::size_t point_count,
                                    const std::vector<RunOutcome>& outcomes) {
  std::vector<AggregateRow> rows(point_count);
  for (std::size_t p = 0; p < point_count; ++p) {
    std::vector<double> sat, adm, e, users;
    std::vector<std::vector<double>> by_type;
    for (const RunOutcome& o : outcomes) {
      if (o.point != p || !o.digest) continue;
      const RunDigest& d = *o.digest;
      sat.push_back(d.summary.satisfied_frac);
      adm.push_back(d.summary.admitted_frac);
      e.push_back(d.summary.e_frac);
      users.push_back(static_cast<double>(d.summary.n_users));
      by_type.resize(std::max(by_type.size(), d.e_by_type.size()));
      for (std::size_t j = 0; j < d.e_by_type.size(); ++j) by_type[j].push_back(d.e_by_type[j]);
    }
    AggregateRow& row = rows[p];
    row.point = p;
    row.runs = sat.size();
    row.satisfied = mean_stderr(sat);
    row.admitted = mean_stderr(adm);
    row.e = mean_stderr(e);
    row.n_users = mean_stderr(users).mean;
    for (const auto& v : by_type) row.e_by_type.push_back(mean_stderr(v));
  }
  return rows;
}

}  // namespace qoe
