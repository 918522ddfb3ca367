#include "qoestream/engine.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "qoestream/admission.hpp"
#include "qoestream/channel.hpp"
#include "qoestream/rng.hpp"

namespace qoe {

std::string_view to_string(AdmissionMode mode) {
  switch (mode) {
    case AdmissionMode::Off: return "off";
    case AdmissionMode::Fixed: return "fixed";
    case AdmissionMode::AutoTune: return "auto";
  }
  return "unknown";
}

AdmissionMode parse_admission(std::string_view name) {
  if (name == "off") return AdmissionMode::Off;
  if (name == "fixed") return AdmissionMode::Fixed;
  if (name == "auto") return AdmissionMode::AutoTune;
  throw std::invalid_argument("unknown admission mode '" + std::string(name) +
                              "' (expected off, fixed or auto)");
}

void ScenarioConfig::validate() const {
  if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
  if (hp_gamma && !(*hp_gamma > 0.0)) throw std::invalid_argument("hp_gamma must be positive");
  video.validate();
  hp.validate();
  if (!(hp_rate_low > 0.0 && hp_rate_low <= hp_rate_high))
    throw std::invalid_argument("need 0 < hp_rate_low <= hp_rate_high");
  if (!(r_min > 0.0 && r_min <= r_max)) throw std::invalid_argument("need 0 < r_min <= r_max");
  if (stop.video_arrivals <= 0) throw std::invalid_argument("stop.video_arrivals must be positive");
  if (stop.max_slots <= 0) throw std::invalid_argument("stop.max_slots must be positive");
  if (batch == 0) throw std::invalid_argument("batch must be positive");
  if (!(step0 > 0.0)) throw std::invalid_argument("step0 must be positive");
  if (adapt.ladder_levels < 2) throw std::invalid_argument("ladder needs at least 2 levels");

  const bool case_one = constraints.is_case_one();
  if (policy == PolicyKind::QueueDrivenCaseI && !case_one)
    throw std::invalid_argument("policy queue-case1 needs Case-I constraints");
  if (policy == PolicyKind::QueueDrivenCaseII && case_one)
    throw std::invalid_argument("policy queue-case2 needs Case-II constraints");
  if (!case_one) {
    if (type_probabilities.size() != constraints.types().size())
      throw std::invalid_argument("type_probabilities must have one entry per type");
    double total = 0.0;
    for (double p : type_probabilities) {
      if (!(p >= 0.0)) throw std::invalid_argument("type probabilities must be >= 0");
      total += p;
    }
    if (!(total > 0.0)) throw std::invalid_argument("type probabilities sum to zero");
  }
  const std::size_t components = case_one ? 1 : constraints.types().size();
  if (admission != AdmissionMode::Off && thresholds.size() != 1 &&
      thresholds.size() != components)
    throw std::invalid_argument("need one threshold or one per type");
}

bool verdict(const UserRecord& user, const ConstraintSet& constraints) {
  if (!user.admitted || user.trace.empty()) return false;
  return satisfies(user.trace, constraints, user.type).satisfied;
}

RunSummary summarize(std::span<const UserRecord> users, std::size_t warmup) {
  if (warmup >= users.size()) warmup = 0;
  RunSummary s;
  std::size_t satisfied = 0;
  std::size_t admitted = 0;
  std::size_t violated = 0;
  for (std::size_t k = warmup; k < users.size(); ++k) {
    const UserRecord& u = users[k];
    ++s.n_users;
    if (u.admitted) ++admitted;
    if (u.satisfied) ++satisfied;
    if (u.admitted && !u.satisfied) ++violated;
  }
  if (s.n_users > 0) {
    const double n = static_cast<double>(s.n_users);
    s.satisfied_frac = static_cast<double>(satisfied) / n;
    s.admitted_frac = static_cast<double>(admitted) / n;
    s.e_frac = static_cast<double>(violated) / n;
  }
  return s;
}

double prior_hp_load(const ScenarioConfig& config) {
  const PeakRateLaw law{config.hp_gamma.value_or(config.gamma)};
  const double mean_rate = 0.5 * (config.hp_rate_low + config.hp_rate_high);
  return config.hp.arrival_rate * config.hp.mean_holding * mean_rate *
         law.population_inverse_peak();
}

namespace {

struct ActiveVideo {
  std::size_t record;  // index into the run's video records
  std::uint64_t id;
  double p_avg;
  std::int64_t video_id;  // rate-quality source key
  RateQualityParams mean_params;  // sojourn means, known up front for stored video
  Eigen::VectorXd queue;
  double inverse_peak_sum = 0.0;  // for the trailing E[1/P] estimate
  std::int64_t observed_slots = 0;
};

struct ActiveHp {
  std::uint64_t id;
  double rate;
  double p_avg;
  std::int64_t departure;
};

class Simulation {
 public:
  explicit Simulation(const ScenarioConfig& config)
      : cfg_(config),
        video_law_{config.gamma},
        hp_law_{config.hp_gamma.value_or(config.gamma)},
        video_arrivals_(config.seed, StreamTag::VideoArrivals),
        hp_arrivals_(config.seed, StreamTag::HpArrivals),
        budget_(config.budget_window, prior_hp_load(config)) {
    if (config.admission == AdmissionMode::AutoTune) {
      const std::size_t components =
          config.constraints.is_case_one() ? 1 : config.constraints.types().size();
      std::vector<double> theta0 = config.thresholds;
      if (theta0.size() == 1) theta0.assign(components, theta0.front());
      tuner_.emplace(theta0, config.batch, config.step0);
    }
  }

  RunResult run() {
    for (std::int64_t slot = 0; slot < cfg_.stop.max_slots && !finished(); ++slot) step(slot);
    result_.users.resize(static_cast<std::size_t>(
        std::min<std::int64_t>(static_cast<std::int64_t>(records_.size()), cfg_.stop.video_arrivals)));
    std::move(records_.begin(),
              records_.begin() + static_cast<std::ptrdiff_t>(result_.users.size()),
              result_.users.begin());
    result_.summary = summarize(result_.users, cfg_.warmup);
    result_.total_arrivals = static_cast<std::int64_t>(records_.size());
    return std::move(result_);
  }

 private:
  bool finished() const {
    if (completed_ < cfg_.stop.video_arrivals) return false;
    if (tuner_ && cfg_.stop.threshold_updates > 0)
      for (std::size_t j = 0; j < tuner_->components(); ++j)
        if (tuner_->iterations(j) < cfg_.stop.threshold_updates) return false;
    return true;
  }

  double threshold_for(const UserRecord& user) const {
    const std::size_t j = user.type.value_or(0);
    if (tuner_) return tuner_->theta(std::min(j, tuner_->components() - 1));
    return cfg_.thresholds.size() == 1 ? cfg_.thresholds.front() : cfg_.thresholds.at(j);
  }

  double expected_inverse_peak(const ActiveVideo& v) const {
    if (cfg_.inverse_peak == InversePeakEstimate::Trailing && v.observed_slots > 0)
      return v.inverse_peak_sum / static_cast<double>(v.observed_slots);
    return PeakRateLaw::expected_inverse_peak(v.p_avg);
  }

  RateQualityParams sojourn_mean(std::int64_t video_id, int sojourn) const {
    std::vector<RateQualityParams> params;
    params.reserve(static_cast<std::size_t>(sojourn));
    for (int s = 0; s < sojourn; ++s) params.push_back(cfg_.rq.sample(cfg_.seed, video_id, s));
    return averaged_user_view(params, cfg_.r_min, cfg_.r_max, 1.0).mean_params;
  }

  AdmissionUser admission_view(const ActiveVideo& v, const UserRecord& rec) const {
    AdmissionUser u;
    u.view = {v.mean_params, cfg_.r_min, cfg_.r_max, expected_inverse_peak(v)};
    u.sojourn = rec.sojourn;
    u.type = rec.type;
    u.queue = v.queue;
    return u;
  }

  std::int64_t assign_video(std::uint64_t id) const {
    if (cfg_.rq.is_synthetic()) return static_cast<std::int64_t>(id);
    Stream rng(cfg_.seed, StreamTag::VideoAssignment, id);
    return cfg_.rq.video_id_at(static_cast<std::size_t>(rng() % cfg_.rq.video_count()));
  }

  void arrive_video(std::int64_t slot) {
    const std::uint64_t id = next_id_++;
    UserRecord rec;
    rec.id = id;
    rec.kind = UserKind::Video;
    rec.arrival_slot = slot;
    Stream sojourn_rng(cfg_.seed, StreamTag::Sojourn, id);
    rec.sojourn = sample_sojourn(cfg_.video, sojourn_rng);
    if (!cfg_.constraints.is_case_one()) {
      Stream type_rng(cfg_.seed, StreamTag::UserType, id);
      rec.type = sample_type(cfg_.type_probabilities, type_rng);
    }
    Stream peak_rng(cfg_.seed, StreamTag::PeakAverage, id);
    ActiveVideo v{records_.size(), id, video_law_.draw_average(peak_rng), assign_video(id), {},
                  Eigen::VectorXd::Zero(static_cast<Eigen::Index>(cfg_.constraints.queue_size()))};
    if (cfg_.admission != AdmissionMode::Off) v.mean_params = sojourn_mean(v.video_id, rec.sojourn);

    if (cfg_.admission == AdmissionMode::Off) {
      rec.admitted = true;
    } else {
      std::vector<AdmissionUser> existing;
      existing.reserve(videos_.size());
      for (const ActiveVideo& a : videos_) existing.push_back(admission_view(a, records_[a.record]));
      const AdmissionUser candidate = admission_view(v, rec);
      const AdmissionEstimate est = estimate_and_decide(
          candidate, existing, cfg_.constraints, budget_.expected_budget(), threshold_for(rec));
      rec.admitted = est.admitted;
      rec.admission_estimate = est.estimated_quality;
      if (est.admitted) v.queue = est.seeded_queue;
    }

    records_.push_back(std::move(rec));
    if (records_.back().admitted) {
      videos_.push_back(std::move(v));
    } else if (static_cast<std::int64_t>(records_.size()) <= cfg_.stop.video_arrivals) {
      ++completed_;
    }
  }

  void arrive_hp(std::int64_t slot) {
    const std::uint64_t id = next_id_++;
    Stream sojourn_rng(cfg_.seed, StreamTag::Sojourn, id);
    const int sojourn = sample_sojourn(cfg_.hp, sojourn_rng);
    Stream rate_rng(cfg_.seed, StreamTag::HpRate, id);
    const double rate = rate_rng.uniform(cfg_.hp_rate_low, cfg_.hp_rate_high);
    Stream peak_rng(cfg_.seed, StreamTag::PeakAverage, id);
    hps_.push_back({id, rate, hp_law_.draw_average(peak_rng), slot + sojourn - 1});
  }

  void step(std::int64_t slot) {
    // 1. Arrivals; 2. admission (in id order, inside arrive_video).
    const int new_videos = sample_arrivals(cfg_.video, video_arrivals_);
    const int new_hps = sample_arrivals(cfg_.hp, hp_arrivals_);
    for (int k = 0; k < new_videos; ++k) arrive_video(slot);
    for (int k = 0; k < new_hps; ++k) arrive_hp(slot);

    // 3. Channel.
    std::vector<std::uint64_t> ids;
    std::vector<double> averages;
    ids.reserve(hps_.size());
    averages.reserve(hps_.size());
    std::vector<double> hp_rates;
    for (const ActiveHp& h : hps_) {
      ids.push_back(h.id);
      averages.push_back(h.p_avg);
      hp_rates.push_back(h.rate);
    }
    const Eigen::VectorXd hp_peaks = sample_peaks(cfg_.seed, ids, averages, slot);
    SlotChannel channel;
    channel.hp_load = hp_load(hp_rates, {hp_peaks.data(), static_cast<std::size_t>(hp_peaks.size())});

    ids.clear();
    averages.clear();
    for (const ActiveVideo& v : videos_) {
      ids.push_back(v.id);
      averages.push_back(v.p_avg);
    }
    channel.video_peaks = sample_peaks(cfg_.seed, ids, averages, slot);

    // 4. Rate adaptation.
    std::vector<AdaptUser> users;
    std::vector<Eigen::VectorXd> queues;
    users.reserve(videos_.size());
    queues.reserve(videos_.size());
    for (const ActiveVideo& v : videos_) {
      const UserRecord& rec = records_[v.record];
      users.push_back({cfg_.rq.sample(cfg_.seed, v.video_id, slot - rec.arrival_slot), cfg_.r_min,
                       cfg_.r_max, rec.sojourn, rec.type});
      queues.push_back(v.queue);
    }
    const SlotOutcome out =
        adapt_slot(cfg_.policy, users, queues, cfg_.constraints, channel, cfg_.adapt);
    const bool queue_driven = cfg_.policy != PolicyKind::AvgQualityMax;
    for (std::size_t k = 0; k < videos_.size(); ++k) {
      ActiveVideo& v = videos_[k];
      records_[v.record].trace.push(out.qualities[static_cast<Eigen::Index>(k)]);
      if (queue_driven) v.queue = std::move(queues[k]);
      v.inverse_peak_sum += 1.0 / channel.video_peaks[static_cast<Eigen::Index>(k)];
      ++v.observed_slots;
    }

    ++result_.slots_simulated;
    if (out.allocation.overloaded) ++result_.overloaded_slots;
    if (cfg_.record_slots) {
      SlotLog log;
      log.slot = slot;
      log.utilization = utilization(out.rates, channel);
      log.hp_load = channel.hp_load;
      log.overloaded = out.allocation.overloaded;
      log.active_video = static_cast<int>(videos_.size());
      log.active_hp = static_cast<int>(hps_.size());
      for (const ActiveVideo& v : videos_) log.served.push_back(v.id);
      result_.slots.push_back(std::move(log));
    }
    budget_.observe(channel.hp_load);

    // 5. Departures.
    std::erase_if(hps_, [slot](const ActiveHp& h) { return h.departure == slot; });
    std::vector<ActiveVideo> staying;
    staying.reserve(videos_.size());
    for (ActiveVideo& v : videos_) {
      UserRecord& rec = records_[v.record];
      if (rec.departure_slot() != slot) {
        staying.push_back(std::move(v));
        continue;
      }
      rec.satisfied = verdict(rec, cfg_.constraints);
      rec.mean_quality = pooled_stats(rec.trace).mean;
      if (static_cast<std::int64_t>(v.record) < cfg_.stop.video_arrivals) ++completed_;
      if (tuner_) {
        const std::size_t j = std::min(rec.type.value_or(0), tuner_->components() - 1);
        if (auto s = tuner_->observe(rec.satisfied, j)) result_.thresholds.push_back(*s);
      }
    }
    videos_ = std::move(staying);
  }

  const ScenarioConfig& cfg_;
  PeakRateLaw video_law_;
  PeakRateLaw hp_law_;
  Stream video_arrivals_;
  Stream hp_arrivals_;
  BudgetEstimator budget_;
  std::optional<ThresholdTuner> tuner_;

  std::uint64_t next_id_ = 0;
  std::int64_t completed_ = 0;
  std::vector<UserRecord> records_;
  std::vector<ActiveVideo> videos_;
  std::vector<ActiveHp> hps_;
  RunResult result_;
};

}  // namespace

RunResult run(const ScenarioConfig& config) {
  config.validate();
  return Simulation(config).run();
}

}  // namespace qoe
