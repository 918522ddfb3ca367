#include "qoestream/config.hpp"

#include <fstream>
#include <set>
#include <stdexcept>
#include <string>

namespace qoe {

using nlohmann::json;

namespace {

// Walks one JSON object and rejects keys nobody asked for.
class Section {
 public:
  Section(const json& doc, std::string path) : doc_(doc), path_(std::move(path)) {
    if (!doc_.is_object()) fail(path_.empty() ? "config" : path_, "expected an object");
  }
  bool has(const std::string& key) {
    seen_.insert(key);
    return doc_.contains(key) && !doc_.at(key).is_null();
  }

  const json& raw(const std::string& key) {
    seen_.insert(key);
    return doc_.at(key);
  }

  std::string key_path(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  template <class T>
  void read(const std::string& key, T& out) {
    if (!has(key)) return;
    try {
      out = doc_.at(key).get<T>();
    } catch (const json::exception&) {
      fail(key_path(key), "has the wrong type");
    }
  }

  void finish() const {
    for (const auto& item : doc_.items())
      if (!seen_.contains(item.key())) fail(key_path(item.key()), "is not a known key");
  }

  [[noreturn]] static void fail(const std::string& where, const std::string& what) {
    throw std::invalid_argument("config: " + where + " " + what);
  }

 private:
  const json& doc_;
  std::string path_;
  std::set<std::string> seen_;
};

void read_sojourn(Section& parent, const std::string& key, SojournSpec& spec) {
  if (!parent.has(key)) return;
  Section s(parent.raw(key), parent.key_path(key));
  s.read("arrival_rate", spec.arrival_rate);
  s.read("mean_holding", spec.mean_holding);
  s.read("min_sojourn", spec.floor_slots);
  s.finish();
}

void read_range(Section& s, const std::string& key, double& lo, double& hi) {
  if (!s.has(key)) return;
  const json& v = s.raw(key);
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
    Section::fail(s.key_path(key), "must be a [low, high] pair");
  lo = v[0].get<double>();
  hi = v[1].get<double>();
}

ConstraintSet read_constraints(Section& parent, ScenarioConfig& config) {
  Section s(parent.raw("constraints"), "constraints");
  const bool grid = s.has("grid");
  const bool types = s.has("types");
  if (grid == types) Section::fail("constraints", "needs exactly one of grid or types");
  ConstraintSet out = default_case_one_constraints();
  try {
    if (grid) {
      std::vector<GridPoint> points;
      for (const json& p : s.raw("grid")) {
        Section ps(p, "constraints.grid[]");
        GridPoint g{};
        ps.read("x", g.x);
        ps.read("h", g.h);
        ps.finish();
        points.push_back(g);
      }
      out = ConstraintSet::case_one(std::move(points));
      config.type_probabilities.clear();
    } else {
      std::vector<TypeConstraint> list;
      std::vector<double> probabilities;
      for (const json& p : s.raw("types")) {
        Section ts(p, "constraints.types[]");
        TypeConstraint t{};
        double probability = 1.0;
        ts.read("g", t.g);
        ts.read("h", t.h);
        ts.read("probability", probability);
        ts.finish();
        list.push_back(t);
        probabilities.push_back(probability);
      }
      out = ConstraintSet::case_two(std::move(list));
      config.type_probabilities = std::move(probabilities);
    }
  } catch (const json::exception&) {
    Section::fail("constraints", "entries must be objects with numeric fields");
  }
  s.finish();
  return out;
}

}  // namespace

ScenarioConfig apply_scenario_json(const json& doc, ScenarioConfig config,
                                   const std::filesystem::path& base_dir) {
  Section top(doc, "");
  top.read("gamma", config.gamma);
  top.read("seed", config.seed);
  top.read("warmup", config.warmup);
  top.read("record_slots", config.record_slots);
  if (top.has("policy")) {
    std::string name;
    top.read("policy", name);
    config.policy = parse_policy(name);
  }

  if (top.has("admission")) {
    Section s(top.raw("admission"), "admission");
    if (s.has("mode")) {
      std::string mode;
      s.read("mode", mode);
      config.admission = parse_admission(mode);
    }
    if (s.has("thresholds")) {
      const json& t = s.raw("thresholds");
      if (t.is_number()) {
        config.thresholds = {t.get<double>()};
      } else {
        s.read("thresholds", config.thresholds);
      }
    }
    s.read("step0", config.step0);
    s.read("batch", config.batch);
    s.read("budget_window", config.budget_window);
    if (s.has("inverse_peak")) {
      std::string mode;
      s.read("inverse_peak", mode);
      if (mode == "analytic") {
        config.inverse_peak = InversePeakEstimate::Analytic;
      } else if (mode == "trailing") {
        config.inverse_peak = InversePeakEstimate::Trailing;
      } else {
        Section::fail("admission.inverse_peak", "must be analytic or trailing");
      }
    }
    s.finish();
  }

  if (top.has("constraints")) config.constraints = read_constraints(top, config);

  read_sojourn(top, "video", config.video);
  if (top.has("hp")) {
    Section s(top.raw("hp"), "hp");
    s.read("arrival_rate", config.hp.arrival_rate);
    s.read("mean_holding", config.hp.mean_holding);
    s.read("min_sojourn", config.hp.floor_slots);
    s.read("rate_low", config.hp_rate_low);
    s.read("rate_high", config.hp_rate_high);
    if (s.has("gamma")) {
      double g = 0.0;
      s.read("gamma", g);
      config.hp_gamma = g;
    }
    s.finish();
  }

  if (top.has("rq")) {
    Section s(top.raw("rq"), "rq");
    const bool synthetic = s.has("synthetic");
    const bool trace = s.has("trace");
    if (synthetic == trace) Section::fail("rq", "needs exactly one of synthetic or trace");
    if (synthetic) {
      SyntheticSpec spec = config.rq.is_synthetic() ? config.rq.synthetic() : SyntheticSpec{};
      Section ss(s.raw("synthetic"), "rq.synthetic");
      read_range(ss, "q_low", spec.q_low_min, spec.q_low_max);
      read_range(ss, "q_high", spec.q_high_min, spec.q_high_max);
      ss.read("rate_low", spec.rate_low);
      ss.read("rate_high", spec.rate_high);
      ss.read("coupling", spec.coupling);
      ss.finish();
      spec.validate();
      config.rq = RQSource(spec);
      config.trace_path.clear();
    } else {
      std::string path;
      s.read("trace", path);
      std::filesystem::path p(path);
      if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
      config.rq = RQSource(read_trace_csv(p));
      config.trace_path = p;
    }
    s.finish();
  }

  if (top.has("rates")) {
    Section s(top.raw("rates"), "rates");
    s.read("min", config.r_min);
    s.read("max", config.r_max);
    s.finish();
  }
  if (top.has("ladder")) {
    Section s(top.raw("ladder"), "ladder");
    s.read("enabled", config.adapt.ladder_rounding);
    s.read("levels", config.adapt.ladder_levels);
    s.finish();
  }
  if (top.has("stop")) {
    Section s(top.raw("stop"), "stop");
    s.read("video_arrivals", config.stop.video_arrivals);
    s.read("threshold_updates", config.stop.threshold_updates);
    s.read("max_slots", config.stop.max_slots);
    s.finish();
  }
  top.finish();
  return config;
}

json scenario_to_json(const ScenarioConfig& c) {
  json doc;
  doc["gamma"] = c.gamma;
  doc["policy"] = std::string(to_string(c.policy));
  doc["seed"] = c.seed;
  doc["warmup"] = c.warmup;
  doc["record_slots"] = c.record_slots;
  doc["admission"] = {
      {"mode", std::string(to_string(c.admission))},
      {"thresholds", c.thresholds},
      {"step0", c.step0},
      {"batch", c.batch},
      {"budget_window", c.budget_window},
      {"inverse_peak", c.inverse_peak == InversePeakEstimate::Analytic ? "analytic" : "trailing"},
  };
  if (c.constraints.is_case_one()) {
    json grid = json::array();
    for (const GridPoint& p : c.constraints.grid()) grid.push_back({{"x", p.x}, {"h", p.h}});
    doc["constraints"] = {{"grid", grid}};
  } else {
    json types = json::array();
    const auto list = c.constraints.types();
    for (std::size_t j = 0; j < list.size(); ++j) {
      json t = {{"g", list[j].g}, {"h", list[j].h}};
      if (j < c.type_probabilities.size()) t["probability"] = c.type_probabilities[j];
      types.push_back(t);
    }
    doc["constraints"] = {{"types", types}};
  }
  doc["video"] = {{"arrival_rate", c.video.arrival_rate},
                  {"mean_holding", c.video.mean_holding},
                  {"min_sojourn", c.video.floor_slots}};
  doc["hp"] = {{"arrival_rate", c.hp.arrival_rate},
               {"mean_holding", c.hp.mean_holding},
               {"min_sojourn", c.hp.floor_slots},
               {"rate_low", c.hp_rate_low},
               {"rate_high", c.hp_rate_high}};
  if (c.hp_gamma) doc["hp"]["gamma"] = *c.hp_gamma;
  if (c.rq.is_synthetic()) {
    const SyntheticSpec& s = c.rq.synthetic();
    doc["rq"] = {{"synthetic",
                  {{"q_low", {s.q_low_min, s.q_low_max}},
                   {"q_high", {s.q_high_min, s.q_high_max}},
                   {"rate_low", s.rate_low},
                   {"rate_high", s.rate_high},
                   {"coupling", s.coupling}}}};
  } else {
    doc["rq"] = {{"trace", c.trace_path.string()}};
  }
  doc["rates"] = {{"min", c.r_min}, {"max", c.r_max}};
  doc["ladder"] = {{"enabled", c.adapt.ladder_rounding}, {"levels", c.adapt.ladder_levels}};
  doc["stop"] = {{"video_arrivals", c.stop.video_arrivals},
                 {"threshold_updates", c.stop.threshold_updates},
                 {"max_slots", c.stop.max_slots}};
  return doc;
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  try {
    return json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(path.string() + ": " + e.what());
  }
}

}  // namespace qoe
