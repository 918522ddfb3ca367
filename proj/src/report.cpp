#include "qoestream/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <stdexcept>

#include "qoestream/config.hpp"

namespace qoe {

using nlohmann::json;

std::string csv_field(std::string_view text) {
  if (text.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(text);
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[32];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc{}) throw std::runtime_error("number formatting failed");
  return std::string(buf, end);
}

CsvWriter::CsvWriter(const std::filesystem::path& path) : path_(path), out_(path) {
  if (!out_) throw std::runtime_error("cannot open " + path.string() + " for writing");
}

void CsvWriter::row(const std::vector<std::string>& fields) {
  for (std::size_t k = 0; k < fields.size(); ++k) {
    if (k) out_ << ',';
    out_ << csv_field(fields[k]);
  }
  out_ << "\r\n";
}

void CsvWriter::close() {
  out_.flush();
  if (!out_) throw std::runtime_error("write failed for " + path_.string());
  out_.close();
}

namespace {

std::string flag(bool b) { return b ? "1" : "0"; }

std::size_t component_count(const ScenarioConfig& c) {
  return c.constraints.is_case_one() ? 1 : c.constraints.types().size();
}

std::vector<std::string> theta_header(std::size_t components) {
  if (components == 1) return {"theta"};
  std::vector<std::string> h;
  for (std::size_t j = 1; j <= components; ++j) h.push_back("theta_" + std::to_string(j));
  return h;
}

// Fixed thresholds only; auto-tuned and open-loop points leave them blank.
std::vector<std::string> theta_fields(const ScenarioConfig& c, std::size_t components) {
  std::vector<std::string> f(components);
  if (c.admission != AdmissionMode::Fixed) return f;
  for (std::size_t j = 0; j < components; ++j)
    f[j] = format_number(c.thresholds.size() == 1 ? c.thresholds.front() : c.thresholds.at(j));
  return f;
}

void append(std::vector<std::string>& to, const std::vector<std::string>& from) {
  to.insert(to.end(), from.begin(), from.end());
}

std::filesystem::path write_users(const std::filesystem::path& dir,
                                  const std::vector<SweepPoint>& points,
                                  const std::vector<RunOutcome>& outcomes) {
  const auto path = dir / "users.csv";
  CsvWriter csv(path);
  const std::vector<double> levels = ecdf_levels(points.front().config.constraints);
  std::vector<std::string> header = {"run_id",  "seed",      "user_id", "type",
                                     "arrival_slot", "T_u",  "admitted", "satisfied",
                                     "counted", "admission_estimate", "mean_quality"};
  for (double x : levels) header.push_back("ecdf@" + format_number(x));
  csv.row(header);
  for (const RunOutcome& o : outcomes) {
    if (!o.digest) continue;
    for (const UserRow& u : o.digest->users) {
      std::vector<std::string> r = {o.run_id,
                                    std::to_string(o.seed),
                                    std::to_string(u.id),
                                    u.type ? std::to_string(*u.type + 1) : "",
                                    std::to_string(u.arrival_slot),
                                    std::to_string(u.sojourn),
                                    flag(u.admitted),
                                    flag(u.satisfied),
                                    flag(u.counted),
                                    format_number(u.admission_estimate),
                                    format_number(u.mean_quality)};
      for (double v : u.ecdf) r.push_back(format_number(v));
      csv.row(r);
    }
  }
  csv.close();
  return path;
}

std::filesystem::path write_runs(const std::filesystem::path& dir,
                                 const std::vector<SweepPoint>& points,
                                 const std::vector<RunOutcome>& outcomes) {
  const auto path = dir / "runs.csv";
  CsvWriter csv(path);
  const std::size_t components = component_count(points.front().config);
  std::vector<std::string> header = {"run_id", "point", "seed", "status", "satisfied_frac",
                                     "admitted_frac", "e_frac"};
  if (components > 1)
    for (std::size_t j = 1; j <= components; ++j) header.push_back("e_frac_type" + std::to_string(j));
  append(header, {"n_users", "total_arrivals", "slots", "overloaded_slots"});
  for (const std::string& h : theta_header(components)) header.push_back("final_" + h);
  csv.row(header);
  for (const RunOutcome& o : outcomes) {
    std::vector<std::string> r = {o.run_id, std::to_string(o.point), std::to_string(o.seed),
                                  o.digest ? "ok" : "failed"};
    std::vector<std::string> finals(components);
    if (o.digest) {
      const RunDigest& d = *o.digest;
      append(r, {format_number(d.summary.satisfied_frac), format_number(d.summary.admitted_frac),
                 format_number(d.summary.e_frac)});
      if (components > 1)
        for (std::size_t j = 0; j < components; ++j)
          r.push_back(j < d.e_by_type.size() ? format_number(d.e_by_type[j]) : "");
      append(r, {std::to_string(d.summary.n_users), std::to_string(d.total_arrivals),
                 std::to_string(d.slots_simulated), std::to_string(d.overloaded_slots)});
      for (const ThresholdStep& s : d.thresholds)
        if (s.component < components) finals[s.component] = format_number(s.theta_next);
    } else {
      r.resize(r.size() + 3 + (components > 1 ? components : 0) + 4);
    }
    append(r, finals);
    csv.row(r);
  }
  csv.close();
  return path;
}

std::filesystem::path write_aggregate(const std::filesystem::path& dir, const ExperimentSpec& spec,
                                      const std::vector<SweepPoint>& points,
                                      const std::vector<RunOutcome>& outcomes) {
  const auto path = dir / "aggregate.csv";
  CsvWriter csv(path);
  const std::size_t components = component_count(points.front().config);
  std::vector<std::string> header = {"experiment", "point", "variant", "policy", "admission",
                                     "gamma"};
  append(header, theta_header(components));
  append(header, {"satisfied_frac", "admitted_frac", "e_frac"});
  if (components > 1)
    for (std::size_t j = 1; j <= components; ++j) header.push_back("e_frac_type" + std::to_string(j));
  append(header, {"n_users", "n_runs", "stderr", "admitted_stderr", "e_stderr"});
  if (components > 1)
    for (std::size_t j = 1; j <= components; ++j)
      header.push_back("e_frac_type" + std::to_string(j) + "_stderr");
  csv.row(header);

  for (const AggregateRow& a : aggregate(points.size(), outcomes)) {
    const ScenarioConfig& c = points[a.point].config;
    std::vector<std::string> r = {spec.scenario,
                                  std::to_string(a.point),
                                  points[a.point].variant,
                                  std::string(to_string(c.policy)),
                                  std::string(to_string(c.admission)),
                                  format_number(c.gamma)};
    append(r, theta_fields(c, components));
    append(r, {format_number(a.satisfied.mean), format_number(a.admitted.mean),
               format_number(a.e.mean)});
    if (components > 1)
      for (std::size_t j = 0; j < components; ++j)
        r.push_back(j < a.e_by_type.size() ? format_number(a.e_by_type[j].mean) : "");
    append(r, {format_number(a.n_users), std::to_string(a.runs), format_number(a.satisfied.se),
               format_number(a.admitted.se), format_number(a.e.se)});
    if (components > 1)
      for (std::size_t j = 0; j < components; ++j)
        r.push_back(j < a.e_by_type.size() ? format_number(a.e_by_type[j].se) : "");
    csv.row(r);
  }
  csv.close();
  return path;
}

std::filesystem::path write_thresholds(const std::filesystem::path& dir,
                                       const std::vector<RunOutcome>& outcomes) {
  const auto path = dir / "thresholds.csv";
  CsvWriter csv(path);
  csv.row({"run_id", "seed", "type", "n", "theta", "y", "m", "step", "theta_next"});
  for (const RunOutcome& o : outcomes) {
    if (!o.digest) continue;
    for (const ThresholdStep& s : o.digest->thresholds)
      csv.row({o.run_id, std::to_string(o.seed), std::to_string(s.component + 1),
               std::to_string(s.n), format_number(s.theta), std::to_string(s.y),
               std::to_string(s.m), format_number(s.step), format_number(s.theta_next)});
  }
  csv.close();
  return path;
}

}  // namespace

std::vector<std::filesystem::path> emit_report(const ExperimentSpec& spec,
                                               const std::vector<SweepPoint>& points,
                                               const std::vector<RunOutcome>& outcomes) {
  if (points.empty()) throw std::invalid_argument("nothing to report");
  std::error_code ec;
  std::filesystem::create_directories(spec.out_dir, ec);
  if (ec) throw std::runtime_error("cannot create " + spec.out_dir.string() + ": " + ec.message());

  std::vector<std::filesystem::path> files;
  files.push_back(write_users(spec.out_dir, points, outcomes));
  files.push_back(write_runs(spec.out_dir, points, outcomes));
  files.push_back(write_aggregate(spec.out_dir, spec, points, outcomes));
  const bool tuned = std::ranges::any_of(
      outcomes, [](const RunOutcome& o) { return o.digest && !o.digest->thresholds.empty(); });
  if (tuned) files.push_back(write_thresholds(spec.out_dir, outcomes));

  json manifest;
  manifest["experiment"] = spec.scenario;
  manifest["seeds"] = spec.seeds;
  manifest["workers"] = spec.workers;
  json pts = json::array();
  for (std::size_t p = 0; p < points.size(); ++p)
    pts.push_back({{"point", p}, {"variant", points[p].variant},
                   {"config", scenario_to_json(points[p].config)}});
  manifest["points"] = pts;
  json runs = json::array();
  std::size_t failures = 0;
  for (const RunOutcome& o : outcomes) {
    json r = {{"run_id", o.run_id}, {"point", o.point}, {"seed", o.seed},
              {"status", o.digest ? "ok" : "failed"}, {"seconds", o.seconds}};
    if (!o.digest) {
      r["error"] = o.error;
      ++failures;
    }
    runs.push_back(r);
  }
  manifest["runs"] = runs;
  manifest["failures"] = failures;
  json names = json::array();
  for (const auto& f : files) names.push_back(f.filename().string());
  manifest["files"] = names;

  const auto path = spec.out_dir / "manifest.json";
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << manifest.dump(2) << '\n';
  if (!out) throw std::runtime_error("write failed for " + path.string());
  files.push_back(path);
  return files;
}

}  // namespace qoe
