#include "qoestream/ratequality.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>

#include "qoestream/rng.hpp"

namespace qoe {

double quality(const RateQualityParams& params, double rate_kbps) {
  if (!(rate_kbps > 0.0)) throw std::invalid_argument("rate must be positive");
  return params.alpha * std::log(rate_kbps) + params.beta;
}

double rate_for_quality(const RateQualityParams& params, double q) {
  return std::exp((q - params.beta) / params.alpha);
}

void SyntheticSpec::validate() const {
  if (!(rate_low > 0.0 && rate_high > rate_low))
    throw std::invalid_argument("synthetic spec needs 0 < rate_low < rate_high");
  if (!(q_low_min <= q_low_max && q_high_min <= q_high_max))
    throw std::invalid_argument("synthetic spec quality ranges are inverted");
  if (!(coupling >= 0.0 && coupling <= 1.0))
    throw std::invalid_argument("synthetic spec coupling must lie in [0, 1]");
  if (!(q_high_min > q_low_max))
    throw std::invalid_argument(
        "synthetic spec must keep the high-rate quality above the low-rate quality");
}

namespace {

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

template <typename T>
T parse_cell(const std::string& cell, std::size_t line_no, const char* what) {
  std::istringstream in(cell);
  T value{};
  in >> value;
  if (in.fail() || !(in >> std::ws).eof())
    throw std::runtime_error("line " + std::to_string(line_no) + ": bad " + what +
                             " '" + cell + "'");
  return value;
}

}  // namespace

TraceTable read_trace_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open rate-quality trace " + path.string());
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) throw std::runtime_error("line 1: missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "video_id,slot,alpha,beta")
    throw std::runtime_error("line 1: expected header video_id,slot,alpha,beta");

  TraceTable table;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split_row(line);
    if (cells.size() != 4)
      throw std::runtime_error("line " + std::to_string(line_no) + ": expected 4 fields");
    const auto id = parse_cell<std::int64_t>(cells[0], line_no, "video_id");
    const auto slot = parse_cell<std::int64_t>(cells[1], line_no, "slot");
    RateQualityParams p{parse_cell<double>(cells[2], line_no, "alpha"),
                        parse_cell<double>(cells[3], line_no, "beta")};
    if (!(p.alpha > 0.0) || !std::isfinite(p.alpha) || !std::isfinite(p.beta))
      throw std::runtime_error("line " + std::to_string(line_no) +
                               ": alpha must be positive and beta finite");
    auto& rows = table.videos[id];
    if (slot != static_cast<std::int64_t>(rows.size()))
      throw std::runtime_error("line " + std::to_string(line_no) + ": video " +
                               std::to_string(id) + " expected slot " +
                               std::to_string(rows.size()));
    rows.push_back(p);
  }
  if (table.videos.empty()) throw std::runtime_error(path.string() + ": no rows");
  return table;
}

void write_trace_csv(const TraceTable& table, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "video_id,slot,alpha,beta\n";
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (const auto& [id, rows] : table.videos)
    for (std::size_t s = 0; s < rows.size(); ++s)
      out << id << ',' << s << ',' << rows[s].alpha << ',' << rows[s].beta << '\n';
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

RQSource::RQSource(SyntheticSpec spec) : source_(spec) { spec.validate(); }

RQSource::RQSource(TraceTable table) : source_(std::move(table)) {
  const auto& t = std::get<TraceTable>(source_);
  if (t.videos.empty()) throw std::invalid_argument("trace table has no videos");
  for (const auto& [id, rows] : t.videos)
    if (rows.empty())
      throw std::invalid_argument("video " + std::to_string(id) + " has no rows");
}

std::size_t RQSource::video_count() const noexcept {
  return is_synthetic() ? 0 : std::get<TraceTable>(source_).videos.size();
}

std::int64_t RQSource::video_id_at(std::size_t k) const {
  const auto& videos = table().videos;
  if (k >= videos.size()) throw std::out_of_range("video index");
  return std::next(videos.begin(), static_cast<std::ptrdiff_t>(k))->first;
}

RateQualityParams RQSource::sample(std::uint64_t seed, std::int64_t video_id,
                                   std::int64_t slot) const {
  if (const auto* spec = std::get_if<SyntheticSpec>(&source_)) {
    Stream rng(seed, StreamTag::RateQuality, static_cast<std::uint64_t>(video_id),
               static_cast<std::uint64_t>(slot));
    const double u_low = rng.uniform();
    const double u_high = rng.uniform() < spec->coupling ? u_low : rng.uniform();
    const double q_low = spec->q_low_min + (spec->q_low_max - spec->q_low_min) * u_low;
    const double q_high = spec->q_high_min + (spec->q_high_max - spec->q_high_min) * u_high;
    RateQualityParams p;
    p.alpha = (q_high - q_low) / std::log(spec->rate_high / spec->rate_low);
    p.beta = q_low - p.alpha * std::log(spec->rate_low);
    return p;
  }
  const auto& videos = table().videos;
  const auto it = videos.find(video_id);
  if (it == videos.end())
    throw std::invalid_argument("unknown video id " + std::to_string(video_id));
  const auto n = static_cast<std::int64_t>(it->second.size());
  return it->second[static_cast<std::size_t>(((slot % n) + n) % n)];
}

}  // namespace qoe
