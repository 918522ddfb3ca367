#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include "qoestream/experiment.hpp"

namespace qoe {

/// RFC-4180 field: quoted when it holds a comma, quote, CR or LF.
std::string csv_field(std::string_view text);

/// Shortest decimal form that parses back to the same double.
std::string format_number(double value);

class CsvWriter {
 public:
  /// Throws std::runtime_error naming the path if the file cannot be opened.
  explicit CsvWriter(const std::filesystem::path& path);
  void row(const std::vector<std::string>& fields);
  /// Flushes and throws std::runtime_error naming the path on a write error.
  void close();

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

/// Writes users.csv, runs.csv, aggregate.csv and (when any run tuned a
/// threshold) thresholds.csv into spec.out_dir, then manifest.json. Returns
/// the paths written, manifest last.
std::vector<std::filesystem::path> emit_report(const ExperimentSpec& spec,
                                               const std::vector<SweepPoint>& points,
                                               const std::vector<RunOutcome>& outcomes);

}  // namespace qoe
