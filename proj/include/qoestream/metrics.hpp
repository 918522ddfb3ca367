#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <variant>
#include <vector>

namespace qoe {

inline constexpr double kQualityFloor = 0.0;
inline constexpr double kQualityCeiling = 100.0;

/// Per-slot delivered quality of one user over its sojourn (RDMOS, 0..100).
/// Values are clamped to the quality scale on construction.
class QualityTrace {
 public:
  QualityTrace() = default;
  explicit QualityTrace(std::vector<double> values);

  /// Appends one slot, clamped. Used by the engine while a user is active.
  void push(double quality);

  std::span<const double> values() const noexcept { return values_; }
  std::size_t length() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }

 private:
  std::vector<double> values_;
};

/// One point of a Case-I grid: the 2nd-order eCDF at `x` must not exceed `h`.
struct GridPoint {
  double x;
  double h;
};

/// Case-II constraint for users whose quality expectation is `g`.
struct TypeConstraint {
  double g;
  double h;
};

class ConstraintSet {
 public:
  /// Throws std::invalid_argument unless x is strictly increasing and h is
  /// nonnegative and nondecreasing.
  static ConstraintSet case_one(std::vector<GridPoint> grid);
  /// Type index j is the position in `types`.
  static ConstraintSet case_two(std::vector<TypeConstraint> types);

  bool is_case_one() const noexcept {
    return std::holds_alternative<std::vector<GridPoint>>(data_);
  }
  std::span<const GridPoint> grid() const;
  std::span<const TypeConstraint> types() const;

  /// Number of virtual queues a user carries under this constraint set.
  std::size_t queue_size() const noexcept { return is_case_one() ? grid().size() : 1; }

  /// Points (level, bound) applicable to a user of the given type.
  std::vector<GridPoint> applicable(std::optional<std::size_t> type) const;

 private:
  std::variant<std::vector<GridPoint>, std::vector<TypeConstraint>> data_;
};

/// The grid and bounds used throughout the Case-I simulations.
ConstraintSet default_case_one_constraints();

double ecdf2(std::span<const double> values, double x);
inline double ecdf2(const QualityTrace& trace, double x) { return ecdf2(trace.values(), x); }

struct Verdict {
  bool satisfied = false;
  /// h − ecdf2 at each applicable constraint; negative means violated.
  std::vector<double> margins;
};

/// Case II requires `type`; throws std::invalid_argument otherwise.
Verdict satisfies(const QualityTrace& trace, const ConstraintSet& constraints,
                  std::optional<std::size_t> type = std::nullopt);

struct PooledStats {
  double mean = 0.0;
  double min = 0.0;
  double variance = 0.0;  ///< population variance
};

PooledStats pooled_stats(const QualityTrace& trace);

}  // namespace qoe
