#include "qoestream/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace qoe {

namespace {

double clamp_quality(double q) {
  if (!std::isfinite(q)) throw std::invalid_argument("quality value is not finite");
  return std::clamp(q, kQualityFloor, kQualityCeiling);
}

}  // namespace

QualityTrace::QualityTrace(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw std::invalid_argument("quality trace must be nonempty");
  for (double& v : values_) v = clamp_quality(v);
}

void QualityTrace::push(double quality) { values_.push_back(clamp_quality(quality)); }

ConstraintSet ConstraintSet::case_one(std::vector<GridPoint> grid) {
  if (grid.empty()) throw std::invalid_argument("Case-I grid must be nonempty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!std::isfinite(grid[i].x) || !std::isfinite(grid[i].h) || grid[i].h < 0.0)
      throw std::invalid_argument("Case-I grid point " + std::to_string(i) +
                                  " must have finite x and h >= 0");
    if (i > 0 && grid[i].x <= grid[i - 1].x)
      throw std::invalid_argument("Case-I grid must be strictly increasing in x");
    if (i > 0 && grid[i].h < grid[i - 1].h)
      throw std::invalid_argument("Case-I bounds must be nondecreasing in x");
  }
  ConstraintSet set;
  set.data_ = std::move(grid);
  return set;
}

ConstraintSet ConstraintSet::case_two(std::vector<TypeConstraint> types) {
  if (types.empty()) throw std::invalid_argument("Case-II constraint set needs at least one type");
  for (std::size_t j = 0; j < types.size(); ++j)
    if (!std::isfinite(types[j].g) || !std::isfinite(types[j].h) || types[j].h < 0.0)
      throw std::invalid_argument("Case-II type " + std::to_string(j) +
                                  " must have finite g and h >= 0");
  ConstraintSet set;
  set.data_ = std::move(types);
  return set;
}

std::span<const GridPoint> ConstraintSet::grid() const {
  const auto* grid = std::get_if<std::vector<GridPoint>>(&data_);
  if (!grid) throw std::logic_error("constraint set is not Case I");
  return *grid;
}

std::span<const TypeConstraint> ConstraintSet::types() const {
  const auto* types = std::get_if<std::vector<TypeConstraint>>(&data_);
  if (!types) throw std::logic_error("constraint set is not Case II");
  return *types;
}

std::vector<GridPoint> ConstraintSet::applicable(std::optional<std::size_t> type) const {
  if (is_case_one()) {
    auto g = grid();
    return {g.begin(), g.end()};
  }
  auto t = types();
  if (!type) throw std::invalid_argument("Case-II constraints require a user type");
  if (*type >= t.size())
    throw std::invalid_argument("unknown user type " + std::to_string(*type));
  return {GridPoint{t[*type].g, t[*type].h}};
}

ConstraintSet default_case_one_constraints() {
  return ConstraintSet::case_one(
      {{30.0, 0.7}, {40.0, 1.0}, {50.0, 3.0}, {60.0, 7.0}, {70.0, 15.0}});
}

double ecdf2(std::span<const double> values, double x) {
  if (values.empty()) throw std::invalid_argument("ecdf2 of an empty trace");
  double sum = 0.0;
  for (double q : values) sum += std::max(x - q, 0.0);
  return sum / static_cast<double>(values.size());
}

Verdict satisfies(const QualityTrace& trace, const ConstraintSet& constraints,
                  std::optional<std::size_t> type) {
  Verdict verdict;
  verdict.satisfied = true;
  for (const GridPoint& p : constraints.applicable(type)) {
    const double margin = p.h - ecdf2(trace, p.x);
    verdict.margins.push_back(margin);
    if (margin < 0.0) verdict.satisfied = false;
  }
  return verdict;
}

PooledStats pooled_stats(const QualityTrace& trace) {
  if (trace.empty()) throw std::invalid_argument("pooled_stats of an empty trace");
  const auto v = trace.values();
  const double n = static_cast<double>(v.size());
  PooledStats s;
  double sum = 0.0;
  s.min = v.front();
  for (double q : v) {
    sum += q;
    s.min = std::min(s.min, q);
  }
  s.mean = sum / n;
  double ss = 0.0;
  for (double q : v) ss += (q - s.mean) * (q - s.mean);
  s.variance = ss / n;
  return s;
}

}  // namespace qoe
