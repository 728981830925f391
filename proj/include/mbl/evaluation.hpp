#pragma once

// Accuracy reports and repeated random-split cross-validation.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "mbl/classifier.hpp"
#include "mbl/core.hpp"

namespace mbl {

struct CategoryStats {
  std::size_t gold = 0;
  std::size_t predicted = 0;
  std::size_t correct = 0;

  double precision() const noexcept { return predicted ? static_cast<double>(correct) / predicted : 0.0; }
  double recall() const noexcept { return gold ? static_cast<double>(correct) / gold : 0.0; }
};

struct EvalReport {
  std::size_t correct = 0;
  std::size_t total = 0;
  double accuracy = 0.0;
  std::map<std::string, CategoryStats> per_category;
  /// (gold, predicted) -> count
  std::map<std::pair<std::string, std::string>, std::size_t> confusion;
  /// Fraction of queries whose nearest distance was shared by more than one instance.
  double tie_rate = 0.0;
  /// Fraction of query feature values unseen in training.
  double unknown_value_rate = 0.0;
};

/// Throws LengthMismatch or TooSmall (empty input).
EvalReport accuracy(const std::vector<std::string>& predictions, const std::vector<std::string>& gold);
/// Classifies every instance of `test` and scores it.
EvalReport evaluate(const InstanceBase& base, const Dataset& test, std::size_t k);
void print_report(const EvalReport& report, std::ostream& out);
std::string report_json(const EvalReport& report);

/// 64-bit Mersenne Twister (std::mt19937_64, whose output sequence is fixed by the C++
/// standard) with portable bounded draws, so splits are reproducible across platforms.
class SplitRng {
 public:
  explicit SplitRng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  /// Uniform integer in [0, bound) by rejection sampling.
  std::uint64_t below(std::uint64_t bound);
  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) std::swap(items[i - 1], items[below(i)]);
  }

 private:
  std::mt19937_64 engine_;
};

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

inline constexpr std::size_t kCrossValidationRuns = 10;

/// Instance indices ordered by content (values, then category); the order splits are drawn from.
std::vector<std::size_t> canonical_order(const Dataset& dataset);

/// Independent random 90/10 partitions. |test| = round-half-up(|D| / 10) when unstratified;
/// stratified draws that share per category. Both index lists follow the canonical order.
std::vector<Split> draw_splits(const Dataset& dataset, std::uint64_t seed, std::size_t runs = kCrossValidationRuns,
                               bool stratified = false);

/// Rows of `dataset` at `indices`, with a schema rebuilt from just those rows.
Dataset subset(const Dataset& dataset, const std::vector<std::size_t>& indices);

struct CVReport {
  std::vector<double> runs;
  double mean = 0.0;
  double stddev = 0.0;
  std::uint64_t seed = 0;
};

/// Ten train/test runs over seeded random splits. Throws TooSmall below 10 instances.
CVReport cross_validate(const Dataset& dataset, const TrainConfig& config, std::uint64_t seed,
                        bool stratified = false);
void print_cv_report(const CVReport& report, std::ostream& out);
std::string cv_report_json(const CVReport& report);

}  // namespace mbl
