#include "mbl/evaluation.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <future>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <set>

namespace mbl {

EvalReport accuracy(const std::vector<std::string>& predictions, const std::vector<std::string>& gold) {
  if (predictions.size() != gold.size())
    throw Error(ErrorCode::LengthMismatch, std::to_string(predictions.size()) + " predictions for " +
                                               std::to_string(gold.size()) + " gold labels");
  if (gold.empty()) throw Error(ErrorCode::TooSmall, "nothing to score");
  EvalReport r;
  r.total = gold.size();
  for (std::size_t i = 0; i < gold.size(); ++i) {
    ++r.per_category[gold[i]].gold;
    ++r.per_category[predictions[i]].predicted;
    ++r.confusion[{gold[i], predictions[i]}];
    if (predictions[i] == gold[i]) {
      ++r.correct;
      ++r.per_category[gold[i]].correct;
    }
  }
  r.accuracy = static_cast<double>(r.correct) / static_cast<double>(r.total);
  return r;
}

EvalReport evaluate(const InstanceBase& base, const Dataset& test, std::size_t k) {
  std::vector<std::string> predictions, gold;
  predictions.reserve(test.size());
  gold.reserve(test.size());
  std::size_t ties = 0, unknown = 0;
  for (const auto& p : test.instances()) {
    const auto c = base.classify(p, k);
    if (c.tie_count > 1) ++ties;
    unknown += c.unknown_values;
    predictions.push_back(c.category);
    gold.push_back(*p.category);
  }
  auto r = accuracy(predictions, gold);
  r.tie_rate = static_cast<double>(ties) / static_cast<double>(r.total);
  const auto values = r.total * test.arity();
  r.unknown_value_rate = values ? static_cast<double>(unknown) / static_cast<double>(values) : 0.0;
  return r;
}

void print_report(const EvalReport& report, std::ostream& out) {
  out << std::fixed << std::setprecision(4);
  out << "instances: " << report.total << '\n'
      << "correct:   " << report.correct << '\n'
      << "accuracy:  " << report.accuracy << '\n'
      << "tie rate:  " << report.tie_rate << '\n'
      << "unknown values: " << report.unknown_value_rate << '\n';

  std::vector<std::string> labels;
  for (const auto& [label, stats] : report.per_category) labels.push_back(label);
  std::size_t width = 8;
  for (const auto& l : labels) width = std::max(width, l.size() + 1);
  for (const auto& [key, count] : report.confusion) width = std::max(width, std::to_string(count).size() + 1);
  const int w = static_cast<int>(width);

  out << "\nconfusion (rows gold, columns predicted)\n" << std::setw(w) << "";
  for (const auto& l : labels) out << std::setw(w) << l;
  out << '\n';
  for (const auto& g : labels) {
    out << std::setw(w) << g;
    for (const auto& p : labels) {
      const auto it = report.confusion.find({g, p});
      out << std::setw(w) << (it == report.confusion.end() ? 0 : it->second);
    }
    out << '\n';
  }

  out << '\n' << std::setw(w) << "category" << std::setw(10) << "precision" << std::setw(10) << "recall" << '\n';
  for (const auto& [label, stats] : report.per_category)
    out << std::setw(w) << label << std::setw(10) << stats.precision() << std::setw(10) << stats.recall() << '\n';
  out << std::defaultfloat;
}

std::string report_json(const EvalReport& report) {
  nlohmann::json j;
  j["instances"] = report.total;
  j["correct"] = report.correct;
  j["accuracy"] = report.accuracy;
  j["tie_rate"] = report.tie_rate;
  j["unknown_value_rate"] = report.unknown_value_rate;
  auto& cats = j["categories"] = nlohmann::json::object();
  for (const auto& [label, s] : report.per_category)
    cats[label] = {{"gold", s.gold}, {"predicted", s.predicted}, {"correct", s.correct}};
  auto& confusion = j["confusion"] = nlohmann::json::array();
  for (const auto& [key, count] : report.confusion)
    confusion.push_back({{"gold", key.first}, {"predicted", key.second}, {"count", count}});
  return j.dump();
}

std::uint64_t SplitRng::below(std::uint64_t bound) {
  if (bound == 0) throw Error(ErrorCode::BadValue, "empty range");
  // Reject the low 2^64 mod bound outputs so the remainder is unbiased.
  const std::uint64_t threshold = (0 - bound) % bound;
  std::uint64_t x;
  do {
    x = next();
  } while (x < threshold);
  return x % bound;
}

namespace {

bool pattern_less(const Pattern& a, const Pattern& b) {
  if (a.values != b.values) return a.values < b.values;
  return a.category < b.category;
}

std::size_t test_share(std::size_t n) { return (n + 5) / 10; }

}  // namespace

std::vector<std::size_t> canonical_order(const Dataset& dataset) {
  std::vector<std::size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return pattern_less(dataset[a], dataset[b]); });
  return order;
}

std::vector<Split> draw_splits(const Dataset& dataset, std::uint64_t seed, std::size_t runs, bool stratified) {
  const auto order = canonical_order(dataset);
  std::vector<std::size_t> rank(order.size());
  for (std::size_t r = 0; r < order.size(); ++r) rank[order[r]] = r;
  const auto by_rank = [&](std::size_t a, std::size_t b) { return rank[a] < rank[b]; };

  SplitRng rng(seed);
  std::vector<Split> splits;
  splits.reserve(runs);
  for (std::size_t run = 0; run < runs; ++run) {
    Split split;
    if (!stratified) {
      auto shuffled = order;
      rng.shuffle(shuffled);
      const auto m = test_share(shuffled.size());
      split.test.assign(shuffled.begin(), shuffled.begin() + static_cast<std::ptrdiff_t>(m));
      split.train.assign(shuffled.begin() + static_cast<std::ptrdiff_t>(m), shuffled.end());
    } else {
      std::map<std::string, std::vector<std::size_t>> groups;
      for (const auto i : order) groups[*dataset[i].category].push_back(i);
      for (auto& [label, members] : groups) {
        rng.shuffle(members);
        const auto m = test_share(members.size());
        split.test.insert(split.test.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(m));
        split.train.insert(split.train.end(), members.begin() + static_cast<std::ptrdiff_t>(m), members.end());
      }
    }
    std::sort(split.test.begin(), split.test.end(), by_rank);
    std::sort(split.train.begin(), split.train.end(), by_rank);
    splits.push_back(std::move(split));
  }
  return splits;
}

Dataset subset(const Dataset& dataset, const std::vector<std::size_t>& indices) {
  std::vector<Pattern> rows;
  rows.reserve(indices.size());
  for (const auto i : indices) rows.push_back(dataset[i]);
  std::vector<std::string> names;
  if (dataset.schema().has_names())
    for (const auto& f : dataset.schema().features()) names.push_back(f.name);
  return Dataset::build(dataset.schema().kinds(), std::move(rows), std::move(names));
}

CVReport cross_validate(const Dataset& dataset, const TrainConfig& config, std::uint64_t seed, bool stratified) {
  if (dataset.size() < 10)
    throw Error(ErrorCode::TooSmall, "cross-validation needs at least 10 instances, got " +
                                         std::to_string(dataset.size()));
  const auto splits = draw_splits(dataset, seed, kCrossValidationRuns, stratified);

  std::vector<std::future<double>> pending;
  pending.reserve(splits.size());
  for (const auto& split : splits) {
    pending.push_back(std::async(std::launch::async, [&dataset, &config, &split] {
      const auto base = InstanceBase::train(subset(dataset, split.train), config);
      return evaluate(base, subset(dataset, split.test), config.k).accuracy;
    }));
  }

  CVReport report;
  report.seed = seed;
  for (auto& f : pending) report.runs.push_back(f.get());
  const double n = static_cast<double>(report.runs.size());
  report.mean = std::accumulate(report.runs.begin(), report.runs.end(), 0.0) / n;
  double ss = 0.0;
  for (const double a : report.runs) ss += (a - report.mean) * (a - report.mean);
  report.stddev = report.runs.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  return report;
}

void print_cv_report(const CVReport& report, std::ostream& out) {
  out << std::fixed << std::setprecision(4);
  for (std::size_t i = 0; i < report.runs.size(); ++i)
    out << "run " << std::setw(2) << i + 1 << "  accuracy " << report.runs[i] << '\n';
  out << "mean    " << report.mean << '\n' << "stddev  " << report.stddev << '\n' << "seed    " << report.seed << '\n';
  out << std::defaultfloat;
}

std::string cv_report_json(const CVReport& report) {
  nlohmann::json j;
  j["runs"] = report.runs;
  j["mean"] = report.mean;
  j["stddev"] = report.stddev;
  j["seed"] = report.seed;
  return j.dump();
}

}  // namespace mbl
