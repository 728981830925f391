#pragma once

// Independent reference implementations used to check the library. They work
// straight from raw instances and never touch the library's encodings or tables.

#include <algorithm>
#include <cmath>
#include <iterator>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "mbl/classifier.hpp"
#include "mbl/core.hpp"

namespace oracle {

/// Entropy by the rearranged form log2(N) - (1/N) * sum c*log2(c).
inline double entropy(const std::vector<std::size_t>& counts) {
  double n = 0.0;
  for (auto c : counts) n += static_cast<double>(c);
  if (n == 0.0) return 0.0;
  double s = 0.0;
  for (auto c : counts)
    if (c) s += static_cast<double>(c) * std::log2(static_cast<double>(c));
  return std::log2(n) - s / n;
}

inline std::vector<std::size_t> label_counts(const std::vector<std::string>& labels) {
  std::map<std::string, std::size_t> m;
  for (const auto& l : labels) ++m[l];
  std::vector<std::size_t> out;
  for (const auto& [l, c] : m) out.push_back(c);
  return out;
}

inline double database_entropy(const mbl::Dataset& d) {
  std::vector<std::string> labels;
  for (const auto& p : d.instances()) labels.push_back(*p.category);
  return entropy(label_counts(labels));
}

inline double average_entropy(const mbl::Dataset& d, std::size_t f) {
  // Brute-force partition: linear search for each value's cell.
  std::vector<mbl::FeatureValue> values;
  std::vector<std::vector<std::string>> cells;
  for (const auto& p : d.instances()) {
    std::size_t j = 0;
    while (j < values.size() && !(values[j] == p.values[f])) ++j;
    if (j == values.size()) {
      values.push_back(p.values[f]);
      cells.emplace_back();
    }
    cells[j].push_back(*p.category);
  }
  double h = 0.0;
  for (const auto& cell : cells)
    h += entropy(label_counts(cell)) * static_cast<double>(cell.size()) / static_cast<double>(d.size());
  return h;
}

inline double information_gain(const mbl::Dataset& d, std::size_t f) {
  return oracle::database_entropy(d) - oracle::average_entropy(d, f);
}

/// Exhaustive-scan nearest neighbour over raw training instances.
class NearestNeighbour {
 public:
  NearestNeighbour(const mbl::Dataset& train, std::vector<mbl::Metric> metrics, std::vector<double> weights)
      : train_(train), metrics_(std::move(metrics)), weights_(std::move(weights)) {
    std::set<std::string> cats;
    for (const auto& p : train_.instances()) cats.insert(*p.category);
    categories_.assign(cats.begin(), cats.end());
  }

  double delta(std::size_t f, const mbl::FeatureValue& a, const mbl::FeatureValue& b) const {
    if (a.is_missing() || b.is_missing()) return (a.is_missing() && b.is_missing()) ? 0.0 : 1.0;
    switch (metrics_[f]) {
      case mbl::Metric::Numeric: {
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (const auto& p : train_.instances())
          if (p.values[f].is_number()) {
            lo = std::min(lo, p.values[f].as_number());
            hi = std::max(hi, p.values[f].as_number());
          }
        const double x = a.as_number(), y = b.as_number();
        if (hi == lo) return x == y ? 0.0 : 1.0;
        return std::min(1.0, std::abs(x - y) / (hi - lo));
      }
      case mbl::Metric::TagSet: {
        const auto sa = tags(a), sb = tags(b);
        std::vector<std::string> both, any;
        std::set_intersection(sa.begin(), sa.end(), sb.begin(), sb.end(), std::back_inserter(both));
        std::set_union(sa.begin(), sa.end(), sb.begin(), sb.end(), std::back_inserter(any));
        return 1.0 - static_cast<double>(both.size()) / static_cast<double>(any.size());
      }
      case mbl::Metric::ValueDifference: {
        if (a == b) return 0.0;
        const auto ca = conditional_counts(f, a), cb = conditional_counts(f, b);
        double na = 0, nb = 0;
        for (auto c : ca) na += c;
        for (auto c : cb) nb += c;
        if (na == 0 || nb == 0) return 1.0;  // unseen value: overlap
        double s = 0.0;
        for (std::size_t c = 0; c < categories_.size(); ++c) s += std::abs(ca[c] / na - cb[c] / nb);
        return s;
      }
      default:
        return a == b ? 0.0 : 1.0;
    }
  }

  double distance(const mbl::Pattern& x, const mbl::Pattern& y) const {
    double d = 0.0;
    for (std::size_t f = 0; f < x.values.size(); ++f) d += weights_[f] * delta(f, x.values[f], y.values[f]);
    return d;
  }

  /// Category by the documented rule: co-minimal instances vote, ties to the lowest index.
  std::string classify(const mbl::Pattern& q, std::size_t* index = nullptr, std::size_t* ties = nullptr) const {
    std::vector<double> dist;
    for (const auto& p : train_.instances()) dist.push_back(distance(q, p));
    const double best = *std::min_element(dist.begin(), dist.end());
    std::map<std::string, std::pair<std::size_t, std::size_t>> votes;  // label -> (count, first index)
    std::size_t n_ties = 0;
    for (std::size_t i = 0; i < dist.size(); ++i) {
      if (dist[i] != best) continue;
      ++n_ties;
      auto [it, fresh] = votes.try_emplace(*train_[i].category, 0, i);
      ++it->second.first;
    }
    std::string winner;
    std::size_t wc = 0, wi = std::numeric_limits<std::size_t>::max();
    for (const auto& [label, cv] : votes) {
      if (cv.first > wc || (cv.first == wc && cv.second < wi)) {
        winner = label;
        wc = cv.first;
        wi = cv.second;
      }
    }
    if (index) *index = wi;
    if (ties) *ties = n_ties;
    return winner;
  }

 private:
  static std::vector<std::string> tags(const mbl::FeatureValue& v) {
    if (v.is_symbol()) return {v.as_symbol()};
    return v.as_tag_set().tags();
  }

  std::vector<double> conditional_counts(std::size_t f, const mbl::FeatureValue& v) const {
    std::vector<double> counts(categories_.size(), 0.0);
    for (const auto& p : train_.instances()) {
      if (!(p.values[f] == v)) continue;
      const auto c = std::find(categories_.begin(), categories_.end(), *p.category) - categories_.begin();
      counts[static_cast<std::size_t>(c)] += 1.0;
    }
    return counts;
  }

  const mbl::Dataset& train_;
  std::vector<mbl::Metric> metrics_;
  std::vector<double> weights_;
  std::vector<std::string> categories_;
};

}  // namespace oracle
