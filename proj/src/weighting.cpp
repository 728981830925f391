#include "mbl/weighting.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <numeric>
#include <ostream>

namespace mbl {

namespace {

void require_nonempty(const Dataset& dataset) {
  if (dataset.empty()) throw Error(ErrorCode::EmptyDataset, "entropy of an empty dataset");
}

std::size_t category_id(const Dataset& dataset, const std::string& label) {
  const auto& cats = dataset.categories();
  return static_cast<std::size_t>(std::lower_bound(cats.begin(), cats.end(), label) - cats.begin());
}

// Category counts indexed by the dataset's sorted category list, so every cell's counts
// are accumulated in the same order as the whole database's.
std::vector<std::size_t> category_counts(const Dataset& dataset) {
  std::vector<std::size_t> counts(dataset.categories().size(), 0);
  for (const auto& p : dataset.instances()) ++counts[category_id(dataset, *p.category)];
  return counts;
}

}  // namespace

WeightVector WeightVector::normalized() const {
  const double total = std::accumulate(gains.begin(), gains.end(), 0.0);
  if (total <= 0.0) return *this;
  WeightVector out = *this;
  for (auto& g : out.gains) g /= total;
  return out;
}

double entropy_from_counts(std::span<const std::size_t> counts) {
  const double total = static_cast<double>(std::accumulate(counts.begin(), counts.end(), std::size_t{0}));
  if (total == 0.0) return 0.0;
  double h = 0.0;
  for (const auto c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / total;
    h -= p * std::log2(p);
  }
  return h;
}

double database_entropy(const Dataset& dataset) {
  require_nonempty(dataset);
  const auto counts = category_counts(dataset);
  return entropy_from_counts(counts);
}

double feature_average_entropy(const Dataset& dataset, std::size_t f) {
  require_nonempty(dataset);
  if (f >= dataset.arity())
    throw Error(ErrorCode::ArityMismatch, "feature index " + std::to_string(f) + " out of range");
  const std::size_t n_cats = dataset.categories().size();
  std::map<FeatureValue, std::vector<std::size_t>> cells;
  for (const auto& p : dataset.instances()) {
    auto [it, inserted] = cells.try_emplace(p.values[f]);
    if (inserted) it->second.assign(n_cats, 0);
    ++it->second[category_id(dataset, *p.category)];
  }
  const double total = static_cast<double>(dataset.size());
  double h = 0.0;
  for (const auto& [value, counts] : cells) {
    const double size = static_cast<double>(std::accumulate(counts.begin(), counts.end(), std::size_t{0}));
    h += entropy_from_counts(counts) * (size / total);
  }
  return h;
}

double information_gain(const Dataset& dataset, std::size_t f) {
  const double g = database_entropy(dataset) - feature_average_entropy(dataset, f);
  return (g < 0.0 && g > -1e-12) ? 0.0 : g;
}

WeightVector ig_weights(const Dataset& dataset) {
  require_nonempty(dataset);
  WeightVector w;
  w.gains.reserve(dataset.arity());
  for (std::size_t f = 0; f < dataset.arity(); ++f) w.gains.push_back(information_gain(dataset, f));
  return w;
}

GainProfile gain_profile(const Dataset& dataset) {
  GainProfile profile;
  profile.database_entropy = database_entropy(dataset);
  const auto w = ig_weights(dataset);
  for (std::size_t f = 0; f < dataset.arity(); ++f)
    profile.rows.emplace_back(dataset.schema().display_name(f), w[f]);
  return profile;
}

void render_gain_profile(const GainProfile& profile, std::ostream& out, bool normalize, std::size_t bar_width) {
  std::vector<double> values;
  for (const auto& row : profile.rows) values.push_back(row.second);
  if (normalize) {
    const double total = std::accumulate(values.begin(), values.end(), 0.0);
    if (total > 0.0)
      for (auto& v : values) v /= total;
  }
  const double top = values.empty() ? 0.0 : *std::max_element(values.begin(), values.end());
  std::size_t name_width = 4;
  for (const auto& row : profile.rows) name_width = std::max(name_width, row.first.size());

  out << "database entropy: " << std::fixed << std::setprecision(4) << profile.database_entropy << " bits\n";
  for (std::size_t i = 0; i < values.size(); ++i) {
    const auto len = top > 0.0 ? static_cast<std::size_t>(std::lround(values[i] / top * bar_width)) : 0;
    out << std::left << std::setw(static_cast<int>(name_width)) << profile.rows[i].first << " |"
        << std::setw(static_cast<int>(bar_width)) << std::string(len, '#') << "| " << std::right
        << std::fixed << std::setprecision(4) << values[i] << '\n';
  }
  out << std::defaultfloat;
}

}  // namespace mbl
