#pragma once

// Lazy learning core: an instance base, per-feature distance metrics and
// nearest-neighbour classification by exhaustive scan.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "mbl/core.hpp"
#include "mbl/weighting.hpp"

namespace mbl {

enum class Metric : std::uint8_t {
  Default,          ///< resolved per kind: numeric -> Numeric, tag set -> TagSet, symbolic -> Overlap
  Overlap,          ///< 0 on equality, else 1
  Numeric,          ///< |x - y| / (max - min), clamped to 1
  ValueDifference,  ///< sum over categories of |P(c|v1) - P(c|v2)|
  TagSet,           ///< 1 - |x & y| / |x | y|
};

std::string_view to_string(Metric metric) noexcept;
Metric parse_metric(std::string_view token);

struct TrainConfig {
  bool ig_weighting = true;
  /// Empty: every feature uses Metric::Default. One entry: applied to every non-numeric
  /// feature. Otherwise one entry per feature.
  std::vector<Metric> metrics;
  /// Default neighbour count stored with the base.
  std::size_t k = 1;
};

struct Classification {
  std::string category;
  double distance = 0.0;
  std::size_t neighbour_index = 0;
  /// Stored instances at the minimal distance.
  std::size_t tie_count = 1;
  /// Query values unseen in training for discrete-metric features.
  std::size_t unknown_values = 0;
};

/// Value -> per-category counts for one feature, categories in the base's sorted order.
struct VdmTable {
  std::vector<FeatureValue> values;
  std::vector<std::vector<std::uint32_t>> counts;

  bool operator==(const VdmTable&) const = default;
};

// Unweighted per-feature deltas. Missing matches only missing.
double delta_numeric(double x, double y, double min, double max) noexcept;
double delta_numeric(const FeatureValue& x, const FeatureValue& y, double min, double max);
double delta_overlap(const FeatureValue& x, const FeatureValue& y) noexcept;
/// Jaccard dissimilarity; a plain symbol is promoted to a singleton set.
double delta_tagset(const FeatureValue& x, const FeatureValue& y);

/// Stored training instances plus everything needed to compute distances.
/// Immutable after training; classify() may run concurrently from many threads.
class InstanceBase {
 public:
  static InstanceBase train(Dataset dataset, const TrainConfig& config = {});

  /// Rebuilds a base from stored parts (used when loading a model).
  static InstanceBase restore(Dataset dataset, bool ig_weighting, std::size_t k, std::vector<Metric> metrics,
                              WeightVector weights, std::vector<VdmTable> vdm_tables);

  const Dataset& dataset() const noexcept { return dataset_; }
  const FeatureSchema& schema() const noexcept { return dataset_.schema(); }
  const std::vector<std::string>& categories() const noexcept { return dataset_.categories(); }
  std::size_t size() const noexcept { return dataset_.size(); }
  std::size_t arity() const noexcept { return dataset_.arity(); }

  /// Weights applied in the distance: information gain, or all ones when weighting is off.
  const WeightVector& weights() const noexcept { return weights_; }
  bool ig_weighting() const noexcept { return ig_weighting_; }
  std::size_t default_k() const noexcept { return k_; }
  const std::vector<Metric>& metrics() const noexcept { return metrics_; }
  /// One table per feature; empty for features not using the value-difference metric.
  const std::vector<VdmTable>& vdm_tables() const noexcept { return vdm_; }

  /// Copy of this base with different feature weights.
  InstanceBase with_weights(WeightVector weights) const;

  /// Unweighted delta of feature f under its configured metric.
  double delta(std::size_t f, const FeatureValue& a, const FeatureValue& b) const;
  double delta_vdm(std::size_t f, const FeatureValue& a, const FeatureValue& b) const;
  double distance(const Pattern& x, const Pattern& y) const;

  /// Nearest-neighbour classification. For k = 1 the co-minimal instances vote; ties go to the
  /// most frequent category among them, then the lowest stored index. For k > 1 the k nearest
  /// instances by (distance, index) vote with the same tie rules.
  Classification classify(const Pattern& query, std::size_t k) const;
  Classification classify(const Pattern& query) const { return classify(query, k_); }

 private:
  InstanceBase(Dataset dataset, bool ig_weighting, std::size_t k, std::vector<Metric> metrics,
               WeightVector weights, std::vector<VdmTable> vdm_tables);

  void encode();
  bool is_scalar_numeric(std::size_t f) const { return metrics_[f] == Metric::Numeric; }
  std::uint32_t code_of(std::size_t f, const FeatureValue& v) const;

  Dataset dataset_;
  bool ig_weighting_ = true;
  std::size_t k_ = 1;
  std::vector<Metric> metrics_;
  WeightVector weights_;
  std::vector<VdmTable> vdm_;

  // Row-major N x n encodings of the stored instances.
  std::vector<std::uint32_t> codes_;
  std::vector<double> numbers_;
  std::vector<std::uint32_t> category_ids_;
};

inline constexpr std::uint32_t kUnseenCode = std::numeric_limits<std::uint32_t>::max();

/// Resolves Metric::Default and broadcasts a single metric; throws BadMetric on
/// kind/metric mismatches.
std::vector<Metric> resolve_metrics(const FeatureSchema& schema, const std::vector<Metric>& requested);

inline InstanceBase train(Dataset dataset, const TrainConfig& config = {}) {
  return InstanceBase::train(std::move(dataset), config);
}
inline Classification classify(const InstanceBase& base, const Pattern& x, std::size_t k = 1) {
  return base.classify(x, k);
}
inline double distance(const Pattern& x, const Pattern& y, const InstanceBase& base) {
  return base.distance(x, y);
}
inline double delta_vdm(std::size_t f, const FeatureValue& a, const FeatureValue& b, const InstanceBase& base) {
  return base.delta_vdm(f, a, b);
}

// Binary model container: "MBLB", format version, schema, weights, metric configuration,
// VDM tables, categories, instances, trailing CRC-32.
inline constexpr std::uint32_t kModelVersion = 1;

std::string save_base(const InstanceBase& base);
void save_base(const InstanceBase& base, std::ostream& out);
/// Throws Error(CorruptModel) on bad magic, version, checksum or truncation.
InstanceBase load_base(std::string_view bytes);
InstanceBase load_base(std::istream& in);

}  // namespace mbl
