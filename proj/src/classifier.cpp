#include "mbl/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace mbl {

std::string_view to_string(Metric metric) noexcept {
  switch (metric) {
    case Metric::Default: return "default";
    case Metric::Overlap: return "overlap";
    case Metric::Numeric: return "numeric";
    case Metric::ValueDifference: return "vdm";
    case Metric::TagSet: return "tagset";
  }
  return "default";
}

Metric parse_metric(std::string_view token) {
  if (token == "default") return Metric::Default;
  if (token == "overlap") return Metric::Overlap;
  if (token == "numeric" || token == "num") return Metric::Numeric;
  if (token == "vdm" || token == "mvdm") return Metric::ValueDifference;
  if (token == "tagset" || token == "jaccard") return Metric::TagSet;
  throw Error(ErrorCode::BadMetric, "unknown metric '" + std::string(token) + "'");
}

double delta_numeric(double x, double y, double min, double max) noexcept {
  if (!(max > min)) return x == y ? 0.0 : 1.0;
  return std::min(1.0, std::abs(x - y) / (max - min));
}

double delta_numeric(const FeatureValue& x, const FeatureValue& y, double min, double max) {
  if (x.is_missing() || y.is_missing()) return x.is_missing() && y.is_missing() ? 0.0 : 1.0;
  if (!x.is_number() || !y.is_number()) throw Error(ErrorCode::BadValue, "numeric metric on a non-numeric value");
  return delta_numeric(x.as_number(), y.as_number(), min, max);
}

double delta_overlap(const FeatureValue& x, const FeatureValue& y) noexcept { return x == y ? 0.0 : 1.0; }

namespace {

const std::vector<std::string>& tags_of(const FeatureValue& v, std::vector<std::string>& promoted) {
  if (v.is_tag_set()) return v.as_tag_set().tags();
  if (v.is_symbol()) {
    promoted.assign(1, v.as_symbol());
    return promoted;
  }
  throw Error(ErrorCode::BadValue, "tag-set metric on a numeric value");
}

}  // namespace

double delta_tagset(const FeatureValue& x, const FeatureValue& y) {
  if (x.is_missing() || y.is_missing()) return x.is_missing() && y.is_missing() ? 0.0 : 1.0;
  std::vector<std::string> px, py;
  const auto& a = tags_of(x, px);
  const auto& b = tags_of(y, py);
  std::size_t common = 0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++common;
      ++i;
      ++j;
    }
  }
  const std::size_t total = a.size() + b.size() - common;
  return 1.0 - static_cast<double>(common) / static_cast<double>(total);
}

std::vector<Metric> resolve_metrics(const FeatureSchema& schema, const std::vector<Metric>& requested) {
  const std::size_t n = schema.arity();
  std::vector<Metric> out(n, Metric::Default);
  if (requested.size() == 1) {
    for (std::size_t f = 0; f < n; ++f)
      if (schema[f].kind != FeatureKind::Numeric) out[f] = requested.front();
  } else if (requested.size() == n) {
    out = requested;
  } else if (!requested.empty()) {
    throw Error(ErrorCode::BadMetric, "got " + std::to_string(requested.size()) + " metrics for " +
                                          std::to_string(n) + " features");
  }
  for (std::size_t f = 0; f < n; ++f) {
    const auto kind = schema[f].kind;
    if (out[f] == Metric::Default) {
      out[f] = kind == FeatureKind::Numeric  ? Metric::Numeric
               : kind == FeatureKind::TagSet ? Metric::TagSet
                                             : Metric::Overlap;
    }
    if (out[f] == Metric::Numeric && kind != FeatureKind::Numeric)
      throw Error(ErrorCode::BadMetric, "numeric metric on non-numeric feature " + std::to_string(f));
    if (out[f] == Metric::TagSet && kind == FeatureKind::Numeric)
      throw Error(ErrorCode::BadMetric, "tag-set metric on numeric feature " + std::to_string(f));
  }
  return out;
}

namespace {

std::vector<VdmTable> build_vdm_tables(const Dataset& dataset, const std::vector<Metric>& metrics) {
  std::vector<VdmTable> tables(dataset.arity());
  const auto& cats = dataset.categories();
  for (std::size_t f = 0; f < dataset.arity(); ++f) {
    if (metrics[f] != Metric::ValueDifference) continue;
    auto& t = tables[f];
    t.values = dataset.schema()[f].value_set;
    t.counts.assign(t.values.size(), std::vector<std::uint32_t>(cats.size(), 0));
    for (const auto& p : dataset.instances()) {
      const auto v = std::lower_bound(t.values.begin(), t.values.end(), p.values[f]) - t.values.begin();
      const auto c = std::lower_bound(cats.begin(), cats.end(), *p.category) - cats.begin();
      ++t.counts[static_cast<std::size_t>(v)][static_cast<std::size_t>(c)];
    }
  }
  return tables;
}

}  // namespace

InstanceBase::InstanceBase(Dataset dataset, bool ig_weighting, std::size_t k, std::vector<Metric> metrics,
                           WeightVector weights, std::vector<VdmTable> vdm_tables)
    : dataset_(std::move(dataset)),
      ig_weighting_(ig_weighting),
      k_(k),
      metrics_(std::move(metrics)),
      weights_(std::move(weights)),
      vdm_(std::move(vdm_tables)) {
  encode();
}

InstanceBase InstanceBase::train(Dataset dataset, const TrainConfig& config) {
  if (dataset.empty()) throw Error(ErrorCode::EmptyDataset, "cannot train on an empty dataset");
  if (config.k == 0) throw Error(ErrorCode::BadValue, "k must be positive");
  auto metrics = resolve_metrics(dataset.schema(), config.metrics);
  WeightVector weights = config.ig_weighting ? ig_weights(dataset)
                                             : WeightVector{std::vector<double>(dataset.arity(), 1.0)};
  auto vdm = build_vdm_tables(dataset, metrics);
  return InstanceBase(std::move(dataset), config.ig_weighting, config.k, std::move(metrics), std::move(weights),
                      std::move(vdm));
}

InstanceBase InstanceBase::restore(Dataset dataset, bool ig_weighting, std::size_t k, std::vector<Metric> metrics,
                                   WeightVector weights, std::vector<VdmTable> vdm_tables) {
  const std::size_t n = dataset.arity();
  if (dataset.empty()) throw Error(ErrorCode::EmptyDataset, "cannot restore an empty instance base");
  if (metrics.size() != n || weights.size() != n || vdm_tables.size() != n)
    throw Error(ErrorCode::BadSchema, "restored parts do not match the feature count");
  if (k == 0) throw Error(ErrorCode::BadValue, "k must be positive");
  if (resolve_metrics(dataset.schema(), metrics) != metrics)
    throw Error(ErrorCode::BadMetric, "stored metrics are not resolved");
  for (std::size_t f = 0; f < n; ++f) {
    const bool uses_vdm = metrics[f] == Metric::ValueDifference;
    const auto& t = vdm_tables[f];
    if (uses_vdm && (t.values != dataset.schema()[f].value_set || t.counts.size() != t.values.size()))
      throw Error(ErrorCode::BadSchema, "value-difference table for feature " + std::to_string(f) +
                                            " does not cover the training values");
    if (!uses_vdm && !t.values.empty())
      throw Error(ErrorCode::BadSchema, "unexpected value-difference table for feature " + std::to_string(f));
    for (const auto& row : t.counts)
      if (row.size() != dataset.categories().size())
        throw Error(ErrorCode::BadSchema, "value-difference row width does not match the categories");
  }
  return InstanceBase(std::move(dataset), ig_weighting, k, std::move(metrics), std::move(weights),
                      std::move(vdm_tables));
}

InstanceBase InstanceBase::with_weights(WeightVector weights) const {
  if (weights.size() != arity()) throw Error(ErrorCode::ArityMismatch, "weight vector length differs from arity");
  InstanceBase copy = *this;
  copy.weights_ = std::move(weights);
  return copy;
}

void InstanceBase::encode() {
  const std::size_t n = arity();
  const std::size_t count = size();
  codes_.assign(count * n, 0);
  numbers_.assign(count * n, std::numeric_limits<double>::quiet_NaN());
  category_ids_.resize(count);
  const auto& cats = categories();
  for (std::size_t i = 0; i < count; ++i) {
    const auto& p = dataset_[i];
    for (std::size_t f = 0; f < n; ++f) {
      codes_[i * n + f] = code_of(f, p.values[f]);
      if (p.values[f].is_number()) numbers_[i * n + f] = p.values[f].as_number();
    }
    category_ids_[i] = static_cast<std::uint32_t>(std::lower_bound(cats.begin(), cats.end(), *p.category) - cats.begin());
  }
}

std::uint32_t InstanceBase::code_of(std::size_t f, const FeatureValue& v) const {
  const auto& values = schema()[f].value_set;
  const auto it = std::lower_bound(values.begin(), values.end(), v);
  if (it == values.end() || *it != v) return kUnseenCode;
  return static_cast<std::uint32_t>(it - values.begin());
}

double InstanceBase::delta_vdm(std::size_t f, const FeatureValue& a, const FeatureValue& b) const {
  if (a.is_missing() || b.is_missing()) return a.is_missing() && b.is_missing() ? 0.0 : 1.0;
  if (a == b) return 0.0;
  const auto& t = vdm_.at(f);
  const auto ia = std::lower_bound(t.values.begin(), t.values.end(), a);
  const auto ib = std::lower_bound(t.values.begin(), t.values.end(), b);
  if (ia == t.values.end() || *ia != a || ib == t.values.end() || *ib != b) return delta_overlap(a, b);
  const auto& ca = t.counts[static_cast<std::size_t>(ia - t.values.begin())];
  const auto& cb = t.counts[static_cast<std::size_t>(ib - t.values.begin())];
  double na = 0.0, nb = 0.0;
  for (const auto c : ca) na += c;
  for (const auto c : cb) nb += c;
  double sum = 0.0;
  for (std::size_t c = 0; c < ca.size(); ++c) sum += std::abs(ca[c] / na - cb[c] / nb);
  return sum;
}

double InstanceBase::delta(std::size_t f, const FeatureValue& a, const FeatureValue& b) const {
  if (a.is_missing() || b.is_missing()) return a.is_missing() && b.is_missing() ? 0.0 : 1.0;
  switch (metrics_.at(f)) {
    case Metric::Numeric: return delta_numeric(a, b, schema()[f].min, schema()[f].max);
    case Metric::ValueDifference: return delta_vdm(f, a, b);
    case Metric::TagSet: return delta_tagset(a, b);
    case Metric::Overlap:
    case Metric::Default: break;
  }
  return delta_overlap(a, b);
}

double InstanceBase::distance(const Pattern& x, const Pattern& y) const {
  if (x.arity() != arity() || y.arity() != arity())
    throw Error(ErrorCode::ArityMismatch, "pattern arity differs from the instance base");
  double d = 0.0;
  for (std::size_t f = 0; f < arity(); ++f) d += weights_.gains[f] * delta(f, x.values[f], y.values[f]);
  return d;
}

namespace {

// Per-thread buffers reused across queries so the scan itself does not allocate.
struct Workspace {
  std::vector<double> table;
  std::vector<std::size_t> offset;
  std::vector<double> query_numbers;
  std::vector<std::uint32_t> votes;
  std::vector<std::size_t> first;
  std::vector<std::uint32_t> touched;
  std::vector<std::pair<double, std::size_t>> nearest;
};

Workspace& workspace() {
  thread_local Workspace ws;
  return ws;
}

}  // namespace

Classification InstanceBase::classify(const Pattern& query, std::size_t k) const {
  const std::size_t n = arity();
  if (query.arity() != n)
    throw Error(ErrorCode::ArityMismatch, "query has " + std::to_string(query.arity()) + " features, expected " +
                                              std::to_string(n));
  if (k == 0) throw Error(ErrorCode::BadValue, "k must be positive");
  k = std::min(k, size());

  auto& ws = workspace();
  Classification result;

  // Weighted delta of the query value against every training value, per discrete feature.
  ws.offset.resize(n);
  ws.query_numbers.assign(n, std::numeric_limits<double>::quiet_NaN());
  std::size_t table_size = 0;
  for (std::size_t f = 0; f < n; ++f) {
    ws.offset[f] = table_size;
    if (!is_scalar_numeric(f)) table_size += schema()[f].value_set.size();
  }
  ws.table.resize(table_size);
  for (std::size_t f = 0; f < n; ++f) {
    const auto& q = query.values[f];
    const double w = weights_.gains[f];
    if (is_scalar_numeric(f)) {
      if (q.is_number()) {
        ws.query_numbers[f] = q.as_number();
      } else if (!q.is_missing()) {
        throw Error(ErrorCode::BadValue, "non-numeric query value for numeric feature " + std::to_string(f));
      }
      continue;
    }
    const auto& values = schema()[f].value_set;
    if (!q.is_missing() && code_of(f, q) == kUnseenCode) ++result.unknown_values;
    double* row = ws.table.data() + ws.offset[f];
    for (std::size_t c = 0; c < values.size(); ++c) row[c] = w * delta(f, q, values[c]);
  }

  const double* table = ws.table.data();
  const std::size_t* offset = ws.offset.data();
  const double* qnum = ws.query_numbers.data();
  const auto scan_distance = [&](std::size_t i, double bound) {
    const std::uint32_t* codes = codes_.data() + i * n;
    const double* nums = numbers_.data() + i * n;
    double d = 0.0;
    for (std::size_t f = 0; f < n; ++f) {
      if (is_scalar_numeric(f)) {
        const double x = qnum[f], y = nums[f];
        const bool mx = std::isnan(x), my = std::isnan(y);
        const double delta = (mx || my) ? ((mx && my) ? 0.0 : 1.0)
                                        : delta_numeric(x, y, schema()[f].min, schema()[f].max);
        d += weights_.gains[f] * delta;
      } else {
        d += table[offset[f] + codes[f]];
      }
      // Terms are nonnegative, so a partial sum above the bound cannot come back.
      if (d > bound) return d;
    }
    return d;
  };

  const std::size_t n_cats = categories().size();
  ws.votes.assign(n_cats, 0);
  ws.first.assign(n_cats, 0);
  ws.touched.clear();
  const auto vote = [&](std::size_t i) {
    const auto c = category_ids_[i];
    if (ws.votes[c] == 0) {
      ws.touched.push_back(c);
      ws.first[c] = i;
    } else {
      ws.first[c] = std::min(ws.first[c], i);
    }
    ++ws.votes[c];
  };

  double best = std::numeric_limits<double>::infinity();
  std::size_t ties = 0;
  if (k == 1) {
    for (std::size_t i = 0; i < size(); ++i) {
      const double d = scan_distance(i, best);
      if (d < best) {
        best = d;
        for (const auto c : ws.touched) ws.votes[c] = 0;
        ws.touched.clear();
        ties = 0;
      }
      if (d == best) {
        vote(i);
        ++ties;
      }
    }
  } else {
    ws.nearest.clear();
    for (std::size_t i = 0; i < size(); ++i) {
      const double bound = ws.nearest.size() < k ? std::numeric_limits<double>::infinity() : ws.nearest.back().first;
      const double d = scan_distance(i, std::max(bound, best));
      if (d < best) {
        best = d;
        ties = 0;
      }
      if (d == best) ++ties;
      if (ws.nearest.size() < k || d < ws.nearest.back().first) {
        const std::pair<double, std::size_t> entry{d, i};
        if (ws.nearest.size() == k) ws.nearest.pop_back();
        ws.nearest.insert(std::upper_bound(ws.nearest.begin(), ws.nearest.end(), entry), entry);
      }
    }
    for (const auto& [d, i] : ws.nearest) vote(i);
  }

  std::uint32_t winner = ws.touched.front();
  for (const auto c : ws.touched) {
    if (ws.votes[c] > ws.votes[winner] || (ws.votes[c] == ws.votes[winner] && ws.first[c] < ws.first[winner]))
      winner = c;
  }
  result.category = categories()[winner];
  result.tie_count = ties;
  if (k == 1) {
    result.neighbour_index = ws.first[winner];
    result.distance = best;
  } else {
    for (const auto& [d, i] : ws.nearest) {
      if (category_ids_[i] == winner) {
        result.neighbour_index = i;
        result.distance = d;
        break;
      }
    }
  }
  return result;
}

}  // namespace mbl
