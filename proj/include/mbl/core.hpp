#pragma once

// Instances, feature schemas and the plain-text instance file format.

#include <compare>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "mbl/error.hpp"

namespace mbl {

enum class FeatureKind { Symbolic, Numeric, TagSet };

std::string_view to_string(FeatureKind kind) noexcept;
/// Accepts "sym", "num", "tag" (and the long forms "symbolic", "numeric", "tagset").
FeatureKind parse_kind(std::string_view token);

/// Reserved field text for an absent value.
inline constexpr std::string_view kMissingMarker = "=";
/// Separator between tags inside a tag-set field.
inline constexpr char kTagSeparator = '|';

struct Missing {
  auto operator<=>(const Missing&) const = default;
};

/// Nonempty, duplicate-free, sorted set of tags.
class TagSet {
 public:
  explicit TagSet(std::vector<std::string> tags);
  TagSet(std::initializer_list<std::string> tags) : TagSet(std::vector<std::string>(tags)) {}

  const std::vector<std::string>& tags() const noexcept { return tags_; }
  std::size_t size() const noexcept { return tags_.size(); }
  bool contains(std::string_view tag) const;

  auto operator<=>(const TagSet&) const = default;

 private:
  std::vector<std::string> tags_;
};

/// One feature value: a symbol, a finite number, a tag set, or missing.
class FeatureValue {
 public:
  FeatureValue() : value_(Missing{}) {}

  static FeatureValue symbol(std::string s) { return FeatureValue(std::move(s)); }
  static FeatureValue number(double x);
  static FeatureValue tags(TagSet set) { return FeatureValue(std::move(set)); }
  static FeatureValue missing() { return FeatureValue(); }

  bool is_symbol() const noexcept { return std::holds_alternative<std::string>(value_); }
  bool is_number() const noexcept { return std::holds_alternative<double>(value_); }
  bool is_tag_set() const noexcept { return std::holds_alternative<TagSet>(value_); }
  bool is_missing() const noexcept { return std::holds_alternative<Missing>(value_); }

  const std::string& as_symbol() const { return std::get<std::string>(value_); }
  double as_number() const { return std::get<double>(value_); }
  const TagSet& as_tag_set() const { return std::get<TagSet>(value_); }

  auto operator<=>(const FeatureValue&) const = default;

 private:
  explicit FeatureValue(std::string s) : value_(std::move(s)) {}
  explicit FeatureValue(double x) : value_(x) {}
  explicit FeatureValue(TagSet t) : value_(std::move(t)) {}

  std::variant<Missing, std::string, double, TagSet> value_;
};

/// Field text for a value, as written in instance files.
std::string format_value(const FeatureValue& value);

struct Pattern {
  std::vector<FeatureValue> values;
  std::optional<std::string> category;

  std::size_t arity() const noexcept { return values.size(); }
  bool operator==(const Pattern&) const = default;
};

struct FeatureInfo {
  FeatureKind kind = FeatureKind::Symbolic;
  std::string name;
  /// Distinct observed values, sorted; includes Missing when it occurs.
  std::vector<FeatureValue> value_set;
  /// Observed numeric bounds (numeric features with at least one number).
  double min = 0.0;
  double max = 0.0;

  bool operator==(const FeatureInfo&) const = default;
};

class FeatureSchema {
 public:
  FeatureSchema() = default;
  explicit FeatureSchema(std::vector<FeatureInfo> features) : features_(std::move(features)) {}

  std::size_t arity() const noexcept { return features_.size(); }
  const FeatureInfo& operator[](std::size_t f) const { return features_.at(f); }
  const std::vector<FeatureInfo>& features() const noexcept { return features_; }
  std::vector<FeatureKind> kinds() const;
  /// Display name of feature f, "f<i>" when unnamed.
  std::string display_name(std::size_t f) const;
  bool has_names() const;

  bool operator==(const FeatureSchema&) const = default;

 private:
  std::vector<FeatureInfo> features_;
};

/// Ordered labelled instances over one schema. Immutable once built.
class Dataset {
 public:
  /// Builds the schema (value sets, numeric bounds) from the instances and validates kinds.
  /// `names` may be empty or have one entry per feature.
  static Dataset build(std::vector<FeatureKind> kinds, std::vector<Pattern> instances,
                       std::vector<std::string> names = {});

  /// Keeps an existing schema; used for sub-datasets.
  static Dataset with_schema(FeatureSchema schema, std::vector<Pattern> instances);

  const FeatureSchema& schema() const noexcept { return schema_; }
  const std::vector<Pattern>& instances() const noexcept { return instances_; }
  const Pattern& operator[](std::size_t i) const { return instances_.at(i); }
  std::size_t size() const noexcept { return instances_.size(); }
  bool empty() const noexcept { return instances_.empty(); }
  std::size_t arity() const noexcept { return schema_.arity(); }
  /// Distinct labels, sorted.
  const std::vector<std::string>& categories() const noexcept { return categories_; }

  bool operator==(const Dataset&) const = default;

 private:
  Dataset(FeatureSchema schema, std::vector<Pattern> instances);

  FeatureSchema schema_;
  std::vector<Pattern> instances_;
  std::vector<std::string> categories_;
};

/// Parses one field according to its column kind.
FeatureValue parse_value(std::string_view field, FeatureKind kind);

/// Parses comma-separated instance text, category last. `kinds` overrides a "#kinds:" header;
/// without either, every column is symbolic. Throws Error (ArityMismatch, BadNumeric, BadValue,
/// BadSchema, EmptyDataset).
Dataset parse_dataset(std::istream& in, const std::optional<std::vector<FeatureKind>>& kinds = {});
Dataset parse_dataset(std::string_view text,
                      const std::optional<std::vector<FeatureKind>>& kinds = {});

/// Splits a pattern line (no category) into values of the given kinds.
Pattern parse_pattern(std::string_view line, const std::vector<FeatureKind>& kinds,
                      bool with_category);

void serialize_dataset(const Dataset& dataset, std::ostream& out);
std::string serialize_dataset(const Dataset& dataset);

/// D[f=v], in the parent's order and with the parent's schema.
Dataset partition(const Dataset& dataset, std::size_t f, const FeatureValue& v);

}  // namespace mbl
