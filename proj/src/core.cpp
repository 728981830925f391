#include "mbl/core.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

namespace mbl {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::ArityMismatch: return "ArityMismatch";
    case ErrorCode::BadNumeric: return "BadNumeric";
    case ErrorCode::BadValue: return "BadValue";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::BadSchema: return "BadSchema";
    case ErrorCode::BadMetric: return "BadMetric";
    case ErrorCode::CorruptModel: return "CorruptModel";
    case ErrorCode::PadCollision: return "PadCollision";
    case ErrorCode::MissingAnnotation: return "MissingAnnotation";
    case ErrorCode::EmptyCorpus: return "EmptyCorpus";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::TooSmall: return "TooSmall";
    case ErrorCode::BadLexicon: return "BadLexicon";
  }
  return "Error";
}

std::string_view to_string(FeatureKind kind) noexcept {
  switch (kind) {
    case FeatureKind::Symbolic: return "sym";
    case FeatureKind::Numeric: return "num";
    case FeatureKind::TagSet: return "tag";
  }
  return "sym";
}

FeatureKind parse_kind(std::string_view token) {
  if (token == "sym" || token == "symbolic") return FeatureKind::Symbolic;
  if (token == "num" || token == "numeric") return FeatureKind::Numeric;
  if (token == "tag" || token == "tagset" || token == "tag_set") return FeatureKind::TagSet;
  throw Error(ErrorCode::BadSchema, "unknown feature kind '" + std::string(token) + "'");
}

TagSet::TagSet(std::vector<std::string> tags) : tags_(std::move(tags)) {
  std::sort(tags_.begin(), tags_.end());
  tags_.erase(std::unique(tags_.begin(), tags_.end()), tags_.end());
  if (tags_.empty()) throw Error(ErrorCode::BadValue, "tag set must not be empty");
}

bool TagSet::contains(std::string_view tag) const {
  return std::binary_search(tags_.begin(), tags_.end(), tag,
                            [](const auto& a, const auto& b) { return std::string_view(a) < std::string_view(b); });
}

FeatureValue FeatureValue::number(double x) {
  if (!std::isfinite(x)) throw Error(ErrorCode::BadNumeric, "numeric values must be finite");
  return FeatureValue(x);
}

namespace {

std::string_view trim(std::string_view s) {
  constexpr std::string_view ws = " \t\r\n\v\f";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

std::string format_number(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

}  // namespace

std::string format_value(const FeatureValue& value) {
  if (value.is_missing()) return std::string(kMissingMarker);
  if (value.is_number()) return format_number(value.as_number());
  if (value.is_tag_set()) {
    std::string out;
    for (const auto& t : value.as_tag_set().tags()) {
      if (!out.empty()) out += kTagSeparator;
      out += t;
    }
    return out;
  }
  return value.as_symbol();
}

std::vector<FeatureKind> FeatureSchema::kinds() const {
  std::vector<FeatureKind> out;
  out.reserve(features_.size());
  for (const auto& f : features_) out.push_back(f.kind);
  return out;
}

std::string FeatureSchema::display_name(std::size_t f) const {
  const auto& name = features_.at(f).name;
  return name.empty() ? "f" + std::to_string(f) : name;
}

bool FeatureSchema::has_names() const {
  return std::any_of(features_.begin(), features_.end(),
                     [](const FeatureInfo& f) { return !f.name.empty(); });
}

Dataset::Dataset(FeatureSchema schema, std::vector<Pattern> instances)
    : schema_(std::move(schema)), instances_(std::move(instances)) {
  std::set<std::string> cats;
  for (const auto& p : instances_) cats.insert(*p.category);
  categories_.assign(cats.begin(), cats.end());
}

namespace {

void check_instance(const Pattern& p, const std::vector<FeatureKind>& kinds, std::size_t index) {
  if (p.arity() != kinds.size())
    throw Error(ErrorCode::ArityMismatch, "instance " + std::to_string(index) + " has " +
                                              std::to_string(p.arity()) + " features, expected " +
                                              std::to_string(kinds.size()));
  if (!p.category) throw Error(ErrorCode::BadValue, "instance " + std::to_string(index) + " has no category");
  for (std::size_t f = 0; f < kinds.size(); ++f) {
    const auto& v = p.values[f];
    if (v.is_missing()) continue;
    const bool ok = (kinds[f] == FeatureKind::Symbolic && v.is_symbol()) ||
                    (kinds[f] == FeatureKind::Numeric && v.is_number()) ||
                    (kinds[f] == FeatureKind::TagSet && v.is_tag_set());
    if (!ok)
      throw Error(ErrorCode::BadValue, "instance " + std::to_string(index) + " feature " + std::to_string(f) +
                                           " does not match column kind " + std::string(to_string(kinds[f])));
  }
}

}  // namespace

Dataset Dataset::build(std::vector<FeatureKind> kinds, std::vector<Pattern> instances,
                       std::vector<std::string> names) {
  if (!names.empty() && names.size() != kinds.size())
    throw Error(ErrorCode::BadSchema, "got " + std::to_string(names.size()) + " feature names for " +
                                          std::to_string(kinds.size()) + " features");
  for (std::size_t i = 0; i < instances.size(); ++i) check_instance(instances[i], kinds, i);

  std::vector<FeatureInfo> info(kinds.size());
  for (std::size_t f = 0; f < kinds.size(); ++f) {
    info[f].kind = kinds[f];
    if (!names.empty()) info[f].name = names[f];
    std::vector<FeatureValue> values;
    values.reserve(instances.size());
    bool seen_number = false;
    for (const auto& p : instances) {
      const auto& v = p.values[f];
      values.push_back(v);
      if (v.is_number()) {
        const double x = v.as_number();
        if (!seen_number) {
          info[f].min = info[f].max = x;
          seen_number = true;
        } else {
          info[f].min = std::min(info[f].min, x);
          info[f].max = std::max(info[f].max, x);
        }
      }
    }
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    info[f].value_set = std::move(values);
  }
  return Dataset(FeatureSchema(std::move(info)), std::move(instances));
}

Dataset Dataset::with_schema(FeatureSchema schema, std::vector<Pattern> instances) {
  const auto kinds = schema.kinds();
  for (std::size_t i = 0; i < instances.size(); ++i) check_instance(instances[i], kinds, i);
  return Dataset(std::move(schema), std::move(instances));
}

FeatureValue parse_value(std::string_view field, FeatureKind kind) {
  field = trim(field);
  if (field == kMissingMarker) return FeatureValue::missing();
  switch (kind) {
    case FeatureKind::Symbolic:
      return FeatureValue::symbol(std::string(field));
    case FeatureKind::Numeric: {
      double x = 0.0;
      const auto* first = field.data();
      const auto* last = field.data() + field.size();
      if (!field.empty() && *first == '+') ++first;
      const auto res = std::from_chars(first, last, x);
      if (field.empty() || res.ec != std::errc() || res.ptr != last || !std::isfinite(x))
        throw Error(ErrorCode::BadNumeric, "cannot parse '" + std::string(field) + "' as a finite number");
      return FeatureValue::number(x);
    }
    case FeatureKind::TagSet: {
      std::vector<std::string> tags;
      for (auto t : split(field, kTagSeparator)) {
        t = trim(t);
        if (t.empty()) throw Error(ErrorCode::BadValue, "empty tag in tag set '" + std::string(field) + "'");
        tags.emplace_back(t);
      }
      return FeatureValue::tags(TagSet(std::move(tags)));
    }
  }
  return FeatureValue::missing();
}

Pattern parse_pattern(std::string_view line, const std::vector<FeatureKind>& kinds, bool with_category) {
  const auto fields = split(trim(line), ',');
  const std::size_t expected = kinds.size() + (with_category ? 1 : 0);
  if (fields.size() != expected)
    throw Error(ErrorCode::ArityMismatch,
                "expected " + std::to_string(expected) + " fields, got " + std::to_string(fields.size()));
  Pattern p;
  p.values.reserve(kinds.size());
  for (std::size_t f = 0; f < kinds.size(); ++f) p.values.push_back(parse_value(fields[f], kinds[f]));
  if (with_category) p.category = std::string(trim(fields.back()));
  return p;
}

Dataset parse_dataset(std::istream& in, const std::optional<std::vector<FeatureKind>>& kinds) {
  std::optional<std::vector<FeatureKind>> header_kinds;
  std::vector<std::string> names;
  std::vector<FeatureKind> columns;
  bool have_columns = false;
  std::vector<Pattern> instances;

  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '#') {
      if (instances.empty() && line.starts_with("#kinds:")) {
        std::vector<FeatureKind> ks;
        const auto body = trim(line.substr(7));
        if (!body.empty())
          for (auto tok : split(body, ',')) ks.push_back(parse_kind(trim(tok)));
        header_kinds = std::move(ks);
      } else if (instances.empty() && line.starts_with("#names:")) {
        names.clear();
        const auto body = trim(line.substr(7));
        if (!body.empty())
          for (auto tok : split(body, ',')) names.emplace_back(trim(tok));
      }
      continue;
    }

    const auto fields = split(line, ',');
    if (!have_columns) {
      if (kinds) {
        columns = *kinds;
      } else if (header_kinds) {
        columns = *header_kinds;
      } else {
        columns.assign(fields.size() - 1, FeatureKind::Symbolic);
      }
      have_columns = true;
    }
    if (fields.size() != columns.size() + 1)
      throw Error(ErrorCode::ArityMismatch, "line " + std::to_string(line_no) + ": expected " +
                                                std::to_string(columns.size() + 1) + " fields, got " +
                                                std::to_string(fields.size()));
    try {
      instances.push_back(parse_pattern(line, columns, true));
    } catch (const Error& e) {
      throw Error(e.code(), "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (instances.empty()) throw Error(ErrorCode::EmptyDataset, "no instances");
  if (!names.empty() && names.size() != columns.size())
    throw Error(ErrorCode::BadSchema, "#names header has " + std::to_string(names.size()) +
                                          " entries for " + std::to_string(columns.size()) + " features");
  return Dataset::build(std::move(columns), std::move(instances), std::move(names));
}

Dataset parse_dataset(std::string_view text, const std::optional<std::vector<FeatureKind>>& kinds) {
  std::istringstream in{std::string(text)};
  return parse_dataset(in, kinds);
}

void serialize_dataset(const Dataset& dataset, std::ostream& out) {
  const auto& schema = dataset.schema();
  const auto kinds = schema.kinds();
  if (std::any_of(kinds.begin(), kinds.end(), [](FeatureKind k) { return k != FeatureKind::Symbolic; })) {
    out << "#kinds:";
    for (std::size_t f = 0; f < kinds.size(); ++f) out << (f ? "," : "") << to_string(kinds[f]);
    out << '\n';
  }
  if (schema.has_names()) {
    out << "#names:";
    for (std::size_t f = 0; f < schema.arity(); ++f) out << (f ? "," : "") << schema[f].name;
    out << '\n';
  }
  for (const auto& p : dataset.instances()) {
    for (const auto& v : p.values) out << format_value(v) << ',';
    out << *p.category << '\n';
  }
}

std::string serialize_dataset(const Dataset& dataset) {
  std::ostringstream out;
  serialize_dataset(dataset, out);
  return out.str();
}

Dataset partition(const Dataset& dataset, std::size_t f, const FeatureValue& v) {
  if (f >= dataset.arity())
    throw Error(ErrorCode::ArityMismatch, "feature index " + std::to_string(f) + " out of range");
  std::vector<Pattern> selected;
  for (const auto& p : dataset.instances())
    if (p.values[f] == v) selected.push_back(p);
  return Dataset::with_schema(dataset.schema(), std::move(selected));
}

}  // namespace mbl
