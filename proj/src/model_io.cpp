#include <zlib.h>

#include <algorithm>
#include <bit>
#include <cstring>
#include <istream>
#include <iterator>
#include <ostream>

#include "mbl/classifier.hpp"

namespace mbl {

namespace {

constexpr char kMagic[4] = {'M', 'B', 'L', 'B'};

enum class ValueTag : std::uint8_t { Missing = 0, Symbol = 1, Number = 2, Tags = 3 };

class Writer {
 public:
  void bytes(const void* data, std::size_t n) {
    const auto* p = static_cast<const char*>(data);
    buf_.append(p, n);
  }
  void u8(std::uint8_t v) { bytes(&v, 1); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void str(std::string_view s) {
    u32(static_cast<std::uint32_t>(s.size()));
    bytes(s.data(), s.size());
  }
  void value(const FeatureValue& v) {
    if (v.is_missing()) {
      u8(static_cast<std::uint8_t>(ValueTag::Missing));
    } else if (v.is_symbol()) {
      u8(static_cast<std::uint8_t>(ValueTag::Symbol));
      str(v.as_symbol());
    } else if (v.is_number()) {
      u8(static_cast<std::uint8_t>(ValueTag::Number));
      f64(v.as_number());
    } else {
      u8(static_cast<std::uint8_t>(ValueTag::Tags));
      const auto& tags = v.as_tag_set().tags();
      u32(static_cast<std::uint32_t>(tags.size()));
      for (const auto& t : tags) str(t);
    }
  }
  std::string& buffer() { return buf_; }

 private:
  std::string buf_;
};

[[noreturn]] void corrupt(const std::string& what) { throw Error(ErrorCode::CorruptModel, what); }

class Reader {
 public:
  explicit Reader(std::string_view data) : data_(data) {}

  std::uint8_t u8() {
    need(1);
    return static_cast<std::uint8_t>(data_[pos_++]);
  }
  std::uint32_t u32() {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(u8()) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(u8()) << (8 * i);
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string str() {
    const auto n = u32();
    need(n);
    std::string s(data_.substr(pos_, n));
    pos_ += n;
    return s;
  }
  FeatureValue value() {
    switch (static_cast<ValueTag>(u8())) {
      case ValueTag::Missing: return FeatureValue::missing();
      case ValueTag::Symbol: return FeatureValue::symbol(str());
      case ValueTag::Number: return FeatureValue::number(f64());
      case ValueTag::Tags: {
        const auto n = u32();
        need(n);  // each tag needs at least its length prefix
        std::vector<std::string> tags;
        tags.reserve(n);
        for (std::uint32_t i = 0; i < n; ++i) tags.push_back(str());
        return FeatureValue::tags(TagSet(std::move(tags)));
      }
    }
    corrupt("unknown value tag");
  }
  /// Guards element counts before reserving memory for them.
  std::size_t count(std::size_t min_bytes_each) {
    const auto n = u32();
    need(static_cast<std::size_t>(n) * min_bytes_each);
    return n;
  }
  bool done() const { return pos_ == data_.size(); }

 private:
  void need(std::size_t n) const {
    if (data_.size() - pos_ < n) corrupt("truncated model payload");
  }

  std::string_view data_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string save_base(const InstanceBase& base) {
  Writer w;
  w.bytes(kMagic, sizeof kMagic);
  w.u32(kModelVersion);

  const auto& schema = base.schema();
  const std::size_t n = base.arity();
  w.u8(base.ig_weighting() ? 1 : 0);
  w.u32(static_cast<std::uint32_t>(base.default_k()));
  w.u32(static_cast<std::uint32_t>(n));
  for (std::size_t f = 0; f < n; ++f) {
    w.u8(static_cast<std::uint8_t>(schema[f].kind));
    w.str(schema[f].name);
    w.u8(static_cast<std::uint8_t>(base.metrics()[f]));
    w.f64(base.weights()[f]);
  }

  const auto& cats = base.categories();
  w.u32(static_cast<std::uint32_t>(cats.size()));
  for (const auto& c : cats) w.str(c);

  for (std::size_t f = 0; f < n; ++f) {
    const auto& t = base.vdm_tables()[f];
    w.u32(static_cast<std::uint32_t>(t.values.size()));
    for (std::size_t v = 0; v < t.values.size(); ++v) {
      w.value(t.values[v]);
      for (const auto c : t.counts[v]) w.u32(c);
    }
  }

  w.u64(base.size());
  for (const auto& p : base.dataset().instances()) {
    for (const auto& v : p.values) w.value(v);
    w.str(*p.category);
  }

  auto& buf = w.buffer();
  const auto crc = crc32(0L, reinterpret_cast<const Bytef*>(buf.data()), static_cast<uInt>(buf.size()));
  w.u32(static_cast<std::uint32_t>(crc));
  return std::move(buf);
}

void save_base(const InstanceBase& base, std::ostream& out) {
  const auto bytes = save_base(base);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

InstanceBase load_base(std::string_view bytes) {
  if (bytes.size() < sizeof kMagic + 8) corrupt("file too short to be a model");
  if (std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0) corrupt("bad magic bytes");
  Reader header(bytes.substr(sizeof kMagic, 4));
  const auto version = header.u32();
  if (version != kModelVersion)
    corrupt("unsupported model version " + std::to_string(version) + " (expected " +
            std::to_string(kModelVersion) + ")");

  const auto body = bytes.substr(0, bytes.size() - 4);
  Reader tail(bytes.substr(bytes.size() - 4));
  const auto stored_crc = tail.u32();
  const auto crc = static_cast<std::uint32_t>(
      crc32(0L, reinterpret_cast<const Bytef*>(body.data()), static_cast<uInt>(body.size())));
  if (crc != stored_crc) corrupt("checksum mismatch");

  Reader r(body.substr(sizeof kMagic + 4));
  try {
    const bool ig = r.u8() != 0;
    const std::size_t k = r.u32();
    const std::size_t n = r.count(11);
    std::vector<FeatureKind> kinds;
    std::vector<std::string> names;
    std::vector<Metric> metrics;
    WeightVector weights;
    for (std::size_t f = 0; f < n; ++f) {
      const auto kind = r.u8();
      if (kind > static_cast<std::uint8_t>(FeatureKind::TagSet)) corrupt("bad feature kind");
      kinds.push_back(static_cast<FeatureKind>(kind));
      names.push_back(r.str());
      const auto metric = r.u8();
      if (metric > static_cast<std::uint8_t>(Metric::TagSet)) corrupt("bad metric");
      metrics.push_back(static_cast<Metric>(metric));
      weights.gains.push_back(r.f64());
    }

    const std::size_t n_cats = r.count(4);
    std::vector<std::string> cats;
    for (std::size_t c = 0; c < n_cats; ++c) cats.push_back(r.str());

    std::vector<VdmTable> tables(n);
    for (std::size_t f = 0; f < n; ++f) {
      const std::size_t n_values = r.count(1 + 4 * n_cats);
      for (std::size_t v = 0; v < n_values; ++v) {
        tables[f].values.push_back(r.value());
        auto& row = tables[f].counts.emplace_back(n_cats);
        for (auto& c : row) c = r.u32();
      }
    }

    const auto n_instances = r.u64();
    std::vector<Pattern> instances;
    for (std::uint64_t i = 0; i < n_instances; ++i) {
      Pattern p;
      p.values.reserve(n);
      for (std::size_t f = 0; f < n; ++f) p.values.push_back(r.value());
      p.category = r.str();
      instances.push_back(std::move(p));
    }
    if (!r.done()) corrupt("trailing bytes after instances");

    auto all_unnamed = std::all_of(names.begin(), names.end(), [](const auto& s) { return s.empty(); });
    auto dataset = Dataset::build(std::move(kinds), std::move(instances),
                                  all_unnamed ? std::vector<std::string>{} : std::move(names));
    if (dataset.categories() != cats) corrupt("category list does not match instances");
    return InstanceBase::restore(std::move(dataset), ig, k, std::move(metrics), std::move(weights),
                                 std::move(tables));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::CorruptModel) throw;
    corrupt(e.what());
  }
}

InstanceBase load_base(std::istream& in) {
  const std::string bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return load_base(bytes);
}

}  // namespace mbl
