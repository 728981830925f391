#include "mbl/tasks.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>

namespace mbl {

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

}  // namespace

SymbolSequence parse_sequence_line(std::string_view line) {
  SymbolSequence seq;
  bool any_tag = false;
  for (auto token : split_ws(line)) {
    bool boundary = false;
    if (token.size() > 1 && token.front() == '-') {
      boundary = true;
      token.remove_prefix(1);
    }
    std::string tag;
    const auto slash = token.rfind('/');
    if (slash != std::string_view::npos && slash > 0 && slash + 1 < token.size()) {
      tag = std::string(token.substr(slash + 1));
      token = token.substr(0, slash);
      any_tag = true;
    }
    seq.items.emplace_back(token);
    seq.tags.push_back(std::move(tag));
    seq.boundaries.push_back(boundary);
  }
  if (any_tag) {
    for (std::size_t i = 0; i < seq.size(); ++i)
      if (seq.tags[i].empty())
        throw Error(ErrorCode::MissingAnnotation, "item '" + seq.items[i] + "' has no annotation");
  } else {
    seq.tags.clear();
  }
  return seq;
}

std::string format_sequence(const SymbolSequence& seq) {
  std::string out;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (i) out += ' ';
    if (!seq.boundaries.empty() && seq.boundaries[i]) out += '-';
    out += seq.items[i];
    if (!seq.tags.empty()) {
      out += '/';
      out += seq.tags[i];
    }
  }
  return out;
}

std::vector<SymbolSequence> read_sequences(std::istream& in) {
  std::vector<SymbolSequence> out;
  std::string line;
  while (std::getline(in, line)) {
    auto seq = parse_sequence_line(line);
    if (!seq.items.empty()) out.push_back(std::move(seq));
  }
  return out;
}

std::vector<std::string> window_feature_names(const WindowConfig& config) {
  std::vector<std::string> names;
  for (std::size_t d = config.left; d >= 1; --d) names.push_back("l" + std::to_string(d));
  names.emplace_back("t");
  for (std::size_t d = 1; d <= config.right; ++d) names.push_back("r" + std::to_string(d));
  return names;
}

std::vector<Pattern> make_windows(const std::vector<FeatureValue>& items, std::size_t left, std::size_t right,
                                  const FeatureValue& pad) {
  std::vector<Pattern> out;
  out.reserve(items.size());
  const auto len = static_cast<std::ptrdiff_t>(items.size());
  for (std::ptrdiff_t p = 0; p < len; ++p) {
    Pattern w;
    w.values.reserve(left + 1 + right);
    for (std::ptrdiff_t q = p - static_cast<std::ptrdiff_t>(left); q <= p + static_cast<std::ptrdiff_t>(right); ++q)
      w.values.push_back(q < 0 || q >= len ? pad : items[static_cast<std::size_t>(q)]);
    out.push_back(std::move(w));
  }
  return out;
}

namespace {

std::vector<FeatureValue> as_symbols(const std::vector<std::string>& items, const std::string& pad) {
  std::vector<FeatureValue> out;
  out.reserve(items.size());
  for (const auto& item : items) {
    if (item == pad) throw Error(ErrorCode::PadCollision, "pad symbol '" + pad + "' occurs in the data");
    out.push_back(FeatureValue::symbol(item));
  }
  return out;
}

template <typename LabelFn>
Dataset window_dataset(const std::vector<SymbolSequence>& sequences, const WindowConfig& config, LabelFn label) {
  std::vector<Pattern> instances;
  const auto pad = FeatureValue::symbol(config.pad);
  for (const auto& seq : sequences) {
    auto windows = make_windows(as_symbols(seq.items, config.pad), config.left, config.right, pad);
    for (std::size_t p = 0; p < windows.size(); ++p) {
      windows[p].category = label(seq, p);
      instances.push_back(std::move(windows[p]));
    }
  }
  return Dataset::build(std::vector<FeatureKind>(config.width(), FeatureKind::Symbolic), std::move(instances),
                        window_feature_names(config));
}

}  // namespace

Dataset window_identification(const std::vector<SymbolSequence>& sequences, const WindowConfig& config) {
  for (const auto& seq : sequences)
    if (seq.tags.size() != seq.items.size())
      throw Error(ErrorCode::MissingAnnotation, "identification windows need one annotation per item");
  return window_dataset(sequences, config, [](const SymbolSequence& s, std::size_t p) { return s.tags[p]; });
}

Dataset window_identification(const SymbolSequence& sequence, const WindowConfig& config) {
  return window_identification(std::vector<SymbolSequence>{sequence}, config);
}

Dataset window_segmentation(const std::vector<SymbolSequence>& sequences, const WindowConfig& config) {
  for (const auto& seq : sequences)
    if (!seq.boundaries.empty() && seq.boundaries.size() != seq.items.size())
      throw Error(ErrorCode::MissingAnnotation, "boundary flags must cover every item");
  return window_dataset(sequences, config, [](const SymbolSequence& s, std::size_t p) {
    const bool yes = !s.boundaries.empty() && s.boundaries[p];
    return std::string(yes ? kBoundaryYes : kBoundaryNo);
  });
}

Dataset window_segmentation(const SymbolSequence& sequence, const WindowConfig& config) {
  return window_segmentation(std::vector<SymbolSequence>{sequence}, config);
}

SymbolSequence apply_boundaries(const SymbolSequence& seq, const std::vector<std::string>& labels) {
  if (labels.size() != seq.size())
    throw Error(ErrorCode::LengthMismatch, "one boundary label per item is required");
  SymbolSequence out = seq;
  out.boundaries.assign(seq.size(), false);
  for (std::size_t i = 0; i < labels.size(); ++i) out.boundaries[i] = labels[i] == kBoundaryYes;
  return out;
}

std::vector<std::string> syllable_feature_names(std::size_t n_syllables) {
  std::vector<std::string> names;
  for (std::size_t s = 1; s <= n_syllables; ++s)
    for (const char* part : {"str", "ons", "nuc", "cod"}) names.push_back(part + std::to_string(s));
  return names;
}

Pattern encode_syllable_word(const SyllabifiedWord& word, std::size_t n_syllables) {
  if (word.syllables.empty()) throw Error(ErrorCode::BadValue, "word has no syllables");
  if (n_syllables == 0) throw Error(ErrorCode::BadValue, "at least one syllable slot is required");
  Pattern p;
  p.values.reserve(4 * n_syllables);
  const std::size_t have = word.syllables.size();
  for (std::size_t slot = 0; slot < n_syllables; ++slot) {
    // slot n_syllables-1 is the final syllable
    const std::size_t from_end = n_syllables - 1 - slot;
    if (from_end >= have) {
      p.values.insert(p.values.end(), 4, FeatureValue::missing());
      continue;
    }
    const auto& syl = word.syllables[have - 1 - from_end];
    if (syl.nucleus.empty()) throw Error(ErrorCode::BadValue, "syllable without a nucleus");
    p.values.push_back(FeatureValue::symbol(syl.stressed ? "+" : "-"));
    p.values.push_back(FeatureValue::symbol(syl.onset));
    p.values.push_back(FeatureValue::symbol(syl.nucleus));
    p.values.push_back(FeatureValue::symbol(syl.coda));
  }
  p.category = word.label;
  return p;
}

Dataset syllable_dataset(const std::vector<SyllabifiedWord>& words, std::size_t n_syllables) {
  std::vector<Pattern> instances;
  instances.reserve(words.size());
  for (const auto& w : words) instances.push_back(encode_syllable_word(w, n_syllables));
  return Dataset::build(std::vector<FeatureKind>(4 * n_syllables, FeatureKind::Symbolic), std::move(instances),
                        syllable_feature_names(n_syllables));
}

void Lexicon::add(const std::string& word, const std::string& tag, std::size_t count) {
  auto it = entries_.find(word);
  if (it == entries_.end()) {
    entries_.emplace(word, LexiconEntry{TagSet{tag}, {{tag, count}}});
    return;
  }
  auto& entry = it->second;
  entry.counts[tag] += count;
  if (!entry.ambiguous.contains(tag)) {
    auto tags = entry.ambiguous.tags();
    tags.push_back(tag);
    entry.ambiguous = TagSet(std::move(tags));
  }
}

const LexiconEntry* Lexicon::find(const std::string& word) const {
  const auto it = entries_.find(word);
  return it == entries_.end() ? nullptr : &it->second;
}

std::set<TagSet> Lexicon::ambiguous_categories() const {
  std::set<TagSet> out;
  for (const auto& [word, entry] : entries_) out.insert(entry.ambiguous);
  return out;
}

TagSet Lexicon::all_tags() const {
  std::vector<std::string> tags;
  for (const auto& [word, entry] : entries_)
    tags.insert(tags.end(), entry.ambiguous.tags().begin(), entry.ambiguous.tags().end());
  if (tags.empty()) throw Error(ErrorCode::BadLexicon, "lexicon is empty");
  return TagSet(std::move(tags));
}

std::size_t Lexicon::token_count() const {
  std::size_t n = 0;
  for (const auto& [word, entry] : entries_)
    for (const auto& [tag, count] : entry.counts) n += count;
  return n;
}

Lexicon derive_lexicon(const TaggedCorpus& corpus) {
  Lexicon lexicon;
  for (const auto& sentence : corpus) {
    if (sentence.tags.size() != sentence.items.size())
      throw Error(ErrorCode::MissingAnnotation, "every token in a tagged corpus needs a tag");
    for (std::size_t i = 0; i < sentence.size(); ++i) lexicon.add(sentence.items[i], sentence.tags[i]);
  }
  if (lexicon.size() == 0) throw Error(ErrorCode::EmptyCorpus, "tagged corpus has no tokens");
  return lexicon;
}

void write_lexicon(const Lexicon& lexicon, std::ostream& out) {
  for (const auto& [word, entry] : lexicon.entries()) {
    out << word << '\t';
    bool first = true;
    for (const auto& [tag, count] : entry.counts) {
      out << (first ? "" : ",") << tag << ':' << count;
      first = false;
    }
    out << '\n';
  }
}

Lexicon read_lexicon(std::istream& in) {
  Lexicon lexicon;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0)
      throw Error(ErrorCode::BadLexicon, "line " + std::to_string(line_no) + ": expected 'word<TAB>tag:count,...'");
    const std::string word = line.substr(0, tab);
    std::istringstream fields(line.substr(tab + 1));
    std::string field;
    bool any = false;
    while (std::getline(fields, field, ',')) {
      const auto colon = field.rfind(':');
      std::size_t count = 0;
      try {
        std::size_t used = 0;
        if (colon == std::string::npos || colon == 0) throw std::invalid_argument("no count");
        count = std::stoul(field.substr(colon + 1), &used);
        if (used != field.size() - colon - 1 || count == 0) throw std::invalid_argument("bad count");
      } catch (const std::exception&) {
        throw Error(ErrorCode::BadLexicon, "line " + std::to_string(line_no) + ": bad entry '" + field + "'");
      }
      lexicon.add(word, field.substr(0, colon), count);
      any = true;
    }
    if (!any) throw Error(ErrorCode::BadLexicon, "line " + std::to_string(line_no) + ": word without tags");
  }
  return lexicon;
}

std::vector<FeatureValue> retag(const std::vector<std::string>& words, const Lexicon& lexicon,
                                const TagSet& fallback, std::size_t& unknown_words) {
  std::vector<FeatureValue> out;
  out.reserve(words.size());
  for (const auto& w : words) {
    if (const auto* entry = lexicon.find(w)) {
      out.push_back(FeatureValue::tags(entry->ambiguous));
    } else {
      out.push_back(FeatureValue::tags(fallback));
      ++unknown_words;
    }
  }
  return out;
}

RetaggedCorpus retag_corpus(const TaggedCorpus& corpus, const Lexicon& lexicon, const TagSet& fallback) {
  RetaggedCorpus out;
  for (const auto& sentence : corpus) {
    if (sentence.tags.size() != sentence.items.size())
      throw Error(ErrorCode::MissingAnnotation, "every token in a tagged corpus needs a tag");
    out.sentences.push_back(retag(sentence.items, lexicon, fallback, out.unknown_words));
    out.gold.push_back(sentence.tags);
  }
  return out;
}

namespace {

void check_pad(const std::vector<FeatureValue>& sentence, const std::string& pad) {
  for (const auto& v : sentence)
    if (v.is_tag_set() && v.as_tag_set().contains(pad))
      throw Error(ErrorCode::PadCollision, "pad tag '" + pad + "' occurs in an ambiguous category");
}

}  // namespace

Dataset build_tagging_dataset(const RetaggedCorpus& retagged, const WindowConfig& config) {
  if (retagged.gold.size() != retagged.sentences.size())
    throw Error(ErrorCode::LengthMismatch, "gold tags do not match the retagged sentences");
  const auto pad = FeatureValue::tags(TagSet{config.pad});
  std::vector<Pattern> instances;
  for (std::size_t s = 0; s < retagged.sentences.size(); ++s) {
    const auto& sentence = retagged.sentences[s];
    if (retagged.gold[s].size() != sentence.size())
      throw Error(ErrorCode::LengthMismatch, "gold tags do not match sentence " + std::to_string(s));
    check_pad(sentence, config.pad);
    auto windows = make_windows(sentence, config.left, config.right, pad);
    for (std::size_t p = 0; p < windows.size(); ++p) {
      windows[p].category = retagged.gold[s][p];
      instances.push_back(std::move(windows[p]));
    }
  }
  return Dataset::build(std::vector<FeatureKind>(config.width(), FeatureKind::TagSet), std::move(instances),
                        window_feature_names(config));
}

std::vector<std::string> tag(const std::vector<std::string>& words, const Lexicon& lexicon,
                             const InstanceBase& base, const TaggerConfig& config, std::size_t* unknown_words) {
  if (base.arity() != config.window.width())
    throw Error(ErrorCode::ArityMismatch, "tagger window of width " + std::to_string(config.window.width()) +
                                              " does not match a base of arity " + std::to_string(base.arity()));
  std::vector<std::string> out;
  if (words.empty()) return out;

  const TagSet fallback = config.fallback ? *config.fallback : lexicon.all_tags();
  std::size_t unknown = 0;
  const auto categories = retag(words, lexicon, fallback, unknown);
  if (unknown_words) *unknown_words += unknown;
  check_pad(categories, config.window.pad);
  const auto windows =
      make_windows(categories, config.window.left, config.window.right, FeatureValue::tags(TagSet{config.window.pad}));

  out.reserve(words.size());
  for (std::size_t i = 0; i < words.size(); ++i) {
    const auto* entry = lexicon.find(words[i]);
    if (entry && entry->ambiguous.size() == 1) {
      out.push_back(entry->ambiguous.tags().front());
    } else {
      out.push_back(base.classify(windows[i]).category);
    }
  }
  return out;
}

}  // namespace mbl
