#pragma once

// Encoders that turn sequence tasks into fixed-width classification:
// sliding windows for identification and segmentation, syllable-structure
// features, and the ambiguous-category tagging pipeline.

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mbl/classifier.hpp"
#include "mbl/core.hpp"

namespace mbl {

/// Items with optional per-item gold tags and "boundary precedes this item" flags.
/// When present, tags and boundaries have one entry per item.
struct SymbolSequence {
  std::vector<std::string> items;
  std::vector<std::string> tags;
  std::vector<bool> boundaries;

  std::size_t size() const noexcept { return items.size(); }
  bool operator==(const SymbolSequence&) const = default;
};

/// Sequence file line: space-separated items, "item/annotation", "-item" for a boundary
/// before the item. A lone "-" is an ordinary item.
SymbolSequence parse_sequence_line(std::string_view line);
std::string format_sequence(const SymbolSequence& seq);
std::vector<SymbolSequence> read_sequences(std::istream& in);

struct WindowConfig {
  std::size_t left = 3;
  std::size_t right = 3;
  std::string pad = "_";

  std::size_t width() const noexcept { return left + 1 + right; }
};

/// Feature names "l<left>" .. "l1", "t", "r1" .. "r<right>".
std::vector<std::string> window_feature_names(const WindowConfig& config);

/// One unlabelled window per position; out-of-range slots hold `pad`.
std::vector<Pattern> make_windows(const std::vector<FeatureValue>& items, std::size_t left, std::size_t right,
                                  const FeatureValue& pad);

/// Category of each window is the item's tag (e.g. its phoneme). Throws PadCollision,
/// MissingAnnotation.
Dataset window_identification(const std::vector<SymbolSequence>& sequences, const WindowConfig& config);
Dataset window_identification(const SymbolSequence& sequence, const WindowConfig& config);

/// Category of each window is "yes" when a boundary precedes the target, else "no".
Dataset window_segmentation(const std::vector<SymbolSequence>& sequences, const WindowConfig& config);
Dataset window_segmentation(const SymbolSequence& sequence, const WindowConfig& config);

inline constexpr std::string_view kBoundaryYes = "yes";
inline constexpr std::string_view kBoundaryNo = "no";

/// Copies predicted yes/no labels onto a sequence as boundary flags.
SymbolSequence apply_boundaries(const SymbolSequence& seq, const std::vector<std::string>& labels);

struct Syllable {
  std::string onset;
  std::string nucleus;
  std::string coda;
  bool stressed = false;
};

struct SyllabifiedWord {
  std::vector<Syllable> syllables;
  std::string label;
};

/// Names "str1,ons1,nuc1,cod1,...,str<n>,...,cod<n>"; slot n is the final syllable.
std::vector<std::string> syllable_feature_names(std::size_t n_syllables);

/// Four features (stress "+"/"-", onset, nucleus, coda) for each of the last `n_syllables`
/// syllables, earliest slot first. Slots before the first syllable are missing; an empty
/// onset or coda is the empty symbol.
Pattern encode_syllable_word(const SyllabifiedWord& word, std::size_t n_syllables);
Dataset syllable_dataset(const std::vector<SyllabifiedWord>& words, std::size_t n_syllables);

/// Sentences whose tokens all carry a gold tag.
using TaggedCorpus = std::vector<SymbolSequence>;

struct LexiconEntry {
  TagSet ambiguous;
  std::map<std::string, std::size_t> counts;
};

class Lexicon {
 public:
  void add(const std::string& word, const std::string& tag, std::size_t count = 1);

  const LexiconEntry* find(const std::string& word) const;
  const std::map<std::string, LexiconEntry>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  /// Inventory of distinct ambiguous categories.
  std::set<TagSet> ambiguous_categories() const;
  /// Every tag seen in the lexicon.
  TagSet all_tags() const;
  std::size_t token_count() const;

 private:
  std::map<std::string, LexiconEntry> entries_;
};

/// Throws EmptyCorpus when there are no tokens, MissingAnnotation for untagged sentences.
Lexicon derive_lexicon(const TaggedCorpus& corpus);
/// "word TAB tag:count,tag:count", one word per line, sorted.
void write_lexicon(const Lexicon& lexicon, std::ostream& out);
Lexicon read_lexicon(std::istream& in);

struct RetaggedCorpus {
  std::vector<std::vector<FeatureValue>> sentences;
  std::vector<std::vector<std::string>> gold;
  std::size_t unknown_words = 0;
};

/// Replaces each word by its ambiguous category; unknown words get `fallback`.
std::vector<FeatureValue> retag(const std::vector<std::string>& words, const Lexicon& lexicon,
                                const TagSet& fallback, std::size_t& unknown_words);
RetaggedCorpus retag_corpus(const TaggedCorpus& corpus, const Lexicon& lexicon, const TagSet& fallback);

/// Windows of ambiguous categories within each sentence, category = gold tag.
Dataset build_tagging_dataset(const RetaggedCorpus& retagged, const WindowConfig& config);

struct TaggerConfig {
  WindowConfig window{1, 1, "_"};
  /// Ambiguous category for unknown words; all lexicon tags when unset.
  std::optional<TagSet> fallback;
};

/// Greedy left-to-right tagging. Known unambiguous words get their only tag directly;
/// everything else is classified from its window of ambiguous categories.
std::vector<std::string> tag(const std::vector<std::string>& words, const Lexicon& lexicon,
                             const InstanceBase& base, const TaggerConfig& config,
                             std::size_t* unknown_words = nullptr);

}  // namespace mbl
