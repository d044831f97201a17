#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "empath_eval/classifiers.hpp"

namespace empath_eval {

enum class Speaker { kUser, kBot, kHumanResponder };

std::string_view to_string(Speaker speaker);

struct Utterance {
  std::string text;
  Speaker speaker = Speaker::kUser;
  /// Source emotion label, trimmed and lower-cased ("Surprise " -> "surprise").
  std::optional<std::string> raw_label;
  std::string source;
};

struct Turn {
  Utterance user;
  std::optional<Utterance> response;
};

struct Conversation {
  std::string id;
  std::vector<Turn> turns;
};

using Corpus = std::vector<Conversation>;

/// One dataset's conversations, tagged with the dataset identifier.
struct SourceCollection {
  std::string name;
  Corpus conversations;
};

/// Trims surrounding whitespace and lower-cases ASCII letters.
std::string normalize_label(std::string_view label);

/// Reads conversation JSONL, one conversation per line. Blank lines are
/// skipped. `source_name` is used in error messages only; utterances keep the
/// record's own "source" field. Throws DataError naming source, line and field.
Corpus read_conversations(std::istream& in, const std::string& source_name);
Corpus read_conversations_file(const std::string& path);

/// Writes one JSON object per conversation. Output is byte-stable for a given
/// corpus.
void write_conversations(std::ostream& out, const Corpus& corpus);

/// Concatenates sources in argument order. Every utterance is re-tagged with
/// its collection name. An id that occurs in more than one source becomes
/// "<source>/<id>" in each of them; ids repeated inside one source are an error.
Corpus merge_corpora(const std::vector<SourceCollection>& sources);

/// Checks structural invariants (unique ids, non-empty turns and texts,
/// speaker roles). Throws DataError on the first violation.
void validate_corpus(const Corpus& corpus);

/// Every distinct raw label in the corpus.
std::set<std::string> label_inventory(const Corpus& corpus);

// ---------------------------------------------------------------------------
// Label polarity resolution

enum class LabelPolarity { kPositive, kNegative, kPerUtterance };

std::string_view to_string(LabelPolarity polarity);

struct LabelPolarityEntry {
  LabelPolarity polarity = LabelPolarity::kPerUtterance;
  std::size_t positive_count = 0;
  std::size_t negative_count = 0;
};

struct LabelPolarityMap {
  static constexpr double kDefaultThreshold = 0.70;

  double threshold = kDefaultThreshold;
  std::map<std::string, LabelPolarityEntry> entries;

  /// Throws std::out_of_range for a label with no entry.
  const LabelPolarityEntry& at(std::string_view label) const;
};

/// Decision rule for one label given oracle counts. p = positive / total;
/// POSITIVE iff p > threshold, NEGATIVE iff (1 - p) > threshold.
/// Throws DataError when total is zero.
LabelPolarity decide_label_polarity(std::size_t positive, std::size_t negative, double threshold);

/// Runs the polarity oracle over every labelled utterance and applies
/// decide_label_polarity per label. When `labels` is given, exactly those
/// labels are resolved and each must have at least one utterance.
/// Threshold must lie in (0.5, 1.0].
LabelPolarityMap resolve_label_polarity(const Corpus& corpus, const ClassifierBackend& oracle,
                                        double threshold = LabelPolarityMap::kDefaultThreshold,
                                        const std::optional<std::set<std::string>>& labels = std::nullopt);

std::string label_polarity_map_to_json(const LabelPolarityMap& map);
LabelPolarityMap label_polarity_map_from_json(std::string_view json_text);

/// Labels treated as "no emotion" when deriving classifier training data.
const std::set<std::string>& default_neutral_labels();

/// User utterances with a raw label, labelled "neutral" / "non_neutral".
std::vector<LabeledExample> neutrality_examples(const Corpus& corpus,
                                                const std::set<std::string>& neutral_labels = default_neutral_labels());

/// Non-neutral labelled user utterances mapped to "positive" / "negative".
/// Labels resolved PER_UTTERANCE are decided by `oracle` one utterance at a time.
std::vector<LabeledExample> polarity_examples(const Corpus& corpus, const LabelPolarityMap& map,
                                              const ClassifierBackend& oracle,
                                              const std::set<std::string>& neutral_labels = default_neutral_labels());

// ---------------------------------------------------------------------------
// Splits

struct SplitRatios {
  double train = 0.8;
  double validation = 0.1;
  double test = 0.1;
};

struct SplitResult {
  Corpus train;
  Corpus validation;
  Corpus test;
  std::uint64_t seed = 0;
};

struct SplitSizes {
  std::size_t train = 0;
  std::size_t validation = 0;
  std::size_t test = 0;
};

/// train = floor(n * r_train), validation = floor(n * r_validation),
/// test = the remainder.
SplitSizes split_sizes(std::size_t n, const SplitRatios& ratios);

/// Shuffles conversations with a seeded generator and cuts them by
/// split_sizes. Deterministic across platforms for a fixed (order, seed).
/// Throws DataError for fewer than 3 conversations or ratios not summing to 1.
SplitResult split_corpus(const Corpus& corpus, std::uint64_t seed, const SplitRatios& ratios = {});

// ---------------------------------------------------------------------------
// Statistics

using TokenCounter = std::function<std::size_t(std::string_view)>;

/// Number of whitespace-delimited tokens.
std::size_t count_whitespace_tokens(std::string_view text);

struct CorpusStats {
  std::size_t conversation_count = 0;
  std::size_t turn_count = 0;
  std::map<std::size_t, std::size_t> turns_histogram;
  std::map<Speaker, double> avg_length_by_speaker;

  double average_turns() const;
};

CorpusStats compute_stats(const Corpus& corpus, const TokenCounter& tokens = count_whitespace_tokens);

}  // namespace empath_eval
