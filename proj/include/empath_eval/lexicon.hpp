#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "empath_eval/classifiers.hpp"

namespace empath_eval {

struct LexiconHits {
  std::size_t positive = 0;
  std::size_t negative = 0;

  std::size_t total() const { return positive + negative; }
};

/// Deterministic word-list classifier used as the offline reference backend.
///
/// A token hits a list when, after lower-casing and stripping surrounding
/// punctuation, it equals a listed stem or a stem followed by a common
/// inflection ("sick" -> "sickness", "hurt" -> "hurting"). Only the first
/// `max_tokens` whitespace tokens are read.
///
///   neutrality: NEUTRAL iff no hits (confidence 1).
///   polarity:   majority of hits, confidence = majority / total; ties
///               (including zero hits) are NEGATIVE with confidence 0.5.
class LexiconBackend final : public ClassifierBackend {
 public:
  static constexpr std::size_t kDefaultMaxTokens = 128;

  explicit LexiconBackend(std::size_t max_tokens = kDefaultMaxTokens) : max_tokens_(max_tokens) {}

  std::vector<NeutralityVerdict> neutrality(std::span<const std::string> texts) const override;
  std::vector<PolarityVerdict> polarity(std::span<const std::string> texts) const override;

  LexiconHits hits(std::string_view text) const;
  NeutralityVerdict neutrality_of(std::string_view text) const;
  PolarityVerdict polarity_of(std::string_view text) const;

  static const std::vector<std::string>& positive_stems();
  static const std::vector<std::string>& negative_stems();

 private:
  std::size_t max_tokens_;
};

/// Lower-cases and strips leading/trailing non-alphanumeric characters
/// (apostrophes inside the word are kept).
std::string normalize_token(std::string_view token);

/// Labelled sentences built from the word lists themselves: one sentence per
/// stem plus a set of lexicon-free neutral sentences. For kPolarity only the
/// emotional sentences are returned.
std::vector<LabeledExample> lexicon_seed_corpus(ClassifierTask task);

}  // namespace empath_eval
