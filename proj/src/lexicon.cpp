#include "empath_eval/lexicon.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <sstream>
#include <unordered_set>

namespace empath_eval {
namespace {

// Inflections accepted after a stem.
constexpr std::array<std::string_view, 12> kSuffixes{"s", "es", "d", "ed", "ing", "ly",
                                                     "ness", "er", "est", "ful", "y", "ily"};

bool matches_stem(const std::unordered_set<std::string>& stems, const std::string& token) {
  if (token.empty()) return false;
  if (stems.count(token)) return true;
  for (auto suffix : kSuffixes) {
    if (token.size() <= suffix.size() || token.compare(token.size() - suffix.size(), suffix.size(), suffix) != 0) {
      continue;
    }
    const std::string stem = token.substr(0, token.size() - suffix.size());
    // "d" only completes stems ending in "e" (loved, died), not fun -> fund.
    if (suffix == "d" && stem.back() != 'e') continue;
    if (stems.count(stem)) return true;
  }
  return false;
}

const std::unordered_set<std::string>& positive_set() {
  static const std::unordered_set<std::string> set(LexiconBackend::positive_stems().begin(),
                                                   LexiconBackend::positive_stems().end());
  return set;
}

const std::unordered_set<std::string>& negative_set() {
  static const std::unordered_set<std::string> set(LexiconBackend::negative_stems().begin(),
                                                   LexiconBackend::negative_stems().end());
  return set;
}

const std::vector<std::string>& neutral_sentences() {
  static const std::vector<std::string> sentences{
      "the meeting is at noon",
      "I see.",
      "the train leaves at seven",
      "we moved the table into the kitchen",
      "my brother works at the post office",
      "what time does the store open",
      "I had pasta for dinner",
      "the package arrived on Tuesday",
      "she is reading a book about history",
      "we are driving to the city tomorrow",
  };
  return sentences;
}

}  // namespace

std::string normalize_token(std::string_view token) {
  std::size_t begin = 0;
  std::size_t end = token.size();
  while (begin < end && !std::isalnum(static_cast<unsigned char>(token[begin]))) ++begin;
  while (end > begin && !std::isalnum(static_cast<unsigned char>(token[end - 1]))) --end;
  std::string out(token.substr(begin, end - begin));
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

const std::vector<std::string>& LexiconBackend::positive_stems() {
  static const std::vector<std::string> stems{
      "great",     "good",        "happy",     "happiness", "glad",     "joy",       "joyful",   "love",
      "lovely",    "wonderful",   "amazing",   "awesome",   "excellent", "fantastic", "excited", "exciting",
      "delighted", "pleased",     "proud",     "grateful",  "thankful", "thanks",    "fun",      "funny",
      "enjoy",     "beautiful",   "nice",      "cheerful",  "hopeful",  "relaxed",   "confident", "congratulations",
      "celebrate", "laugh",       "smile",     "won",       "success",  "successful", "perfect", "brilliant",
      "blessed",   "thrilled",    "peaceful",  "sweet",     "best",     "favorite",  "optimistic", "impressed",
      "inspired",  "fortunately",
  };
  return stems;
}

const std::vector<std::string>& LexiconBackend::negative_stems() {
  static const std::vector<std::string> stems{
      "sick",     "sad",        "sadness",      "angry",     "anger",     "upset",     "terrible",  "awful",
      "horrible", "bad",        "worse",        "worst",     "hate",      "afraid",    "scared",    "fear",
      "anxious",  "anxiety",    "worried",      "worry",     "depressed", "lonely",    "hurt",      "pain",
      "painful",  "cry",        "cried",        "tears",     "disappointed", "frustrated", "annoyed", "miserable",
      "stressed", "stress",     "exhausted",    "sorry",     "guilty",    "ashamed",   "embarrassed", "jealous",
      "disgusted", "furious",   "fail",         "failure",   "die",       "dying",       "death",     "dead",      "grief",
      "heartbroken", "nervous", "unfortunately", "hopeless", "ill",
  };
  return stems;
}

LexiconHits LexiconBackend::hits(std::string_view text) const {
  LexiconHits hits;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t seen = 0;
  while (seen < max_tokens_ && in >> raw) {
    ++seen;
    const std::string token = normalize_token(raw);
    if (matches_stem(positive_set(), token)) ++hits.positive;
    if (matches_stem(negative_set(), token)) ++hits.negative;
  }
  return hits;
}

NeutralityVerdict LexiconBackend::neutrality_of(std::string_view text) const {
  return {hits(text).total() == 0 ? Neutrality::kNeutral : Neutrality::kNonNeutral, 1.0};
}

PolarityVerdict LexiconBackend::polarity_of(std::string_view text) const {
  const LexiconHits h = hits(text);
  if (h.positive == h.negative) return {Polarity::kNegative, 0.5};
  const double total = static_cast<double>(h.total());
  if (h.positive > h.negative) return {Polarity::kPositive, static_cast<double>(h.positive) / total};
  return {Polarity::kNegative, static_cast<double>(h.negative) / total};
}

std::vector<NeutralityVerdict> LexiconBackend::neutrality(std::span<const std::string> texts) const {
  std::vector<NeutralityVerdict> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(neutrality_of(t));
  return out;
}

std::vector<PolarityVerdict> LexiconBackend::polarity(std::span<const std::string> texts) const {
  std::vector<PolarityVerdict> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(polarity_of(t));
  return out;
}

std::vector<LabeledExample> lexicon_seed_corpus(ClassifierTask task) {
  std::vector<LabeledExample> out;
  const bool neutrality = task == ClassifierTask::kNeutrality;
  for (const auto& stem : LexiconBackend::positive_stems()) {
    out.push_back({"today it was " + stem, neutrality ? "non_neutral" : "positive"});
  }
  for (const auto& stem : LexiconBackend::negative_stems()) {
    out.push_back({"today it was " + stem, neutrality ? "non_neutral" : "negative"});
  }
  if (neutrality) {
    for (const auto& s : neutral_sentences()) out.push_back({s, "neutral"});
  }
  return out;
}

}  // namespace empath_eval
