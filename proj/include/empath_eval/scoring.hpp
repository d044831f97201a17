#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "empath_eval/bots.hpp"
#include "empath_eval/classifiers.hpp"
#include "empath_eval/corpus.hpp"
#include "empath_eval/exact.hpp"

namespace empath_eval {

enum class ScoreReason { kResponseNeutral, kPolarityMatch, kPolarityMismatch };

std::string_view to_string(ScoreReason reason);

struct UtteranceVerdicts {
  NeutralityVerdict neutrality;
  /// Required whenever the neutrality label is NON_NEUTRAL.
  std::optional<PolarityVerdict> polarity;
};

/// Payoff for one (user, response) pair, kept in half points: 0, 1 or 2
/// halves for 0, 0.5 and 1.
struct TurnScore {
  int halves = 0;
  ScoreReason reason = ScoreReason::kPolarityMismatch;
  std::optional<PolarityVerdict> user_polarity;
  UtteranceVerdicts response_verdicts;

  Rational value() const { return Rational(halves, 2); }
};

/// Neutral response: 0.5. Otherwise 1 when user and response polarity agree,
/// 0 when they differ. A NEUTRAL user verdict is a contract violation
/// (std::invalid_argument); such turns are removed by the gate upstream.
TurnScore score_turn(const UtteranceVerdicts& user, const UtteranceVerdicts& response);

struct GateResult {
  std::vector<TurnRef> scorable;
  /// Gate verdicts for the scorable turns, parallel to `scorable`.
  std::vector<NeutralityVerdict> scorable_verdicts;
  std::vector<TurnRef> skipped;
};

/// Splits turns by the neutrality of the user utterance. Order follows the corpus.
GateResult gate_user_utterances(const Corpus& corpus, const ClassifierBackend& neutrality_backend,
                                std::size_t batch_size = 0);

struct ScoredTurn {
  std::string conversation;
  std::size_t index = 0;
  TurnScore score;
};

struct CorpusScore {
  std::int64_t total_halves = 0;
  std::size_t scored_turns = 0;
  std::size_t skipped_neutral_user_turns = 0;
  std::vector<ScoredTurn> per_turn;

  /// Exact mean over scored turns.
  Rational mean() const { return Rational(total_halves, 2 * static_cast<std::int64_t>(scored_turns)); }
};

/// Thrown when gating leaves nothing to average.
class NoScorableTurnsError : public DataError {
 public:
  NoScorableTurnsError() : DataError("no scorable turns: every user utterance was classified neutral") {}
};

struct ScoreOptions {
  /// When set, responses for the scorable turns are generated by this bot
  /// (replacing any existing ones). Otherwise every scorable turn must
  /// already carry a response.
  const Bot* bot = nullptr;
  std::size_t jobs = 1;
  std::size_t batch_size = 0;
};

/// Gate users, obtain responses, classify, and score every scorable turn.
/// per_turn follows corpus order. Throws NoScorableTurnsError when the gate
/// leaves nothing, DataError when a scorable turn lacks a response.
CorpusScore score_corpus(const Corpus& corpus, const ClassifierBackend& neutrality_backend,
                         const ClassifierBackend& polarity_backend, const ScoreOptions& options = {});

// ---------------------------------------------------------------------------
// Dialogue-level aggregation

struct ConversationScores {
  std::string id;
  std::vector<Rational> turn_values;
};

struct ConversationAggregate {
  Rational max;
  Rational min;
  Rational mid;
};

struct DialogueAggregate {
  std::map<std::string, ConversationAggregate> per_conversation;
  /// Means over scored conversations of the per-conversation max / min.
  Rational corpus_max;
  Rational corpus_min;
  Rational corpus_mid;
  std::size_t scored_conversations = 0;
  /// Conversations with no scored turn, left out of every mean.
  std::size_t excluded_conversations = 0;
};

/// Max/min/mid per conversation and their corpus means. Throws DataError on
/// empty input, duplicate ids, values outside [0, 1], or when every
/// conversation is empty.
DialogueAggregate aggregate_dialogues(std::span<const ConversationScores> conversations);

/// Regroups per-turn scores by conversation, keeping conversations that had
/// no scored turn (so aggregation can report them as excluded).
std::vector<ConversationScores> group_by_conversation(const Corpus& corpus, const CorpusScore& score);

}  // namespace empath_eval
