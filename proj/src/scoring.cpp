#include "empath_eval/scoring.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "empath_eval/error.hpp"

namespace empath_eval {

std::string_view to_string(ScoreReason reason) {
  switch (reason) {
    case ScoreReason::kResponseNeutral:
      return "response_neutral";
    case ScoreReason::kPolarityMatch:
      return "polarity_match";
    case ScoreReason::kPolarityMismatch:
      return "polarity_mismatch";
  }
  return "unknown";
}

TurnScore score_turn(const UtteranceVerdicts& user, const UtteranceVerdicts& response) {
  if (user.neutrality.label == Neutrality::kNeutral) {
    throw std::invalid_argument("score_turn: user utterance is neutral; it should have been gated out");
  }
  TurnScore score;
  score.user_polarity = user.polarity;
  score.response_verdicts = response;
  if (response.neutrality.label == Neutrality::kNeutral) {
    score.halves = 1;
    score.reason = ScoreReason::kResponseNeutral;
    return score;
  }
  if (!user.polarity || !response.polarity) {
    throw std::invalid_argument("score_turn: polarity verdicts are required for a non-neutral response");
  }
  if (user.polarity->label == response.polarity->label) {
    score.halves = 2;
    score.reason = ScoreReason::kPolarityMatch;
  } else {
    score.halves = 0;
    score.reason = ScoreReason::kPolarityMismatch;
  }
  return score;
}

GateResult gate_user_utterances(const Corpus& corpus, const ClassifierBackend& neutrality_backend,
                                std::size_t batch_size) {
  std::vector<std::string> texts;
  std::vector<TurnRef> refs;
  for (std::size_t c = 0; c < corpus.size(); ++c) {
    for (std::size_t t = 0; t < corpus[c].turns.size(); ++t) {
      texts.push_back(corpus[c].turns[t].user.text);
      refs.push_back({c, t});
    }
  }
  const auto verdicts = classify_neutrality(texts, neutrality_backend, batch_size);
  GateResult gate;
  for (std::size_t i = 0; i < refs.size(); ++i) {
    if (verdicts[i].label == Neutrality::kNeutral) {
      gate.skipped.push_back(refs[i]);
    } else {
      gate.scorable.push_back(refs[i]);
      gate.scorable_verdicts.push_back(verdicts[i]);
    }
  }
  return gate;
}

CorpusScore score_corpus(const Corpus& corpus, const ClassifierBackend& neutrality_backend,
                         const ClassifierBackend& polarity_backend, const ScoreOptions& options) {
  const GateResult gate = gate_user_utterances(corpus, neutrality_backend, options.batch_size);
  if (gate.scorable.empty()) throw NoScorableTurnsError();

  Corpus attached;
  const Corpus* working = &corpus;
  if (options.bot != nullptr) {
    AttachOptions attach;
    attach.overwrite = true;
    attach.jobs = options.jobs;
    attach.only = gate.scorable;
    attached = attach_responses(corpus, *options.bot, attach).corpus;
    working = &attached;
  }

  std::vector<std::string> user_texts;
  std::vector<std::string> response_texts;
  for (const auto& ref : gate.scorable) {
    const Conversation& conv = (*working)[ref.conversation];
    const Turn& turn = conv.turns[ref.turn];
    if (!turn.response) {
      throw DataError("conversation \"" + conv.id + "\" turn " + std::to_string(ref.turn) +
                      " has no response and no bot was supplied");
    }
    user_texts.push_back(turn.user.text);
    response_texts.push_back(turn.response->text);
  }

  const auto response_neutrality = classify_neutrality(response_texts, neutrality_backend, options.batch_size);
  const auto user_polarity = classify_polarity(user_texts, polarity_backend, options.batch_size);

  std::vector<std::string> emotional_responses;
  std::vector<std::size_t> emotional_index;
  for (std::size_t i = 0; i < response_texts.size(); ++i) {
    if (response_neutrality[i].label == Neutrality::kNonNeutral) {
      emotional_responses.push_back(response_texts[i]);
      emotional_index.push_back(i);
    }
  }
  const auto response_polarity = classify_polarity(emotional_responses, polarity_backend, options.batch_size);
  std::vector<std::optional<PolarityVerdict>> response_polarity_at(response_texts.size());
  for (std::size_t k = 0; k < emotional_index.size(); ++k) response_polarity_at[emotional_index[k]] = response_polarity[k];

  CorpusScore result;
  result.skipped_neutral_user_turns = gate.skipped.size();
  for (std::size_t i = 0; i < gate.scorable.size(); ++i) {
    const TurnRef& ref = gate.scorable[i];
    TurnScore score = score_turn({gate.scorable_verdicts[i], user_polarity[i]},
                                 {response_neutrality[i], response_polarity_at[i]});
    result.total_halves += score.halves;
    ++result.scored_turns;
    result.per_turn.push_back({corpus[ref.conversation].id, ref.turn, std::move(score)});
  }
  return result;
}

// ---------------------------------------------------------------------------

DialogueAggregate aggregate_dialogues(std::span<const ConversationScores> conversations) {
  if (conversations.empty()) throw DataError("dialogue aggregation: no conversations");

  DialogueAggregate agg;
  Rational sum_max;
  Rational sum_min;
  std::set<std::string> seen;
  for (const auto& conv : conversations) {
    if (!seen.insert(conv.id).second) throw DataError("dialogue aggregation: duplicate conversation \"" + conv.id + "\"");
    if (conv.turn_values.empty()) {
      ++agg.excluded_conversations;
      continue;
    }
    for (const auto& v : conv.turn_values) {
      if (v < Rational(0) || v > Rational(1)) {
        throw DataError("dialogue aggregation: conversation \"" + conv.id + "\" has a score outside [0, 1]");
      }
    }
    const auto [lo, hi] = std::minmax_element(conv.turn_values.begin(), conv.turn_values.end());
    const ConversationAggregate c{*hi, *lo, (*hi + *lo) / Rational(2)};
    agg.per_conversation.emplace(conv.id, c);
    sum_max += c.max;
    sum_min += c.min;
    ++agg.scored_conversations;
  }
  if (agg.scored_conversations == 0) throw DataError("dialogue aggregation: every conversation has zero scored turns");

  const Rational n(static_cast<std::int64_t>(agg.scored_conversations));
  agg.corpus_max = sum_max / n;
  agg.corpus_min = sum_min / n;
  agg.corpus_mid = (agg.corpus_max + agg.corpus_min) / Rational(2);
  return agg;
}

std::vector<ConversationScores> group_by_conversation(const Corpus& corpus, const CorpusScore& score) {
  std::vector<ConversationScores> groups;
  groups.reserve(corpus.size());
  std::map<std::string, std::size_t> index;
  for (const auto& conv : corpus) {
    index.emplace(conv.id, groups.size());
    groups.push_back({conv.id, {}});
  }
  for (const auto& turn : score.per_turn) {
    auto it = index.find(turn.conversation);
    if (it == index.end()) throw DataError("scored turn refers to unknown conversation \"" + turn.conversation + "\"");
    groups[it->second].turn_values.push_back(turn.score.value());
  }
  return groups;
}

}  // namespace empath_eval
