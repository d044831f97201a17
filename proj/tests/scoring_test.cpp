#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "empath_eval/bots.hpp"
#include "empath_eval/error.hpp"
#include "empath_eval/lexicon.hpp"
#include "empath_eval/scoring.hpp"
#include "test_support.hpp"

using namespace empath_eval;
using empath_eval::testkit::conversation;

namespace {

UtteranceVerdicts neutral() { return {{Neutrality::kNeutral, 1.0}, std::nullopt}; }
UtteranceVerdicts polar(Polarity p) { return {{Neutrality::kNonNeutral, 1.0}, PolarityVerdict{p, 1.0}}; }

std::vector<Rational> values(std::initializer_list<double> list) {
  std::vector<Rational> out;
  for (double v : list) out.emplace_back(static_cast<std::int64_t>(v * 2), 2);
  return out;
}

/// Non-neutral user turns only, drawn from lexicon-hit sentences.
Corpus emotional_corpus(std::size_t conversations, std::mt19937_64& rng) {
  static const std::vector<std::string> texts = {
      "I feel sick today",      "we won and I am so happy", "my grandmother died last week",
      "what a wonderful party", "I am scared of the dark",  "the food was excellent",
      "I failed my exam",       "I love my new bike",       "this traffic makes me angry",
  };
  Corpus corpus;
  for (std::size_t i = 0; i < conversations; ++i) {
    std::vector<std::string> user;
    for (std::size_t t = 0, k = 1 + rng() % 4; t < k; ++t) user.push_back(texts[rng() % texts.size()]);
    corpus.push_back(conversation("c" + std::to_string(i), user));
  }
  return corpus;
}

}  // namespace

TEST(ScoreTurn, PayoffTable) {
  EXPECT_EQ(score_turn(polar(Polarity::kNegative), neutral()).value(), Rational(1, 2));
  EXPECT_EQ(score_turn(polar(Polarity::kNegative), neutral()).reason, ScoreReason::kResponseNeutral);
  EXPECT_EQ(score_turn(polar(Polarity::kPositive), polar(Polarity::kPositive)).value(), Rational(1));
  EXPECT_EQ(score_turn(polar(Polarity::kNegative), polar(Polarity::kNegative)).reason, ScoreReason::kPolarityMatch);
  const auto mismatch = score_turn(polar(Polarity::kNegative), polar(Polarity::kPositive));
  EXPECT_EQ(mismatch.value(), Rational(0));
  EXPECT_EQ(mismatch.reason, ScoreReason::kPolarityMismatch);
  EXPECT_THROW(score_turn(neutral(), polar(Polarity::kPositive)), std::invalid_argument);
}

TEST(ScoreTurn, SickGreatToHearExample) {
  const LexiconBackend lex;
  const UtteranceVerdicts user{lex.neutrality_of("I feel sick today"), lex.polarity_of("I feel sick today")};
  const UtteranceVerdicts response{lex.neutrality_of("that's great to hear"), lex.polarity_of("that's great to hear")};
  EXPECT_EQ(score_turn(user, response).value(), Rational(0));
}

TEST(Gate, SplitsByUserNeutrality) {
  const LexiconBackend lex;
  const Corpus corpus{conversation("a", {"I feel sick today", "the meeting is at noon", "great news"}),
                      conversation("b", {"ok then", "my dog died"})};
  const auto gate = gate_user_utterances(corpus, lex);
  EXPECT_EQ(gate.scorable, (std::vector<TurnRef>{{0, 0}, {0, 2}, {1, 1}}));
  EXPECT_EQ(gate.skipped, (std::vector<TurnRef>{{0, 1}, {1, 0}}));
  EXPECT_EQ(gate.scorable_verdicts.size(), 3u);

  const Corpus all_neutral{conversation("a", {"ok", "the meeting is at noon"})};
  const auto none = gate_user_utterances(all_neutral, lex);
  EXPECT_TRUE(none.scorable.empty());
  EXPECT_EQ(none.skipped.size(), 2u);
}

TEST(ScoreCorpus, ZeroScorableTurnsIsExplicit) {
  const LexiconBackend lex;
  const Corpus corpus{conversation("a", {"ok", "the meeting is at noon"})};
  ScoreOptions options;
  const StubBot bot(BotKind::kStubNeutral);
  options.bot = &bot;
  EXPECT_THROW(score_corpus(corpus, lex, lex, options), NoScorableTurnsError);
}

TEST(ScoreCorpus, MissingResponseIsDataError) {
  const LexiconBackend lex;
  const Corpus corpus{conversation("a", {"I feel sick today"})};
  EXPECT_THROW(score_corpus(corpus, lex, lex), DataError);
}

TEST(ScoreCorpus, MixedTurnsAndExistingResponses) {
  const LexiconBackend lex;
  Corpus corpus{conversation("a", {"I feel sick today", "ok", "great news", "the meeting is at noon", "my dog died"})};
  const char* replies[] = {"I see.", "", "that's wonderful", "", "that is great"};
  for (std::size_t i = 0; i < 5; ++i) {
    if (*replies[i]) corpus[0].turns[i].response = Utterance{replies[i], Speaker::kHumanResponder, {}, "t"};
  }
  const auto score = score_corpus(corpus, lex, lex);
  EXPECT_EQ(score.scored_turns, 3u);
  EXPECT_EQ(score.skipped_neutral_user_turns, 2u);
  ASSERT_EQ(score.per_turn.size(), 3u);
  EXPECT_EQ(score.per_turn[0].index, 0u);
  EXPECT_EQ(score.per_turn[0].score.reason, ScoreReason::kResponseNeutral);
  EXPECT_EQ(score.per_turn[1].score.reason, ScoreReason::kPolarityMatch);
  EXPECT_EQ(score.per_turn[2].score.reason, ScoreReason::kPolarityMismatch);
  EXPECT_EQ(score.mean(), Rational(1, 2));  // (0.5 + 1 + 0) / 3
}

TEST(ScoreCorpus, StubBotsAreAnalytic) {
  const LexiconBackend lex;
  std::mt19937_64 rng(31);
  const Corpus corpus = emotional_corpus(30, rng);
  struct Case {
    BotKind kind;
    Rational expected;
  };
  for (const auto& c : {Case{BotKind::kStubMirror, Rational(1)}, Case{BotKind::kStubNeutral, Rational(1, 2)},
                        Case{BotKind::kStubContrarian, Rational(0)}}) {
    const StubBot bot(c.kind);
    ScoreOptions options;
    options.bot = &bot;
    options.jobs = 4;
    const auto score = score_corpus(corpus, lex, lex, options);
    EXPECT_EQ(score.skipped_neutral_user_turns, 0u);
    EXPECT_EQ(score.mean(), c.expected);
    for (const auto& t : score.per_turn) EXPECT_EQ(t.score.value(), c.expected);
    const auto dialogue = aggregate_dialogues(group_by_conversation(corpus, score));
    EXPECT_EQ(dialogue.corpus_max, c.expected);
    EXPECT_EQ(dialogue.corpus_min, c.expected);
    EXPECT_EQ(dialogue.corpus_mid, c.expected);
  }
}

TEST(ScoreCorpus, ScriptedReplayEqualsDirectScoring) {
  const LexiconBackend lex;
  std::mt19937_64 rng(41);
  const Corpus users = emotional_corpus(20, rng);
  const auto with_responses = attach_responses(users, StubBot(BotKind::kStubMirror)).corpus;
  const auto direct = score_corpus(with_responses, lex, lex);

  const auto bot = ScriptedBot::from_corpus(with_responses, "replay");
  ScoreOptions options;
  options.bot = &bot;
  const auto replayed = score_corpus(users, lex, lex, options);
  EXPECT_EQ(direct.total_halves, replayed.total_halves);
  EXPECT_EQ(direct.scored_turns, replayed.scored_turns);
}

TEST(ScoreCorpus, BatchSizeDoesNotChangeScores) {
  const LexiconBackend lex;
  std::mt19937_64 rng(43);
  const Corpus corpus = emotional_corpus(25, rng);
  const StubBot bot(BotKind::kStubContrarian);
  ScoreOptions a;
  a.bot = &bot;
  ScoreOptions b = a;
  b.batch_size = 3;
  EXPECT_EQ(score_corpus(corpus, lex, lex, a).total_halves, score_corpus(corpus, lex, lex, b).total_halves);
}

TEST(CorpusScore, MeanOfPayoffs) {
  CorpusScore s;
  s.total_halves = 3;  // 1 + 0.5 + 0
  s.scored_turns = 3;
  EXPECT_EQ(s.mean(), Rational(1, 2));
}

TEST(Aggregate, BasicCases) {
  std::vector<ConversationScores> one{{"a", values({0, 0.5, 1})}};
  const auto agg = aggregate_dialogues(one);
  EXPECT_EQ(agg.per_conversation.at("a").max, Rational(1));
  EXPECT_EQ(agg.per_conversation.at("a").min, Rational(0));
  EXPECT_EQ(agg.per_conversation.at("a").mid, Rational(1, 2));

  std::vector<ConversationScores> single{{"s", values({0.5})}};
  const auto s = aggregate_dialogues(single);
  EXPECT_EQ(s.corpus_max, Rational(1, 2));
  EXPECT_EQ(s.corpus_min, Rational(1, 2));
  EXPECT_EQ(s.corpus_mid, Rational(1, 2));
}

TEST(Aggregate, ExclusionAndErrors) {
  std::vector<ConversationScores> with_empty{{"a", values({1, 0})}, {"b", {}}};
  const auto agg = aggregate_dialogues(with_empty);
  EXPECT_EQ(agg.scored_conversations, 1u);
  EXPECT_EQ(agg.excluded_conversations, 1u);

  EXPECT_THROW(aggregate_dialogues(std::vector<ConversationScores>{}), DataError);
  std::vector<ConversationScores> dup{{"a", values({1})}, {"a", values({0})}};
  EXPECT_THROW(aggregate_dialogues(dup), DataError);
  std::vector<ConversationScores> out_of_range{{"a", {Rational(3, 2)}}};
  EXPECT_THROW(aggregate_dialogues(out_of_range), DataError);
  std::vector<ConversationScores> all_empty{{"a", {}}};
  EXPECT_THROW(aggregate_dialogues(all_empty), DataError);
}

TEST(Aggregate, PublishedHumanRowMid) {
  // Corpus mid from the published 4-decimal max and min.
  const Rational max(9492, 10000);
  const Rational min(5847, 10000);
  const Rational mid = (max + min) / Rational(2);
  EXPECT_EQ(mid, Rational(76695, 100000));
  // The exact values behind the row are 56/59 and 34.5/59.
  EXPECT_EQ(((Rational(56, 59) + Rational(69, 118)) / Rational(2)).to_fixed(4), "0.7669");
}

TEST(Aggregate, PropertiesOverRandomScores) {
  std::mt19937_64 rng(47);
  for (int iter = 0; iter < 500; ++iter) {
    std::vector<ConversationScores> convs;
    const std::size_t n = 1 + rng() % 30;
    for (std::size_t c = 0; c < n; ++c) {
      ConversationScores cs{"c" + std::to_string(c), {}};
      for (std::size_t t = 0, k = 1 + rng() % 5; t < k; ++t) cs.turn_values.emplace_back(rng() % 3, 2);
      convs.push_back(cs);
    }
    const auto agg = aggregate_dialogues(convs);
    Rational sum_mid;
    for (const auto& [id, a] : agg.per_conversation) {
      ASSERT_LE(a.min, a.mid);
      ASSERT_LE(a.mid, a.max);
      sum_mid += a.mid;
    }
    ASSERT_LE(agg.corpus_min, agg.corpus_mid);
    ASSERT_LE(agg.corpus_mid, agg.corpus_max);
    ASSERT_GE(agg.corpus_min, Rational(0));
    ASSERT_LE(agg.corpus_max, Rational(1));
    // Mid of means equals mean of mids.
    ASSERT_EQ(agg.corpus_mid, sum_mid / Rational(static_cast<std::int64_t>(n)));

    // Reordering conversations leaves every aggregate unchanged.
    std::shuffle(convs.begin(), convs.end(), rng);
    const auto again = aggregate_dialogues(convs);
    ASSERT_EQ(again.corpus_mid, agg.corpus_mid);
    ASSERT_EQ(again.corpus_max, agg.corpus_max);
  }
}

TEST(Exactness, MeanTimesTurnsIsHalfInteger) {
  std::mt19937_64 rng(53);
  for (int iter = 0; iter < 2000; ++iter) {
    CorpusScore s;
    s.scored_turns = 1 + rng() % 300;
    for (std::size_t i = 0; i < s.scored_turns; ++i) s.total_halves += static_cast<std::int64_t>(rng() % 3);
    const Rational product = s.mean() * Rational(static_cast<std::int64_t>(s.scored_turns));
    ASSERT_EQ((product * Rational(2)).den(), 1);
    ASSERT_GE(s.mean(), Rational(0));
    ASSERT_LE(s.mean(), Rational(1));
  }
}

TEST(Exactness, MeanInvariantUnderTurnReordering) {
  const LexiconBackend lex;
  std::mt19937_64 rng(59);
  Corpus corpus = attach_responses(emotional_corpus(15, rng), StubBot(BotKind::kStubMirror)).corpus;
  // Swap a few responses around so scores differ between turns.
  for (std::size_t c = 0; c + 1 < corpus.size(); c += 2) std::swap(corpus[c].turns[0], corpus[c + 1].turns[0]);
  for (auto& conv : corpus) {
    if (!conv.turns.empty()) conv.turns[0].response->text = "I see.";
  }
  const Rational base = score_corpus(corpus, lex, lex).mean();
  for (int k = 0; k < 20; ++k) {
    Corpus shuffled = corpus;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    for (auto& conv : shuffled) std::shuffle(conv.turns.begin(), conv.turns.end(), rng);
    ASSERT_EQ(score_corpus(shuffled, lex, lex).mean(), base);
  }
}
