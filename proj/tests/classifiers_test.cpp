#include <gtest/gtest.h>

#include <filesystem>
#include <random>
#include <set>

#include "empath_eval/classifiers.hpp"
#include "empath_eval/error.hpp"
#include "empath_eval/lexicon.hpp"
#include "empath_eval/naive_bayes.hpp"
#include "test_support.hpp"

using namespace empath_eval;

namespace {

std::vector<std::string> texts(std::initializer_list<const char*> list) { return {list.begin(), list.end()}; }

/// Fails on any batch containing the marker text.
class FlakyBackend final : public ClassifierBackend {
 public:
  std::vector<NeutralityVerdict> neutrality(std::span<const std::string> in) const override {
    std::vector<NeutralityVerdict> out;
    for (const auto& t : in) {
      if (t == "boom") throw std::runtime_error("backend exploded");
      out.push_back({Neutrality::kNonNeutral, 1.0});
    }
    return out;
  }
  std::vector<PolarityVerdict> polarity(std::span<const std::string> in) const override {
    return std::vector<PolarityVerdict>(in.size() + 1);  // one too many
  }
};

/// Twenty texts from two disjoint vocabularies.
LabeledSplits separable_splits() {
  const std::vector<std::string> a = {"apple", "banana", "cherry", "grape", "melon"};
  const std::vector<std::string> b = {"hammer", "wrench", "pliers", "chisel", "drill"};
  std::vector<LabeledExample> all;
  for (int i = 0; i < 10; ++i) {
    all.push_back({a[i % 5] + " " + a[(i + 1) % 5], "positive"});
    all.push_back({b[i % 5] + " " + b[(i + 2) % 5], "negative"});
  }
  LabeledSplits splits;
  for (std::size_t i = 0; i < all.size(); ++i) {
    (i < 12 ? splits.train : i < 16 ? splits.validation : splits.test).push_back(all[i]);
  }
  return splits;
}

}  // namespace

// ---------------------------------------------------------------------------
// Lexicon backend

TEST(Lexicon, ListSizesAndRequiredStems) {
  const auto& pos = LexiconBackend::positive_stems();
  const auto& neg = LexiconBackend::negative_stems();
  EXPECT_GE(pos.size(), 40u);
  EXPECT_GE(neg.size(), 40u);
  EXPECT_NE(std::find(pos.begin(), pos.end(), "great"), pos.end());
  EXPECT_NE(std::find(neg.begin(), neg.end(), "sick"), neg.end());
  std::set<std::string> overlap;
  for (const auto& s : pos) {
    if (std::find(neg.begin(), neg.end(), s) != neg.end()) overlap.insert(s);
  }
  EXPECT_TRUE(overlap.empty());
}

TEST(Lexicon, NeutralityExamples) {
  const LexiconBackend lex;
  const auto v = classify_neutrality(texts({"the meeting is at noon", "I feel sick today"}), lex);
  ASSERT_EQ(v.size(), 2u);
  EXPECT_EQ(v[0].label, Neutrality::kNeutral);
  EXPECT_DOUBLE_EQ(v[0].confidence, 1.0);
  EXPECT_EQ(v[1].label, Neutrality::kNonNeutral);
  EXPECT_TRUE(classify_neutrality(std::vector<std::string>{}, lex).empty());
}

TEST(Lexicon, PolarityExamplesAndTieRule) {
  const LexiconBackend lex;
  const auto v = classify_polarity(texts({"that's great to hear", "I feel sick today", "great but sick"}), lex);
  EXPECT_EQ(v[0].label, Polarity::kPositive);
  EXPECT_DOUBLE_EQ(v[0].confidence, 1.0);
  EXPECT_EQ(v[1].label, Polarity::kNegative);
  EXPECT_EQ(v[2].label, Polarity::kNegative);
  EXPECT_DOUBLE_EQ(v[2].confidence, 0.5);
  EXPECT_EQ(lex.polarity_of("the meeting is at noon"), (PolarityVerdict{Polarity::kNegative, 0.5}));
  const auto majority = lex.polarity_of("great happy sick");
  EXPECT_EQ(majority.label, Polarity::kPositive);
  EXPECT_NEAR(majority.confidence, 2.0 / 3.0, 1e-12);
}

TEST(Lexicon, InflectionsAndPunctuation) {
  const LexiconBackend lex;
  EXPECT_EQ(lex.hits("Sickness!").negative, 1u);
  EXPECT_EQ(lex.hits("hurting,").negative, 1u);
  EXPECT_EQ(lex.hits("GREAT.").positive, 1u);
  EXPECT_EQ(lex.hits("the wind blew").total(), 0u);
  EXPECT_EQ(normalize_token("\"Don't!\""), "don't");
}

TEST(Lexicon, TruncatesToMaxTokens) {
  const LexiconBackend lex(4);
  EXPECT_EQ(lex.neutrality_of("one two three four great").label, Neutrality::kNeutral);
  EXPECT_EQ(lex.neutrality_of("one two three great").label, Neutrality::kNonNeutral);
}

TEST(Lexicon, DeterministicAndBatchingInvariant) {
  const LexiconBackend lex;
  std::vector<std::string> a = texts({"I feel sick today", "what a great day", "ok", "so sad and lonely"});
  std::vector<std::string> b = texts({"I love it", "terrible news", "the meeting is at noon"});
  std::vector<std::string> ab = a;
  ab.insert(ab.end(), b.begin(), b.end());
  const auto whole = classify_polarity(ab, lex);
  auto left = classify_polarity(a, lex);
  const auto right = classify_polarity(b, lex);
  left.insert(left.end(), right.begin(), right.end());
  EXPECT_EQ(whole, left);
  for (std::size_t batch : {1u, 2u, 3u, 100u}) {
    EXPECT_EQ(classify_polarity(ab, lex, batch), whole) << batch;
    EXPECT_EQ(classify_neutrality(ab, lex, batch), classify_neutrality(ab, lex)) << batch;
  }
}

TEST(Lexicon, SeedCorpusAccuracyMatchesDirectCount) {
  const LexiconBackend lex;
  const auto polarity = lexicon_seed_corpus(ClassifierTask::kPolarity);
  const auto neutrality = lexicon_seed_corpus(ClassifierTask::kNeutrality);
  // Independent count: one sentence per stem, plus neutral sentences.
  const std::size_t stems = LexiconBackend::positive_stems().size() + LexiconBackend::negative_stems().size();
  EXPECT_EQ(polarity.size(), stems);
  std::size_t neutral = 0;
  for (const auto& e : neutrality) neutral += e.label == "neutral";
  EXPECT_GT(neutral, 0u);
  EXPECT_EQ(neutrality.size(), stems + neutral);

  const auto p = evaluate_classifier(lex, ClassifierTask::kPolarity, polarity, EvalSplit::kTest);
  EXPECT_EQ(p.correct, p.total);
  EXPECT_DOUBLE_EQ(p.accuracy(), 1.0);
  const auto n = evaluate_classifier(lex, ClassifierTask::kNeutrality, neutrality, EvalSplit::kTest);
  EXPECT_EQ(n.correct, n.total);
}

// ---------------------------------------------------------------------------
// classify_* contract

TEST(Classify, BlankTextIsDataError) {
  const LexiconBackend lex;
  EXPECT_THROW(classify_neutrality(texts({"fine", "   "}), lex), DataError);
}

TEST(Classify, BackendFailureReportsUnclassifiedIndices) {
  const FlakyBackend flaky;
  try {
    classify_neutrality(texts({"a", "b", "boom", "c", "d"}), flaky, 2);
    FAIL() << "expected ClassificationError";
  } catch (const ClassificationError& e) {
    EXPECT_EQ(e.unclassified(), (std::vector<std::size_t>{2, 3, 4}));
  }
  try {
    classify_polarity(texts({"a", "b"}), flaky);
    FAIL() << "expected ClassificationError";
  } catch (const ClassificationError& e) {
    EXPECT_EQ(e.unclassified(), (std::vector<std::size_t>{0, 1}));
  }
}

TEST(Classify, LabelParsing) {
  EXPECT_EQ(parse_neutrality("Non-Neutral"), Neutrality::kNonNeutral);
  EXPECT_EQ(parse_polarity("POSITIVE"), Polarity::kPositive);
  EXPECT_THROW(parse_polarity("meh"), DataError);
  EXPECT_EQ(parse_task("polarity"), ClassifierTask::kPolarity);
}

// ---------------------------------------------------------------------------
// Evaluation and training

TEST(Evaluate, PerfectAndConstantBackends) {
  std::vector<LabeledExample> examples;
  for (int i = 0; i < 10; ++i) examples.push_back({"t" + std::to_string(i), i < 6 ? "positive" : "negative"});
  const testkit::FunctionBackend perfect(
      [](const std::string&) { return Neutrality::kNonNeutral; },
      [](const std::string& t) { return std::stoi(t.substr(1)) < 6 ? Polarity::kPositive : Polarity::kNegative; });
  const testkit::FunctionBackend constant([](const std::string&) { return Neutrality::kNonNeutral; },
                                          [](const std::string&) { return Polarity::kPositive; });
  const auto p = evaluate_classifier(perfect, ClassifierTask::kPolarity, examples, EvalSplit::kValidation);
  EXPECT_DOUBLE_EQ(p.accuracy(), 1.0);
  const auto c = evaluate_classifier(constant, ClassifierTask::kPolarity, examples, EvalSplit::kTest);
  EXPECT_EQ(c.correct, 6u);
  EXPECT_EQ(c.total, 10u);
  EXPECT_DOUBLE_EQ(c.accuracy(), 0.6);
  EXPECT_EQ(c.per_class.at("positive").correct, 6u);
  EXPECT_EQ(c.per_class.at("negative").correct, 0u);
  EXPECT_DOUBLE_EQ(c.accuracy() * static_cast<double>(c.total), static_cast<double>(c.correct));

  EXPECT_THROW(evaluate_classifier(perfect, ClassifierTask::kPolarity, {}, EvalSplit::kTest), DataError);
  std::vector<LabeledExample> bad{{"x", "joyful"}};
  EXPECT_THROW(evaluate_classifier(perfect, ClassifierTask::kPolarity, bad, EvalSplit::kTest), DataError);
}

TEST(TrainingConfig, DefaultsAndJsonRoundTrip) {
  const TrainingConfig config;
  EXPECT_EQ(config.base_model_id, "roberta-base");
  EXPECT_EQ(config.max_sequence_length, 128);
  EXPECT_EQ(config.batch_size_per_device, 32);
  EXPECT_DOUBLE_EQ(config.learning_rate, 1e-5);
  EXPECT_EQ(config.epochs, 3);

  TrainingConfig other = config;
  other.task = ClassifierTask::kPolarity;
  other.epochs = 5;
  EXPECT_EQ(training_config_from_json(training_config_to_json(other)), other);
  EXPECT_THROW(training_config_from_json(R"({"base_model_id":"x"})"), DataError);

  TrainingConfig bad = config;
  bad.learning_rate = 0;
  EXPECT_THROW(bad.validate(), DataError);
}

TEST(Training, NullBackendIsExplicitError) {
  testkit::TempDir dir;
  try {
    train_classifier(separable_splits(), TrainingConfig{}, nullptr, dir.path().string());
    FAIL() << "expected BackendError";
  } catch (const BackendError& e) {
    EXPECT_NE(std::string(e.what()).find("training backend not configured"), std::string::npos);
  }
}

TEST(Training, LabelOutsideAlphabetIsRejected) {
  testkit::TempDir dir;
  auto splits = separable_splits();
  splits.train.push_back({"odd", "neutral"});
  TrainingConfig config;
  config.task = ClassifierTask::kPolarity;
  const NaiveBayesTrainer trainer;
  EXPECT_THROW(train_classifier(splits, config, &trainer, dir.path().string()), DataError);
}

TEST(Training, SeparableCorpusReachesPerfectAccuracy) {
  const auto splits = separable_splits();
  // Count-based oracle: every test text shares a token only with training
  // texts of its own class, so a unigram rule separates the data.
  std::map<std::string, std::set<std::string>> vocab;
  for (const auto& e : splits.train) {
    std::istringstream in(e.text);
    for (std::string w; in >> w;) vocab[e.label].insert(w);
  }
  for (const auto& e : splits.test) {
    std::istringstream in(e.text);
    std::size_t own = 0;
    std::size_t other = 0;
    for (std::string w; in >> w;) {
      for (const auto& [label, words] : vocab) (label == e.label ? own : other) += words.count(w);
    }
    ASSERT_GT(own, 0u) << e.text;
    ASSERT_EQ(other, 0u) << e.text;
  }

  testkit::TempDir dir;
  TrainingConfig config;
  config.task = ClassifierTask::kPolarity;
  const NaiveBayesTrainer trainer;
  const auto result = train_classifier(splits, config, &trainer, dir.path().string());
  EXPECT_DOUBLE_EQ(result.test.accuracy(), 1.0);
  EXPECT_DOUBLE_EQ(result.validation.accuracy(), 1.0);
  EXPECT_EQ(result.model.artifact.backend, "naive-bayes");

  const auto config_path = dir.path() / kTrainingConfigFileName;
  ASSERT_TRUE(std::filesystem::exists(config_path));
  EXPECT_EQ(training_config_from_json(testkit::slurp(config_path.string())), config);

  const auto reloaded =
      NaiveBayesClassifier::load((dir.path() / NaiveBayesTrainer::kModelFileName).string());
  for (const auto& e : splits.test) EXPECT_EQ(reloaded.predict(e.text).first, e.label);
  EXPECT_THROW(reloaded.neutrality(texts({"apple"})), BackendError);
}
