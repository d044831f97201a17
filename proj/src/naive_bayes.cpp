#include "empath_eval/naive_bayes.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "empath_eval/error.hpp"
#include "empath_eval/lexicon.hpp"

namespace empath_eval {

NaiveBayesClassifier::NaiveBayesClassifier(ClassifierTask task, std::size_t max_tokens)
    : task_(task), max_tokens_(max_tokens) {}

std::vector<std::string> NaiveBayesClassifier::tokenize(const std::string& text) const {
  std::vector<std::string> tokens;
  std::istringstream in(text);
  std::string raw;
  while (tokens.size() < max_tokens_ && in >> raw) {
    std::string token = normalize_token(raw);
    if (!token.empty()) tokens.push_back(std::move(token));
  }
  return tokens;
}

NaiveBayesClassifier NaiveBayesClassifier::train(ClassifierTask task, std::span<const LabeledExample> examples,
                                                 std::size_t max_tokens) {
  NaiveBayesClassifier model(task, max_tokens);
  for (const auto& label : task_alphabet(task)) model.classes_[label];
  for (const auto& example : examples) {
    auto it = model.classes_.find(example.label);
    if (it == model.classes_.end()) throw DataError("naive bayes: label \"" + example.label + "\" not in task alphabet");
    ClassModel& cls = it->second;
    ++cls.documents;
    ++model.total_documents_;
    for (auto& token : model.tokenize(example.text)) {
      ++cls.counts[token];
      ++cls.tokens;
      ++model.vocabulary_[token];
    }
  }
  if (model.total_documents_ == 0) throw DataError("naive bayes: no training examples");
  return model;
}

std::pair<std::string, double> NaiveBayesClassifier::predict(const std::string& text) const {
  const auto tokens = tokenize(text);
  const double vocab = static_cast<double>(vocabulary_.size());
  const std::size_t class_count = classes_.size();

  std::vector<std::pair<std::string, double>> log_scores;
  for (const auto& [label, cls] : classes_) {
    // Add-one smoothing on both the prior and the token likelihoods.
    double score = std::log((static_cast<double>(cls.documents) + 1.0) /
                            (static_cast<double>(total_documents_) + static_cast<double>(class_count)));
    const double denom = static_cast<double>(cls.tokens) + vocab + 1.0;
    for (const auto& token : tokens) {
      auto it = cls.counts.find(token);
      const double count = it == cls.counts.end() ? 0.0 : static_cast<double>(it->second);
      score += std::log((count + 1.0) / denom);
    }
    log_scores.emplace_back(label, score);
  }

  double best = -std::numeric_limits<double>::infinity();
  std::string best_label;
  for (const auto& [label, score] : log_scores) {
    if (score > best) {
      best = score;
      best_label = label;
    }
  }
  double normalizer = 0.0;
  for (const auto& [label, score] : log_scores) normalizer += std::exp(score - best);
  return {best_label, 1.0 / normalizer};
}

std::vector<NeutralityVerdict> NaiveBayesClassifier::neutrality(std::span<const std::string> texts) const {
  if (task_ != ClassifierTask::kNeutrality) throw BackendError("naive bayes model was trained for polarity");
  std::vector<NeutralityVerdict> out;
  out.reserve(texts.size());
  for (const auto& text : texts) {
    auto [label, p] = predict(text);
    out.push_back({parse_neutrality(label), p});
  }
  return out;
}

std::vector<PolarityVerdict> NaiveBayesClassifier::polarity(std::span<const std::string> texts) const {
  if (task_ != ClassifierTask::kPolarity) throw BackendError("naive bayes model was trained for neutrality");
  std::vector<PolarityVerdict> out;
  out.reserve(texts.size());
  for (const auto& text : texts) {
    auto [label, p] = predict(text);
    out.push_back({parse_polarity(label), p});
  }
  return out;
}

void NaiveBayesClassifier::save(const std::string& path) const {
  nlohmann::json j;
  j["task"] = std::string(to_string(task_));
  j["max_tokens"] = max_tokens_;
  j["total_documents"] = total_documents_;
  for (const auto& [label, cls] : classes_) {
    j["classes"][label] = {{"documents", cls.documents}, {"tokens", cls.tokens}, {"counts", cls.counts}};
  }
  std::ofstream out(path);
  if (!out) throw BackendError("cannot write model file " + path);
  out << j.dump() << '\n';
}

NaiveBayesClassifier NaiveBayesClassifier::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open model file " + path);
  try {
    const auto j = nlohmann::json::parse(in);
    NaiveBayesClassifier model(parse_task(j.at("task").get<std::string>()), j.at("max_tokens").get<std::size_t>());
    model.total_documents_ = j.at("total_documents").get<std::size_t>();
    for (const auto& [label, cls] : j.at("classes").items()) {
      ClassModel& m = model.classes_[label];
      m.documents = cls.at("documents").get<std::size_t>();
      m.tokens = cls.at("tokens").get<std::size_t>();
      m.counts = cls.at("counts").get<std::map<std::string, std::size_t>>();
      for (const auto& [token, count] : m.counts) model.vocabulary_[token] += count;
    }
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("malformed model file " + path + ": " + e.what());
  }
}

TrainedModel NaiveBayesTrainer::fit(const TrainingConfig& config, const LabeledSplits& splits,
                                    const std::string& output_dir) const {
  auto model = std::make_shared<NaiveBayesClassifier>(NaiveBayesClassifier::train(
      config.task, splits.train, static_cast<std::size_t>(config.max_sequence_length)));
  std::filesystem::create_directories(output_dir);
  model->save((std::filesystem::path(output_dir) / kModelFileName).string());
  return {ArtifactRef{name(), output_dir}, std::move(model)};
}

}  // namespace empath_eval
