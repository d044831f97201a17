#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "empath_eval/classifiers.hpp"

namespace empath_eval {

/// Multinomial naive Bayes over lower-cased unigrams with add-one smoothing.
/// Small enough to ship as a concrete TrainingBackend so the training
/// contract can be exercised without an ML runtime.
class NaiveBayesClassifier final : public ClassifierBackend {
 public:
  NaiveBayesClassifier(ClassifierTask task, std::size_t max_tokens);

  static NaiveBayesClassifier train(ClassifierTask task, std::span<const LabeledExample> examples,
                                    std::size_t max_tokens);

  /// Model file written by save(); throws DataError on a malformed file.
  static NaiveBayesClassifier load(const std::string& path);
  void save(const std::string& path) const;

  ClassifierTask task() const { return task_; }

  /// Most probable label and its posterior probability.
  std::pair<std::string, double> predict(const std::string& text) const;

  /// Both roles are answered from the trained label set; a model trained for
  /// one task throws BackendError when asked for the other.
  std::vector<NeutralityVerdict> neutrality(std::span<const std::string> texts) const override;
  std::vector<PolarityVerdict> polarity(std::span<const std::string> texts) const override;

 private:
  struct ClassModel {
    std::size_t documents = 0;
    std::size_t tokens = 0;
    std::map<std::string, std::size_t> counts;
  };

  std::vector<std::string> tokenize(const std::string& text) const;

  ClassifierTask task_;
  std::size_t max_tokens_;
  std::size_t total_documents_ = 0;
  std::map<std::string, ClassModel> classes_;
  std::map<std::string, std::size_t> vocabulary_;
};

class NaiveBayesTrainer final : public TrainingBackend {
 public:
  static constexpr std::string_view kModelFileName = "naive_bayes.json";

  std::string name() const override { return "naive-bayes"; }
  TrainedModel fit(const TrainingConfig& config, const LabeledSplits& splits,
                   const std::string& output_dir) const override;
};

}  // namespace empath_eval
