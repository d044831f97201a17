#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace empath_eval {

enum class Neutrality { kNeutral, kNonNeutral };
enum class Polarity { kPositive, kNegative };

std::string_view to_string(Neutrality label);
std::string_view to_string(Polarity label);
/// Accepts "neutral"/"non_neutral" (also "non-neutral"), case-insensitive.
Neutrality parse_neutrality(std::string_view text);
Polarity parse_polarity(std::string_view text);

struct NeutralityVerdict {
  Neutrality label = Neutrality::kNeutral;
  double confidence = 1.0;

  friend bool operator==(const NeutralityVerdict&, const NeutralityVerdict&) = default;
};

struct PolarityVerdict {
  Polarity label = Polarity::kNegative;
  double confidence = 1.0;

  friend bool operator==(const PolarityVerdict&, const PolarityVerdict&) = default;
};

enum class ClassifierTask { kNeutrality, kPolarity };

std::string_view to_string(ClassifierTask task);
ClassifierTask parse_task(std::string_view text);

/// Label strings a task may produce or be trained on.
const std::vector<std::string>& task_alphabet(ClassifierTask task);

/// A model able to answer both classifier roles. Implementations must be
/// safe for concurrent callers and return exactly one verdict per text.
class ClassifierBackend {
 public:
  virtual ~ClassifierBackend() = default;

  virtual std::vector<NeutralityVerdict> neutrality(std::span<const std::string> texts) const = 0;
  virtual std::vector<PolarityVerdict> polarity(std::span<const std::string> texts) const = 0;
};

/// Neutral/non-neutral gate over `texts`, in input order. `batch_size` of 0
/// sends everything in one backend call. Throws DataError for blank texts and
/// ClassificationError (with the unclassified indices) when the backend fails
/// or returns a malformed batch.
std::vector<NeutralityVerdict> classify_neutrality(std::span<const std::string> texts,
                                                   const ClassifierBackend& backend, std::size_t batch_size = 0);

/// Positive/negative polarity over `texts`; same contract as classify_neutrality.
std::vector<PolarityVerdict> classify_polarity(std::span<const std::string> texts, const ClassifierBackend& backend,
                                               std::size_t batch_size = 0);

// ---------------------------------------------------------------------------
// Training and evaluation contract

struct LabeledExample {
  std::string text;
  std::string label;
};

struct LabeledSplits {
  std::vector<LabeledExample> train;
  std::vector<LabeledExample> validation;
  std::vector<LabeledExample> test;
};

struct TrainingConfig {
  std::string base_model_id = "roberta-base";
  int max_sequence_length = 128;
  int batch_size_per_device = 32;
  double learning_rate = 1e-5;
  int epochs = 3;
  ClassifierTask task = ClassifierTask::kNeutrality;

  /// Throws DataError when a numeric field is not positive or the id is empty.
  void validate() const;

  friend bool operator==(const TrainingConfig&, const TrainingConfig&) = default;
};

std::string training_config_to_json(const TrainingConfig& config);
/// Rejects missing and unknown fields.
TrainingConfig training_config_from_json(std::string_view json_text);

enum class EvalSplit { kValidation, kTest };

std::string_view to_string(EvalSplit split);

struct ClassCounts {
  std::size_t correct = 0;
  std::size_t total = 0;
};

/// Counts are the ground truth; accuracy() is derived from them.
struct AccuracyReport {
  EvalSplit split = EvalSplit::kTest;
  std::size_t correct = 0;
  std::size_t total = 0;
  std::map<std::string, ClassCounts> per_class;

  double accuracy() const { return static_cast<double>(correct) / static_cast<double>(total); }
};

/// Runs `backend` in the role selected by `task` over `examples` and compares
/// against the gold labels. Throws DataError for an empty split or a gold
/// label outside the task alphabet.
AccuracyReport evaluate_classifier(const ClassifierBackend& backend, ClassifierTask task,
                                   std::span<const LabeledExample> examples, EvalSplit split);

/// Opaque handle to a trained model; `location` is backend-defined (usually a
/// directory).
struct ArtifactRef {
  std::string backend;
  std::string location;
};

struct TrainedModel {
  ArtifactRef artifact;
  std::shared_ptr<const ClassifierBackend> classifier;
};

/// Any fine-tuning engine. `fit` trains on splits.train (validation is
/// available for early stopping) and writes its artifact under `output_dir`.
class TrainingBackend {
 public:
  virtual ~TrainingBackend() = default;

  virtual std::string name() const = 0;
  virtual TrainedModel fit(const TrainingConfig& config, const LabeledSplits& splits,
                           const std::string& output_dir) const = 0;
};

struct TrainingResult {
  TrainedModel model;
  TrainingConfig config;
  AccuracyReport validation;
  AccuracyReport test;
};

inline constexpr std::string_view kTrainingConfigFileName = "training_config.json";

/// Validates labels against the task alphabet, delegates fitting to `backend`,
/// scores validation and test, and writes the config used next to the
/// artifact as training_config.json. A null backend raises BackendError
/// "training backend not configured".
TrainingResult train_classifier(const LabeledSplits& splits, const TrainingConfig& config,
                                const TrainingBackend* backend, const std::string& output_dir);

}  // namespace empath_eval
