#include "empath_eval/classifiers.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "empath_eval/error.hpp"

namespace empath_eval {
namespace {

std::string lower(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

bool is_blank(const std::string& text) {
  return std::all_of(text.begin(), text.end(), [](unsigned char c) { return std::isspace(c); });
}

std::vector<std::size_t> index_range(std::size_t from, std::size_t to) {
  std::vector<std::size_t> out;
  out.reserve(to - from);
  for (std::size_t i = from; i < to; ++i) out.push_back(i);
  return out;
}

template <typename Verdict, typename Call>
std::vector<Verdict> classify_batched(std::span<const std::string> texts, std::size_t batch_size,
                                      std::string_view task, Call&& call) {
  for (std::size_t i = 0; i < texts.size(); ++i) {
    if (is_blank(texts[i])) {
      throw DataError(std::string(task) + " classification: text at index " + std::to_string(i) + " is empty");
    }
  }
  const std::size_t step = batch_size == 0 ? std::max<std::size_t>(texts.size(), 1) : batch_size;
  std::vector<Verdict> out;
  out.reserve(texts.size());
  for (std::size_t begin = 0; begin < texts.size(); begin += step) {
    const std::size_t end = std::min(texts.size(), begin + step);
    std::vector<Verdict> batch;
    try {
      batch = call(texts.subspan(begin, end - begin));
    } catch (const std::exception& e) {
      throw ClassificationError(std::string(task) + " backend failed on texts [" + std::to_string(begin) + ", " +
                                    std::to_string(texts.size()) + "): " + e.what(),
                                index_range(begin, texts.size()));
    }
    if (batch.size() != end - begin) {
      throw ClassificationError(std::string(task) + " backend returned " + std::to_string(batch.size()) +
                                    " verdicts for " + std::to_string(end - begin) + " texts",
                                index_range(begin, texts.size()));
    }
    for (std::size_t i = 0; i < batch.size(); ++i) {
      const double c = batch[i].confidence;
      if (!(c >= 0.0 && c <= 1.0)) {
        throw ClassificationError(std::string(task) + " backend returned confidence " + std::to_string(c) +
                                      " outside [0, 1] for index " + std::to_string(begin + i),
                                  index_range(begin, texts.size()));
      }
    }
    out.insert(out.end(), batch.begin(), batch.end());
  }
  return out;
}

void check_alphabet(ClassifierTask task, std::span<const LabeledExample> examples, std::string_view split) {
  const auto& alphabet = task_alphabet(task);
  for (std::size_t i = 0; i < examples.size(); ++i) {
    if (std::find(alphabet.begin(), alphabet.end(), examples[i].label) == alphabet.end()) {
      throw DataError(std::string(split) + " example " + std::to_string(i) + " has label \"" + examples[i].label +
                      "\" outside the " + std::string(to_string(task)) + " alphabet");
    }
  }
}

}  // namespace

std::string_view to_string(Neutrality label) {
  return label == Neutrality::kNeutral ? "neutral" : "non_neutral";
}

std::string_view to_string(Polarity label) { return label == Polarity::kPositive ? "positive" : "negative"; }

Neutrality parse_neutrality(std::string_view text) {
  const std::string l = lower(text);
  if (l == "neutral") return Neutrality::kNeutral;
  if (l == "non_neutral" || l == "non-neutral") return Neutrality::kNonNeutral;
  throw DataError("unknown neutrality label \"" + std::string(text) + "\"");
}

Polarity parse_polarity(std::string_view text) {
  const std::string l = lower(text);
  if (l == "positive") return Polarity::kPositive;
  if (l == "negative") return Polarity::kNegative;
  throw DataError("unknown polarity label \"" + std::string(text) + "\"");
}

std::string_view to_string(ClassifierTask task) {
  return task == ClassifierTask::kNeutrality ? "neutrality" : "polarity";
}

ClassifierTask parse_task(std::string_view text) {
  const std::string l = lower(text);
  if (l == "neutrality") return ClassifierTask::kNeutrality;
  if (l == "polarity") return ClassifierTask::kPolarity;
  throw DataError("unknown classifier task \"" + std::string(text) + "\"");
}

const std::vector<std::string>& task_alphabet(ClassifierTask task) {
  static const std::vector<std::string> neutrality{"neutral", "non_neutral"};
  static const std::vector<std::string> polarity{"positive", "negative"};
  return task == ClassifierTask::kNeutrality ? neutrality : polarity;
}

std::vector<NeutralityVerdict> classify_neutrality(std::span<const std::string> texts,
                                                   const ClassifierBackend& backend, std::size_t batch_size) {
  return classify_batched<NeutralityVerdict>(texts, batch_size, "neutrality",
                                             [&](std::span<const std::string> b) { return backend.neutrality(b); });
}

std::vector<PolarityVerdict> classify_polarity(std::span<const std::string> texts, const ClassifierBackend& backend,
                                               std::size_t batch_size) {
  return classify_batched<PolarityVerdict>(texts, batch_size, "polarity",
                                           [&](std::span<const std::string> b) { return backend.polarity(b); });
}

// ---------------------------------------------------------------------------

void TrainingConfig::validate() const {
  if (base_model_id.empty()) throw DataError("training config: base_model_id is empty");
  if (max_sequence_length <= 0) throw DataError("training config: max_sequence_length must be positive");
  if (batch_size_per_device <= 0) throw DataError("training config: batch_size_per_device must be positive");
  if (!(learning_rate > 0.0)) throw DataError("training config: learning_rate must be positive");
  if (epochs <= 0) throw DataError("training config: epochs must be positive");
}

std::string training_config_to_json(const TrainingConfig& config) {
  nlohmann::ordered_json j;
  j["base_model_id"] = config.base_model_id;
  j["max_sequence_length"] = config.max_sequence_length;
  j["batch_size_per_device"] = config.batch_size_per_device;
  j["learning_rate"] = config.learning_rate;
  j["epochs"] = config.epochs;
  j["task"] = std::string(to_string(config.task));
  return j.dump(2);
}

TrainingConfig training_config_from_json(std::string_view json_text) {
  static const std::set<std::string> kFields{"base_model_id", "max_sequence_length", "batch_size_per_device",
                                             "learning_rate", "epochs", "task"};
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(std::string("training config: ") + e.what());
  }
  if (!j.is_object()) throw DataError("training config: expected a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!kFields.count(key)) throw DataError("training config: unknown field \"" + key + "\"");
  }
  for (const auto& field : kFields) {
    if (!j.contains(field)) throw DataError("training config: missing field \"" + field + "\"");
  }
  TrainingConfig config;
  try {
    config.base_model_id = j.at("base_model_id").get<std::string>();
    config.max_sequence_length = j.at("max_sequence_length").get<int>();
    config.batch_size_per_device = j.at("batch_size_per_device").get<int>();
    config.learning_rate = j.at("learning_rate").get<double>();
    config.epochs = j.at("epochs").get<int>();
    config.task = parse_task(j.at("task").get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("training config: ") + e.what());
  }
  config.validate();
  return config;
}

std::string_view to_string(EvalSplit split) { return split == EvalSplit::kValidation ? "validation" : "test"; }

AccuracyReport evaluate_classifier(const ClassifierBackend& backend, ClassifierTask task,
                                   std::span<const LabeledExample> examples, EvalSplit split) {
  if (examples.empty()) throw DataError("cannot evaluate on an empty " + std::string(to_string(split)) + " split");
  check_alphabet(task, examples, to_string(split));

  std::vector<std::string> texts;
  texts.reserve(examples.size());
  for (const auto& e : examples) texts.push_back(e.text);

  std::vector<std::string> predicted;
  predicted.reserve(examples.size());
  if (task == ClassifierTask::kNeutrality) {
    for (const auto& v : classify_neutrality(texts, backend)) predicted.emplace_back(to_string(v.label));
  } else {
    for (const auto& v : classify_polarity(texts, backend)) predicted.emplace_back(to_string(v.label));
  }

  AccuracyReport report;
  report.split = split;
  report.total = examples.size();
  for (std::size_t i = 0; i < examples.size(); ++i) {
    auto& counts = report.per_class[examples[i].label];
    ++counts.total;
    if (predicted[i] == examples[i].label) {
      ++counts.correct;
      ++report.correct;
    }
  }
  return report;
}

TrainingResult train_classifier(const LabeledSplits& splits, const TrainingConfig& config,
                                const TrainingBackend* backend, const std::string& output_dir) {
  if (backend == nullptr) throw BackendError("training backend not configured");
  config.validate();
  check_alphabet(config.task, splits.train, "train");
  check_alphabet(config.task, splits.validation, "validation");
  check_alphabet(config.task, splits.test, "test");
  if (splits.train.empty()) throw DataError("cannot train on an empty train split");

  std::filesystem::create_directories(output_dir);
  TrainingResult result;
  result.config = config;
  result.model = backend->fit(config, splits, output_dir);
  if (!result.model.classifier) throw BackendError(backend->name() + " returned no classifier");

  std::filesystem::path config_dir = result.model.artifact.location;
  if (!std::filesystem::is_directory(config_dir)) config_dir = output_dir;
  std::ofstream out(config_dir / kTrainingConfigFileName);
  if (!out) throw BackendError("cannot write " + (config_dir / kTrainingConfigFileName).string());
  out << training_config_to_json(config) << '\n';

  result.validation = evaluate_classifier(*result.model.classifier, config.task, splits.validation,
                                          EvalSplit::kValidation);
  result.test = evaluate_classifier(*result.model.classifier, config.task, splits.test, EvalSplit::kTest);
  return result;
}

}  // namespace empath_eval
