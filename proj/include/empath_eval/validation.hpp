#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "empath_eval/exact.hpp"

namespace empath_eval {

enum class CorrelationStatus { kOk, kDegenerate };

struct CorrelationResult {
  CorrelationStatus status = CorrelationStatus::kOk;
  /// Unset when status is kDegenerate (a constant series).
  std::optional<double> r;
  std::size_t n = 0;
  std::vector<double> series_x;
  std::vector<double> series_y;
};

/// Pearson product-moment coefficient. Throws std::invalid_argument for
/// mismatched lengths or fewer than two points; a constant series yields
/// kDegenerate instead of NaN.
CorrelationResult pearson(std::span<const double> x, std::span<const double> y);

enum class RatingLevel { kSentence, kDialogue };

std::string_view to_string(RatingLevel level);

/// One rated item: a turn (sentence level) or a conversation (dialogue level).
struct RatedItem {
  std::string conversation;
  std::optional<long long> index;
  /// Grades from each rater, in file order.
  std::vector<Rational> grades;

  Rational pooled() const;
};

struct HumanRatings {
  RatingLevel level = RatingLevel::kSentence;
  /// responder -> mean rating; exact mean of the pooled item grades.
  std::map<std::string, Rational> values;
  /// responder -> rated items in first-seen order.
  std::map<std::string, std::vector<RatedItem>> raw;
};

using HumanRatingsByLevel = std::map<RatingLevel, HumanRatings>;

/// Reads ratings JSONL. Grades must be 0, 0.5 or 1; several raters on the
/// same item are mean-pooled before averaging over items. Throws DataError
/// with the line number on any violation.
HumanRatingsByLevel ingest_human_ratings(std::istream& in, const std::string& source_name = "ratings");
HumanRatingsByLevel ingest_human_ratings_file(const std::string& path);

struct EvaluatorScores {
  double sentence = 0.0;
  std::optional<double> dialogue;
};

struct ValidationRow {
  std::string responder;
  double evaluator_sentence = 0.0;
  double human_sentence = 0.0;
  std::optional<double> evaluator_dialogue;
  std::optional<double> human_dialogue;
};

struct ValidationReport {
  /// Sorted by responder name.
  std::vector<ValidationRow> rows;
  CorrelationResult sentence;
  std::optional<CorrelationResult> dialogue;
};

/// Pairs evaluator and human series by responder (sorted by name) and
/// correlates them at sentence level, and at dialogue level when both sides
/// provide it. A responder on only one side is a DataError naming it.
ValidationReport validate_evaluator(const std::map<std::string, EvaluatorScores>& evaluator,
                                    const HumanRatingsByLevel& human);

nlohmann::ordered_json validation_report_to_json(const ValidationReport& report);
/// Human-readable table plus the correlation lines, always with n.
void write_validation_text(std::ostream& out, const ValidationReport& report);

}  // namespace empath_eval
