#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "empath_eval/scoring.hpp"

namespace empath_eval {

/// Everything one evaluation run produced for a single responder.
struct ScoreReport {
  std::string responder;
  CorpusScore score;
  std::optional<DialogueAggregate> dialogue;
};

/// Score report document. Decimal values are rounded half-up to 4 places
/// from exact arithmetic.
nlohmann::ordered_json score_report_to_json(const ScoreReport& report);

/// One CSV row per scored turn: conversation,index,value,reason.
void write_score_csv(std::ostream& out, const ScoreReport& report);

/// Markdown table with one row per responder: sentence-level score followed
/// by the dialogue-level max / min / mid columns when available.
void write_score_markdown(std::ostream& out, std::span<const ScoreReport> reports);

/// The fields validation needs from a score report document.
struct ScoreSummary {
  std::string responder;
  double mean = 0.0;
  std::optional<double> dialogue_max;
  std::optional<double> dialogue_min;
  std::optional<double> dialogue_mid;
};

/// Reads a score report document. `fallback_responder` is used when the
/// document has no "responder" field. Throws DataError on schema violations.
ScoreSummary read_score_summary(const nlohmann::json& doc, const std::string& fallback_responder);
ScoreSummary read_score_summary_file(const std::string& path);

}  // namespace empath_eval
