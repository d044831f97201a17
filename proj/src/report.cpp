#include "empath_eval/report.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <ostream>

#include "empath_eval/error.hpp"

namespace empath_eval {
namespace {

std::string csv_field(const std::string& value) {
  if (value.find_first_of(",\"\n\r") == std::string::npos) return value;
  std::string out = "\"";
  for (char c : value) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

double read_number(const nlohmann::json& doc, const char* key, const std::string& where) {
  auto it = doc.find(key);
  if (it == doc.end() || !it->is_number()) throw DataError(where + ": field '" + key + "' must be a number");
  const double v = it->get<double>();
  if (!(v >= 0.0 && v <= 1.0)) throw DataError(where + ": field '" + key + "' must lie in [0, 1]");
  return v;
}

}  // namespace

nlohmann::ordered_json score_report_to_json(const ScoreReport& report) {
  nlohmann::ordered_json j;
  j["responder"] = report.responder;
  j["mean"] = report.score.mean().round_half_up(4);
  j["scored_turns"] = report.score.scored_turns;
  j["skipped"] = report.score.skipped_neutral_user_turns;
  if (report.dialogue) {
    const auto& d = *report.dialogue;
    j["dialogue"] = {{"max", d.corpus_max.round_half_up(4)},
                     {"min", d.corpus_min.round_half_up(4)},
                     {"mid", d.corpus_mid.round_half_up(4)},
                     {"conversations", d.scored_conversations},
                     {"excluded", d.excluded_conversations}};
  } else {
    j["dialogue"] = nullptr;
  }
  j["per_turn"] = nlohmann::ordered_json::array();
  for (const auto& turn : report.score.per_turn) {
    j["per_turn"].push_back({{"conversation", turn.conversation},
                             {"index", turn.index},
                             {"value", turn.score.value().to_double()},
                             {"reason", std::string(to_string(turn.score.reason))}});
  }
  return j;
}

void write_score_csv(std::ostream& out, const ScoreReport& report) {
  out << "conversation,index,value,reason\n";
  for (const auto& turn : report.score.per_turn) {
    out << csv_field(turn.conversation) << ',' << turn.index << ',' << turn.score.value().to_fixed(1) << ','
        << to_string(turn.score.reason) << '\n';
  }
}

void write_score_markdown(std::ostream& out, std::span<const ScoreReport> reports) {
  const bool dialogue =
      !reports.empty() && std::all_of(reports.begin(), reports.end(), [](const auto& r) { return r.dialogue.has_value(); });
  if (dialogue) {
    out << "| Response by | Evaluator Score (sentence level) | Evaluator Score (dialogue level-max) "
           "| Evaluator Score (dialogue level-min) | Evaluator Score (dialogue level-mid) |\n";
    out << "|---|---|---|---|---|\n";
  } else {
    out << "| Response by | Evaluator Score |\n";
    out << "|---|---|\n";
  }
  for (const auto& r : reports) {
    out << "| " << r.responder << " | " << r.score.mean().to_fixed(4);
    if (dialogue) {
      out << " | " << r.dialogue->corpus_max.to_fixed(4) << " | " << r.dialogue->corpus_min.to_fixed(4) << " | "
          << r.dialogue->corpus_mid.to_fixed(4);
    }
    out << " |\n";
  }
}

ScoreSummary read_score_summary(const nlohmann::json& doc, const std::string& fallback_responder) {
  const std::string where = "score report \"" + fallback_responder + "\"";
  if (!doc.is_object()) throw DataError(where + ": expected a JSON object");
  ScoreSummary summary;
  summary.responder = fallback_responder;
  if (auto it = doc.find("responder"); it != doc.end() && !it->is_null()) {
    if (!it->is_string() || it->get<std::string>().empty()) {
      throw DataError(where + ": field 'responder' must be a non-empty string");
    }
    summary.responder = it->get<std::string>();
  }
  summary.mean = read_number(doc, "mean", where);
  if (auto it = doc.find("dialogue"); it != doc.end() && !it->is_null()) {
    if (!it->is_object()) throw DataError(where + ": field 'dialogue' must be an object or null");
    summary.dialogue_max = read_number(*it, "max", where + " dialogue");
    summary.dialogue_min = read_number(*it, "min", where + " dialogue");
    summary.dialogue_mid = read_number(*it, "mid", where + " dialogue");
  }
  return summary;
}

ScoreSummary read_score_summary_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open score report: " + path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(path + ": invalid JSON: " + e.what());
  }
  return read_score_summary(doc, std::filesystem::path(path).stem().string());
}

}  // namespace empath_eval
