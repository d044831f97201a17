#include "empath_eval/validation.hpp"

#include <algorithm>
#include <cctype>
#include <tuple>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <stdexcept>

#include "empath_eval/error.hpp"

namespace empath_eval {
namespace {

// Human means are compared at the same precision evaluator reports carry.
constexpr int kReportPrecision = 4;

bool is_constant(std::span<const double> values) {
  return std::all_of(values.begin(), values.end(), [&](double v) { return v == values.front(); });
}

std::string fixed4(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", value);
  return buf;
}

std::string fixed4(const std::optional<double>& value) { return value ? fixed4(*value) : std::string("-"); }

nlohmann::ordered_json optional_number(const std::optional<double>& value) {
  return value ? nlohmann::ordered_json(*value) : nlohmann::ordered_json(nullptr);
}

std::string status_name(CorrelationStatus status) { return status == CorrelationStatus::kOk ? "ok" : "degenerate"; }

Rational parse_grade(const nlohmann::json& value, const std::string& where) {
  if (!value.is_number()) throw DataError(where + ": field 'rating' must be 0, 0.5 or 1");
  const double r = value.get<double>();
  if (r == 0.0) return Rational(0);
  if (r == 0.5) return Rational(1, 2);
  if (r == 1.0) return Rational(1);
  throw DataError(where + ": rating " + value.dump() + " is off the {0, 0.5, 1} grid");
}

void check_responders(const std::map<std::string, EvaluatorScores>& evaluator, const HumanRatings& human) {
  for (const auto& [name, scores] : evaluator) {
    if (!human.values.count(name)) {
      throw DataError("responder \"" + name + "\" has evaluator scores but no " + std::string(to_string(human.level)) +
                      "-level human ratings");
    }
  }
  for (const auto& [name, mean] : human.values) {
    if (!evaluator.count(name)) {
      throw DataError("responder \"" + name + "\" has " + std::string(to_string(human.level)) +
                      "-level human ratings but no evaluator scores");
    }
  }
}

}  // namespace

CorrelationResult pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw std::invalid_argument("pearson: series lengths differ (" + std::to_string(x.size()) + " vs " +
                                std::to_string(y.size()) + ")");
  }
  if (x.size() < 2) throw std::invalid_argument("pearson: need at least two paired points");

  CorrelationResult result;
  result.n = x.size();
  result.series_x.assign(x.begin(), x.end());
  result.series_y.assign(y.begin(), y.end());
  if (is_constant(x) || is_constant(y)) {
    result.status = CorrelationStatus::kDegenerate;
    return result;
  }

  // Two-pass centred form in extended precision.
  long double mean_x = 0;
  long double mean_y = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mean_x += x[i];
    mean_y += y[i];
  }
  mean_x /= static_cast<long double>(x.size());
  mean_y /= static_cast<long double>(y.size());

  long double sxy = 0;
  long double sxx = 0;
  long double syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const long double dx = x[i] - mean_x;
    const long double dy = y[i] - mean_y;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  const long double r = sxy / std::sqrt(sxx * syy);
  result.r = std::clamp(static_cast<double>(r), -1.0, 1.0);
  return result;
}

std::string_view to_string(RatingLevel level) { return level == RatingLevel::kSentence ? "sentence" : "dialogue"; }

Rational RatedItem::pooled() const {
  Rational sum;
  for (const auto& g : grades) sum += g;
  return sum / Rational(static_cast<std::int64_t>(grades.size()));
}

HumanRatingsByLevel ingest_human_ratings(std::istream& in, const std::string& source_name) {
  HumanRatingsByLevel out;
  // (level, responder, conversation, index) -> position in raw[responder]
  std::map<std::tuple<RatingLevel, std::string, std::string, std::optional<long long>>, std::size_t> positions;
  std::map<std::tuple<RatingLevel, std::string, std::string, std::optional<long long>>, std::set<std::string>> raters;

  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); })) continue;
    const std::string where = source_name + ":" + std::to_string(line_number);
    nlohmann::json record;
    try {
      record = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw DataError(where + ": invalid JSON: " + e.what());
    }
    if (!record.is_object()) throw DataError(where + ": expected a JSON object");

    auto string_field = [&](const char* key) {
      auto it = record.find(key);
      if (it == record.end() || !it->is_string() || it->get<std::string>().empty()) {
        throw DataError(where + ": field '" + key + "' must be a non-empty string");
      }
      return it->get<std::string>();
    };
    const std::string responder = string_field("responder");
    const std::string level_name = string_field("level");
    const std::string conversation = string_field("conversation");

    RatingLevel level;
    if (level_name == "sentence") {
      level = RatingLevel::kSentence;
    } else if (level_name == "dialogue") {
      level = RatingLevel::kDialogue;
    } else {
      throw DataError(where + ": field 'level' must be \"sentence\" or \"dialogue\"");
    }

    std::optional<long long> index;
    if (auto it = record.find("index"); it != record.end() && !it->is_null()) {
      if (!it->is_number_integer() || it->get<long long>() < 0) {
        throw DataError(where + ": field 'index' must be a non-negative integer or null");
      }
      index = it->get<long long>();
    }
    if (level == RatingLevel::kSentence && !index) {
      throw DataError(where + ": sentence-level ratings need a turn 'index'");
    }

    auto rating_it = record.find("rating");
    if (rating_it == record.end()) throw DataError(where + ": field 'rating' is missing");
    const Rational grade = parse_grade(*rating_it, where);

    std::optional<std::string> rater;
    if (auto it = record.find("rater"); it != record.end() && !it->is_null()) {
      if (!it->is_string()) throw DataError(where + ": field 'rater' must be a string or null");
      rater = it->get<std::string>();
    }

    HumanRatings& ratings = out[level];
    ratings.level = level;
    auto key = std::make_tuple(level, responder, conversation, index);
    if (rater && !raters[key].insert(*rater).second) {
      throw DataError(where + ": rater \"" + *rater + "\" already rated this item");
    }
    auto& items = ratings.raw[responder];
    auto [pos, inserted] = positions.emplace(key, items.size());
    if (inserted) items.push_back({conversation, index, {}});
    items[pos->second].grades.push_back(grade);
  }

  for (auto& [level, ratings] : out) {
    for (const auto& [responder, items] : ratings.raw) {
      Rational sum;
      for (const auto& item : items) sum += item.pooled();
      ratings.values[responder] = sum / Rational(static_cast<std::int64_t>(items.size()));
    }
  }
  return out;
}

HumanRatingsByLevel ingest_human_ratings_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open ratings file: " + path);
  return ingest_human_ratings(in, path);
}

ValidationReport validate_evaluator(const std::map<std::string, EvaluatorScores>& evaluator,
                                    const HumanRatingsByLevel& human) {
  auto sentence_it = human.find(RatingLevel::kSentence);
  if (sentence_it == human.end()) throw DataError("human ratings contain no sentence-level ratings");
  check_responders(evaluator, sentence_it->second);

  const HumanRatings* dialogue = nullptr;
  if (auto it = human.find(RatingLevel::kDialogue); it != human.end()) {
    dialogue = &it->second;
    check_responders(evaluator, *dialogue);
  }

  // std::map iterates in name order, which is the canonical pairing order.
  ValidationReport report;
  std::vector<double> ex;
  std::vector<double> hx;
  std::vector<double> ed;
  std::vector<double> hd;
  for (const auto& [name, scores] : evaluator) {
    ValidationRow row;
    row.responder = name;
    row.evaluator_sentence = scores.sentence;
    row.human_sentence = sentence_it->second.values.at(name).round_half_up(kReportPrecision);
    ex.push_back(row.evaluator_sentence);
    hx.push_back(row.human_sentence);
    row.evaluator_dialogue = scores.dialogue;
    if (dialogue) {
      if (!scores.dialogue) {
        throw DataError("responder \"" + name + "\" has dialogue-level human ratings but no evaluator dialogue score");
      }
      row.human_dialogue = dialogue->values.at(name).round_half_up(kReportPrecision);
      ed.push_back(*scores.dialogue);
      hd.push_back(*row.human_dialogue);
    }
    report.rows.push_back(std::move(row));
  }
  report.sentence = pearson(ex, hx);
  if (dialogue) report.dialogue = pearson(ed, hd);
  return report;
}

nlohmann::ordered_json validation_report_to_json(const ValidationReport& report) {
  nlohmann::ordered_json j;
  j["rows"] = nlohmann::ordered_json::array();
  for (const auto& row : report.rows) {
    j["rows"].push_back({{"responder", row.responder},
                         {"evaluator_sentence", row.evaluator_sentence},
                         {"human_sentence", row.human_sentence},
                         {"human_dialogue", optional_number(row.human_dialogue)},
                         {"evaluator_dialogue", optional_number(row.evaluator_dialogue)}});
  }
  j["pearson_sentence"] = optional_number(report.sentence.r);
  j["pearson_sentence_status"] = status_name(report.sentence.status);
  if (report.dialogue) {
    j["pearson_dialogue"] = optional_number(report.dialogue->r);
    j["pearson_dialogue_status"] = status_name(report.dialogue->status);
  } else {
    j["pearson_dialogue"] = nullptr;
  }
  j["n"] = report.sentence.n;
  return j;
}

void write_validation_text(std::ostream& out, const ValidationReport& report) {
  out << "| Response by | Evaluator Score (sentence level) | Human Rating (sentence level) "
         "| Evaluator Score (dialogue level) | Human Rating (dialogue level) |\n";
  out << "|---|---|---|---|---|\n";
  for (const auto& row : report.rows) {
    out << "| " << row.responder << " | " << fixed4(row.evaluator_sentence) << " | " << fixed4(row.human_sentence)
        << " | " << fixed4(row.evaluator_dialogue) << " | " << fixed4(row.human_dialogue) << " |\n";
  }
  auto line = [&out](const char* name, const CorrelationResult& c) {
    out << name << ": ";
    if (c.r) {
      out << fixed4(*c.r);
    } else {
      out << "undefined (constant series)";
    }
    out << " (n = " << c.n << ")\n";
  };
  line("pearson_sentence", report.sentence);
  if (report.dialogue) line("pearson_dialogue", *report.dialogue);
}

}  // namespace empath_eval
