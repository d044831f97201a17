#include "empath_eval/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <limits>
#include <random>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "empath_eval/error.hpp"

namespace empath_eval {
namespace {

using nlohmann::json;

bool is_blank(std::string_view text) {
  return std::all_of(text.begin(), text.end(), [](unsigned char c) { return std::isspace(c); });
}

class RecordReader {
 public:
  RecordReader(const std::string& source, std::size_t line) : source_(source), line_(line) {}

  [[noreturn]] void fail(const std::string& field, const std::string& problem) const {
    throw DataError(source_ + ":" + std::to_string(line_) + ": field '" + field + "' " + problem);
  }

  const json& member(const json& object, const std::string& key, const std::string& path) const {
    auto it = object.find(key);
    if (it == object.end()) fail(path, "is missing");
    return *it;
  }

  std::string text(const json& value, const std::string& path) const {
    if (!value.is_string()) fail(path, "must be a string");
    auto s = value.get<std::string>();
    if (is_blank(s)) fail(path, "must be non-empty after trimming");
    return s;
  }

 private:
  const std::string& source_;
  std::size_t line_;
};

Conversation parse_record(const json& record, const RecordReader& reader) {
  if (!record.is_object()) reader.fail("<record>", "must be a JSON object");
  Conversation conv;
  conv.id = reader.text(reader.member(record, "id", "id"), "id");
  const std::string source = reader.text(reader.member(record, "source", "source"), "source");

  const json& turns = reader.member(record, "turns", "turns");
  if (!turns.is_array()) reader.fail("turns", "must be an array");
  if (turns.empty()) reader.fail("turns", "must contain at least one turn");

  for (std::size_t i = 0; i < turns.size(); ++i) {
    const std::string prefix = "turns[" + std::to_string(i) + "]";
    const json& t = turns[i];
    if (!t.is_object()) reader.fail(prefix, "must be an object");

    Turn turn;
    const json& user = reader.member(t, "user", prefix + ".user");
    if (!user.is_object()) reader.fail(prefix + ".user", "must be an object");
    turn.user.text = reader.text(reader.member(user, "text", prefix + ".user.text"), prefix + ".user.text");
    turn.user.speaker = Speaker::kUser;
    turn.user.source = source;
    if (auto label = user.find("label"); label != user.end() && !label->is_null()) {
      if (!label->is_string()) reader.fail(prefix + ".user.label", "must be a string or null");
      std::string normalized = normalize_label(label->get<std::string>());
      if (normalized.empty()) reader.fail(prefix + ".user.label", "must be non-empty when present");
      turn.user.raw_label = std::move(normalized);
    }

    if (auto response = t.find("response"); response != t.end() && !response->is_null()) {
      if (!response->is_object()) reader.fail(prefix + ".response", "must be an object or null");
      Utterance reply;
      reply.text = reader.text(reader.member(*response, "text", prefix + ".response.text"), prefix + ".response.text");
      const json& speaker = reader.member(*response, "speaker", prefix + ".response.speaker");
      const std::string s = speaker.is_string() ? speaker.get<std::string>() : std::string();
      if (s == "bot") {
        reply.speaker = Speaker::kBot;
      } else if (s == "human") {
        reply.speaker = Speaker::kHumanResponder;
      } else {
        reader.fail(prefix + ".response.speaker", "must be \"bot\" or \"human\"");
      }
      reply.source = source;
      turn.response = std::move(reply);
    }
    conv.turns.push_back(std::move(turn));
  }
  return conv;
}

std::string conversation_source(const Conversation& conv) {
  return conv.turns.empty() ? std::string() : conv.turns.front().user.source;
}

// Uniform integer in [0, bound] from raw 64-bit draws (rejection sampling),
// so results do not depend on the standard library's distributions.
std::uint64_t uniform_up_to(std::mt19937_64& rng, std::uint64_t bound) {
  if (bound == 0) return 0;
  const std::uint64_t range = bound + 1;
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % range;
  std::uint64_t draw;
  do {
    draw = rng();
  } while (draw >= limit);
  return draw % range;
}

}  // namespace

std::string_view to_string(Speaker speaker) {
  switch (speaker) {
    case Speaker::kUser:
      return "user";
    case Speaker::kBot:
      return "bot";
    case Speaker::kHumanResponder:
      return "human";
  }
  return "unknown";
}

std::string normalize_label(std::string_view label) {
  std::size_t begin = 0;
  std::size_t end = label.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(label[begin]))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(label[end - 1]))) --end;
  std::string out(label.substr(begin, end - begin));
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

Corpus read_conversations(std::istream& in, const std::string& source_name) {
  Corpus corpus;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (is_blank(line)) continue;
    RecordReader reader(source_name, line_number);
    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error& e) {
      throw DataError(source_name + ":" + std::to_string(line_number) + ": invalid JSON: " + e.what());
    }
    corpus.push_back(parse_record(record, reader));
  }
  validate_corpus(corpus);
  return corpus;
}

Corpus read_conversations_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open corpus file: " + path);
  return read_conversations(in, path);
}

void write_conversations(std::ostream& out, const Corpus& corpus) {
  for (const auto& conv : corpus) {
    nlohmann::ordered_json record;
    record["id"] = conv.id;
    record["source"] = conversation_source(conv);
    record["turns"] = nlohmann::ordered_json::array();
    for (const auto& turn : conv.turns) {
      nlohmann::ordered_json t;
      t["user"]["text"] = turn.user.text;
      t["user"]["label"] = turn.user.raw_label ? nlohmann::ordered_json(*turn.user.raw_label) : nullptr;
      if (turn.response) {
        t["response"]["text"] = turn.response->text;
        t["response"]["speaker"] = turn.response->speaker == Speaker::kBot ? "bot" : "human";
      } else {
        t["response"] = nullptr;
      }
      record["turns"].push_back(std::move(t));
    }
    out << record.dump() << '\n';
  }
}

void validate_corpus(const Corpus& corpus) {
  std::unordered_map<std::string, std::size_t> seen;
  for (std::size_t c = 0; c < corpus.size(); ++c) {
    const auto& conv = corpus[c];
    if (conv.id.empty()) throw DataError("conversation " + std::to_string(c) + " has an empty id");
    if (auto [it, inserted] = seen.emplace(conv.id, c); !inserted) {
      throw DataError("duplicate conversation id \"" + conv.id + "\"");
    }
    if (conv.turns.empty()) throw DataError("conversation \"" + conv.id + "\" has no turns");
    for (std::size_t t = 0; t < conv.turns.size(); ++t) {
      const auto& turn = conv.turns[t];
      const std::string where = "conversation \"" + conv.id + "\" turn " + std::to_string(t);
      if (turn.user.speaker != Speaker::kUser) throw DataError(where + ": user utterance has a non-user speaker");
      if (is_blank(turn.user.text)) throw DataError(where + ": user text is empty");
      if (turn.response) {
        if (turn.response->speaker == Speaker::kUser) throw DataError(where + ": response speaker is user");
        if (is_blank(turn.response->text)) throw DataError(where + ": response text is empty");
      }
    }
  }
}

Corpus merge_corpora(const std::vector<SourceCollection>& sources) {
  // id -> number of sources containing it
  std::unordered_map<std::string, std::size_t> owners;
  for (const auto& source : sources) {
    std::unordered_map<std::string, bool> local;
    for (const auto& conv : source.conversations) {
      if (!local.emplace(conv.id, true).second) {
        throw DataError("source \"" + source.name + "\": duplicate conversation id \"" + conv.id + "\"");
      }
      ++owners[conv.id];
    }
  }

  Corpus merged;
  for (const auto& source : sources) {
    for (const auto& conv : source.conversations) {
      Conversation copy = conv;
      if (owners[conv.id] > 1) copy.id = source.name + "/" + conv.id;
      for (auto& turn : copy.turns) {
        turn.user.source = source.name;
        if (turn.response) turn.response->source = source.name;
      }
      merged.push_back(std::move(copy));
    }
  }
  validate_corpus(merged);
  return merged;
}

std::set<std::string> label_inventory(const Corpus& corpus) {
  std::set<std::string> labels;
  for (const auto& conv : corpus) {
    for (const auto& turn : conv.turns) {
      if (turn.user.raw_label) labels.insert(*turn.user.raw_label);
      if (turn.response && turn.response->raw_label) labels.insert(*turn.response->raw_label);
    }
  }
  return labels;
}

// ---------------------------------------------------------------------------

std::string_view to_string(LabelPolarity polarity) {
  switch (polarity) {
    case LabelPolarity::kPositive:
      return "positive";
    case LabelPolarity::kNegative:
      return "negative";
    case LabelPolarity::kPerUtterance:
      return "per_utterance";
  }
  return "unknown";
}

const LabelPolarityEntry& LabelPolarityMap::at(std::string_view label) const {
  return entries.at(normalize_label(label));
}

LabelPolarity decide_label_polarity(std::size_t positive, std::size_t negative, double threshold) {
  const std::size_t total = positive + negative;
  if (total == 0) throw DataError("label polarity: label has zero utterances");
  const double p = static_cast<double>(positive) / static_cast<double>(total);
  const double q = static_cast<double>(negative) / static_cast<double>(total);
  if (p > threshold) return LabelPolarity::kPositive;
  if (q > threshold) return LabelPolarity::kNegative;
  return LabelPolarity::kPerUtterance;
}

LabelPolarityMap resolve_label_polarity(const Corpus& corpus, const ClassifierBackend& oracle, double threshold,
                                        const std::optional<std::set<std::string>>& labels) {
  if (!(threshold > 0.5 && threshold <= 1.0)) {
    throw DataError("label polarity threshold must lie in (0.5, 1.0], got " + std::to_string(threshold));
  }
  std::optional<std::set<std::string>> wanted;
  if (labels) {
    wanted.emplace();
    for (const auto& l : *labels) wanted->insert(normalize_label(l));
  }

  std::vector<std::string> texts;
  std::vector<std::string> text_labels;
  auto collect = [&](const Utterance& u) {
    if (!u.raw_label) return;
    if (wanted && !wanted->count(*u.raw_label)) return;
    texts.push_back(u.text);
    text_labels.push_back(*u.raw_label);
  };
  for (const auto& conv : corpus) {
    for (const auto& turn : conv.turns) {
      collect(turn.user);
      if (turn.response) collect(*turn.response);
    }
  }

  const auto verdicts = classify_polarity(texts, oracle);

  LabelPolarityMap map;
  map.threshold = threshold;
  if (wanted) {
    for (const auto& l : *wanted) map.entries[l];
  }
  for (std::size_t i = 0; i < verdicts.size(); ++i) {
    auto& entry = map.entries[text_labels[i]];
    if (verdicts[i].label == Polarity::kPositive) {
      ++entry.positive_count;
    } else {
      ++entry.negative_count;
    }
  }
  for (auto& [label, entry] : map.entries) {
    if (entry.positive_count + entry.negative_count == 0) {
      throw DataError("label polarity: label \"" + label + "\" has zero utterances");
    }
    entry.polarity = decide_label_polarity(entry.positive_count, entry.negative_count, threshold);
  }
  return map;
}

std::string label_polarity_map_to_json(const LabelPolarityMap& map) {
  nlohmann::ordered_json j;
  j["threshold"] = map.threshold;
  j["labels"] = nlohmann::ordered_json::object();
  for (const auto& [label, entry] : map.entries) {
    j["labels"][label] = {{"polarity", std::string(to_string(entry.polarity))},
                          {"positive_count", entry.positive_count},
                          {"negative_count", entry.negative_count}};
  }
  return j.dump(2);
}

LabelPolarityMap label_polarity_map_from_json(std::string_view json_text) {
  LabelPolarityMap map;
  try {
    const auto j = json::parse(json_text);
    map.threshold = j.at("threshold").get<double>();
    for (const auto& [label, entry] : j.at("labels").items()) {
      LabelPolarityEntry e;
      const auto polarity = entry.at("polarity").get<std::string>();
      if (polarity == "positive") {
        e.polarity = LabelPolarity::kPositive;
      } else if (polarity == "negative") {
        e.polarity = LabelPolarity::kNegative;
      } else if (polarity == "per_utterance") {
        e.polarity = LabelPolarity::kPerUtterance;
      } else {
        throw DataError("label polarity map: unknown polarity \"" + polarity + "\" for label \"" + label + "\"");
      }
      e.positive_count = entry.at("positive_count").get<std::size_t>();
      e.negative_count = entry.at("negative_count").get<std::size_t>();
      map.entries[normalize_label(label)] = e;
    }
  } catch (const json::exception& e) {
    throw DataError(std::string("label polarity map: ") + e.what());
  }
  return map;
}

const std::set<std::string>& default_neutral_labels() {
  static const std::set<std::string> labels{"neutral", "no emotion", "none"};
  return labels;
}

std::vector<LabeledExample> neutrality_examples(const Corpus& corpus, const std::set<std::string>& neutral_labels) {
  std::vector<LabeledExample> out;
  for (const auto& conv : corpus) {
    for (const auto& turn : conv.turns) {
      if (!turn.user.raw_label) continue;
      out.push_back({turn.user.text, neutral_labels.count(*turn.user.raw_label) ? "neutral" : "non_neutral"});
    }
  }
  return out;
}

std::vector<LabeledExample> polarity_examples(const Corpus& corpus, const LabelPolarityMap& map,
                                              const ClassifierBackend& oracle,
                                              const std::set<std::string>& neutral_labels) {
  std::vector<LabeledExample> out;
  std::vector<std::size_t> pending;
  for (const auto& conv : corpus) {
    for (const auto& turn : conv.turns) {
      const auto& label = turn.user.raw_label;
      if (!label || neutral_labels.count(*label)) continue;
      auto it = map.entries.find(*label);
      if (it == map.entries.end()) throw DataError("label \"" + *label + "\" missing from the polarity map");
      switch (it->second.polarity) {
        case LabelPolarity::kPositive:
          out.push_back({turn.user.text, "positive"});
          break;
        case LabelPolarity::kNegative:
          out.push_back({turn.user.text, "negative"});
          break;
        case LabelPolarity::kPerUtterance:
          pending.push_back(out.size());
          out.push_back({turn.user.text, ""});
          break;
      }
    }
  }
  std::vector<std::string> texts;
  texts.reserve(pending.size());
  for (auto i : pending) texts.push_back(out[i].text);
  const auto verdicts = classify_polarity(texts, oracle);
  for (std::size_t k = 0; k < pending.size(); ++k) out[pending[k]].label = std::string(to_string(verdicts[k].label));
  return out;
}

// ---------------------------------------------------------------------------

SplitSizes split_sizes(std::size_t n, const SplitRatios& ratios) {
  // The epsilon absorbs representation error (e.g. 0.1 * 30 just below 3).
  auto cut = [n](double ratio) {
    return static_cast<std::size_t>(std::floor(static_cast<double>(n) * ratio + 1e-9));
  };
  SplitSizes sizes;
  sizes.train = std::min(n, cut(ratios.train));
  sizes.validation = std::min(n - sizes.train, cut(ratios.validation));
  sizes.test = n - sizes.train - sizes.validation;
  return sizes;
}

SplitResult split_corpus(const Corpus& corpus, std::uint64_t seed, const SplitRatios& ratios) {
  if (ratios.train < 0 || ratios.validation < 0 || ratios.test < 0) {
    throw DataError("split ratios must be non-negative");
  }
  if (std::fabs(ratios.train + ratios.validation + ratios.test - 1.0) > 1e-9) {
    throw DataError("split ratios must sum to 1");
  }
  if (corpus.size() < 3) {
    throw DataError("cannot split " + std::to_string(corpus.size()) + " conversations into three parts (need >= 3)");
  }

  std::vector<std::size_t> order(corpus.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::mt19937_64 rng(seed);
  for (std::size_t i = order.size() - 1; i > 0; --i) {
    std::swap(order[i], order[uniform_up_to(rng, i)]);
  }

  const SplitSizes sizes = split_sizes(corpus.size(), ratios);
  SplitResult result;
  result.seed = seed;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const Conversation& conv = corpus[order[k]];
    if (k < sizes.train) {
      result.train.push_back(conv);
    } else if (k < sizes.train + sizes.validation) {
      result.validation.push_back(conv);
    } else {
      result.test.push_back(conv);
    }
  }
  return result;
}

// ---------------------------------------------------------------------------

std::size_t count_whitespace_tokens(std::string_view text) {
  std::size_t count = 0;
  bool in_token = false;
  for (unsigned char c : text) {
    if (std::isspace(c)) {
      in_token = false;
    } else if (!in_token) {
      in_token = true;
      ++count;
    }
  }
  return count;
}

double CorpusStats::average_turns() const {
  return conversation_count == 0 ? 0.0 : static_cast<double>(turn_count) / static_cast<double>(conversation_count);
}

CorpusStats compute_stats(const Corpus& corpus, const TokenCounter& tokens) {
  CorpusStats stats;
  std::map<Speaker, std::pair<std::size_t, std::size_t>> lengths;  // speaker -> (tokens, utterances)
  for (const auto& conv : corpus) {
    ++stats.conversation_count;
    stats.turn_count += conv.turns.size();
    ++stats.turns_histogram[conv.turns.size()];
    for (const auto& turn : conv.turns) {
      auto& user = lengths[Speaker::kUser];
      user.first += tokens(turn.user.text);
      ++user.second;
      if (turn.response) {
        auto& reply = lengths[turn.response->speaker];
        reply.first += tokens(turn.response->text);
        ++reply.second;
      }
    }
  }
  for (const auto& [speaker, totals] : lengths) {
    stats.avg_length_by_speaker[speaker] = static_cast<double>(totals.first) / static_cast<double>(totals.second);
  }
  return stats;
}

}  // namespace empath_eval
