#include "empath_eval/bots.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <fstream>
#include <mutex>
#include <set>
#include <thread>

#include <nlohmann/json.hpp>

#include "empath_eval/error.hpp"

namespace empath_eval {
namespace {

bool is_blank(std::string_view text) {
  return std::all_of(text.begin(), text.end(), [](unsigned char c) { return std::isspace(c); });
}

// FNV-1a; stable across platforms unlike std::hash.
std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string default_stub_name(BotKind kind) {
  switch (kind) {
    case BotKind::kStubMirror:
      return "stub-mirror";
    case BotKind::kStubNeutral:
      return "stub-neutral";
    case BotKind::kStubContrarian:
      return "stub-contrarian";
    default:
      throw std::invalid_argument("StubBot requires a stub kind");
  }
}

}  // namespace

std::string_view to_string(BotKind kind) {
  switch (kind) {
    case BotKind::kScripted:
      return "scripted";
    case BotKind::kStubMirror:
      return "stub-mirror";
    case BotKind::kStubNeutral:
      return "stub-neutral";
    case BotKind::kStubContrarian:
      return "stub-contrarian";
    case BotKind::kRemote:
      return "remote";
  }
  return "unknown";
}

GenerationRecord generate_response(const Bot& bot, const std::string& user_text,
                                   const std::vector<std::string>* history) {
  const BotDescriptor& d = bot.descriptor();
  if (is_blank(user_text)) throw std::invalid_argument("generate_response: user text is empty");
  if (history != nullptr && d.context_mode != ContextMode::kFullHistory) {
    throw std::invalid_argument("generate_response: bot \"" + d.name + "\" takes single utterances, not history");
  }
  const auto start = std::chrono::steady_clock::now();
  std::string response = bot.respond(user_text, history);
  const auto elapsed = std::chrono::steady_clock::now() - start;
  if (is_blank(response)) {
    throw BackendError("bot \"" + d.name + "\" produced an empty response for \"" + user_text + "\"");
  }
  return {user_text, std::move(response), d.name, std::chrono::duration_cast<std::chrono::milliseconds>(elapsed)};
}

// ---------------------------------------------------------------------------

ScriptedBot::ScriptedBot(std::string name, std::map<std::string, std::string> transcript)
    : descriptor_{std::move(name), BotKind::kScripted, ContextMode::kSingleUtterance},
      transcript_(std::move(transcript)) {}

ScriptedBot ScriptedBot::from_jsonl(std::istream& in, std::string name, const std::string& source_name) {
  std::map<std::string, std::string> transcript;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (is_blank(line)) continue;
    const std::string where = source_name + ":" + std::to_string(line_number);
    nlohmann::json record;
    try {
      record = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw DataError(where + ": invalid JSON: " + e.what());
    }
    for (const char* field : {"user", "response"}) {
      if (!record.is_object() || !record.contains(field) || !record[field].is_string() ||
          is_blank(record[field].get<std::string>())) {
        throw DataError(where + ": field '" + field + "' must be a non-empty string");
      }
    }
    auto user = record["user"].get<std::string>();
    auto response = record["response"].get<std::string>();
    auto [it, inserted] = transcript.emplace(user, response);
    if (!inserted && it->second != response) {
      throw DataError(where + ": utterance \"" + user + "\" already recorded with a different response");
    }
  }
  return ScriptedBot(std::move(name), std::move(transcript));
}

ScriptedBot ScriptedBot::from_file(const std::string& path, std::string name) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open transcript file: " + path);
  return from_jsonl(in, std::move(name), path);
}

ScriptedBot ScriptedBot::from_corpus(const Corpus& corpus, std::string name) {
  std::map<std::string, std::string> transcript;
  for (const auto& conv : corpus) {
    for (const auto& turn : conv.turns) {
      if (!turn.response) continue;
      auto [it, inserted] = transcript.emplace(turn.user.text, turn.response->text);
      if (!inserted && it->second != turn.response->text) {
        throw DataError("conversation \"" + conv.id + "\": utterance \"" + turn.user.text +
                        "\" already recorded with a different response");
      }
    }
  }
  return ScriptedBot(std::move(name), std::move(transcript));
}

std::string ScriptedBot::respond(const std::string& user_text, const std::vector<std::string>*) const {
  auto it = transcript_.find(user_text);
  if (it == transcript_.end()) {
    throw DataError("scripted bot \"" + descriptor_.name + "\" has no recorded response for: \"" + user_text + "\"");
  }
  return it->second;
}

// ---------------------------------------------------------------------------

StubBot::StubBot(BotKind kind, std::string name)
    : descriptor_{name.empty() ? default_stub_name(kind) : std::move(name), kind, ContextMode::kSingleUtterance} {
  default_stub_name(kind);  // rejects non-stub kinds even when a name is given
}

const std::vector<std::string>& StubBot::positive_templates() {
  static const std::vector<std::string> templates{
      "That's great to hear!",
      "How wonderful, I'm so happy for you.",
      "That sounds amazing, congratulations!",
      "I'm glad things turned out so nice.",
  };
  return templates;
}

const std::vector<std::string>& StubBot::negative_templates() {
  static const std::vector<std::string> templates{
      "I'm so sorry to hear that.",
      "That sounds awful.",
      "How terrible, that must hurt.",
      "I'm sorry, that sounds really sad.",
  };
  return templates;
}

std::string StubBot::respond(const std::string& user_text, const std::vector<std::string>*) const {
  if (descriptor_.kind == BotKind::kStubNeutral) return std::string(kNeutralResponse);
  Polarity polarity = lexicon_.polarity_of(user_text).label;
  if (descriptor_.kind == BotKind::kStubContrarian) {
    polarity = polarity == Polarity::kPositive ? Polarity::kNegative : Polarity::kPositive;
  }
  const auto& pool = polarity == Polarity::kPositive ? positive_templates() : negative_templates();
  return pool[fnv1a(user_text) % pool.size()];
}

// ---------------------------------------------------------------------------

AttachResult attach_responses(const Corpus& corpus, const Bot& bot, const AttachOptions& options) {
  const BotDescriptor& d = bot.descriptor();

  // selected[c][t] marks turns to generate.
  std::vector<std::vector<bool>> selected(corpus.size());
  for (std::size_t c = 0; c < corpus.size(); ++c) {
    selected[c].assign(corpus[c].turns.size(), !options.only.has_value());
  }
  if (options.only) {
    for (const auto& ref : *options.only) {
      if (ref.conversation >= corpus.size() || ref.turn >= corpus[ref.conversation].turns.size()) {
        throw std::out_of_range("attach_responses: turn reference out of range");
      }
      selected[ref.conversation][ref.turn] = true;
    }
  }
  if (!options.overwrite) {
    for (std::size_t c = 0; c < corpus.size(); ++c) {
      for (std::size_t t = 0; t < corpus[c].turns.size(); ++t) {
        if (selected[c][t] && corpus[c].turns[t].response) {
          throw DataError("conversation \"" + corpus[c].id + "\" turn " + std::to_string(t) +
                          " already has a response (set overwrite to replace it)");
        }
      }
    }
  }

  AttachResult result;
  result.corpus = corpus;
  std::vector<std::vector<std::optional<GenerationRecord>>> records(corpus.size());
  for (std::size_t c = 0; c < corpus.size(); ++c) records[c].resize(corpus[c].turns.size());

  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::mutex failure_mutex;
  std::optional<std::pair<TurnRef, std::string>> failure;

  auto worker = [&] {
    for (std::size_t c = next++; c < corpus.size() && !failed; c = next++) {
      Conversation& conv = result.corpus[c];
      std::vector<std::string> history;
      for (std::size_t t = 0; t < conv.turns.size(); ++t) {
        Turn& turn = conv.turns[t];
        if (selected[c][t]) {
          if (failed) return;
          try {
            const bool full = d.context_mode == ContextMode::kFullHistory;
            GenerationRecord record = generate_response(bot, turn.user.text, full ? &history : nullptr);
            turn.response = Utterance{record.response_text, Speaker::kBot, std::nullopt, turn.user.source};
            records[c][t] = std::move(record);
          } catch (const std::exception& e) {
            std::lock_guard lock(failure_mutex);
            const TurnRef here{c, t};
            if (!failure || here < failure->first) failure.emplace(here, e.what());
            failed = true;
            return;
          }
        }
        history.push_back(turn.user.text);
        if (turn.response) history.push_back(turn.response->text);
      }
    }
  };

  const std::size_t jobs = std::max<std::size_t>(1, std::min(options.jobs, corpus.size()));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (std::size_t j = 0; j < jobs; ++j) threads.emplace_back(worker);
    for (auto& th : threads) th.join();
  }

  if (failure) {
    std::vector<TurnRef> completed;
    for (std::size_t c = 0; c < records.size(); ++c) {
      for (std::size_t t = 0; t < records[c].size(); ++t) {
        if (records[c][t]) completed.push_back({c, t});
      }
    }
    const auto& [ref, what] = *failure;
    throw AttachError("bot \"" + d.name + "\" failed on conversation \"" + corpus[ref.conversation].id + "\" turn " +
                          std::to_string(ref.turn) + " (" + std::to_string(completed.size()) +
                          " turns completed): " + what,
                      std::move(completed));
  }

  for (auto& per_conv : records) {
    for (auto& r : per_conv) {
      if (r) result.records.push_back(std::move(*r));
    }
  }
  return result;
}

}  // namespace empath_eval
