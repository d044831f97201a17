#pragma once

#include <chrono>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "empath_eval/corpus.hpp"
#include "empath_eval/error.hpp"
#include "empath_eval/lexicon.hpp"

namespace empath_eval {

enum class BotKind { kScripted, kStubMirror, kStubNeutral, kStubContrarian, kRemote };
enum class ContextMode { kSingleUtterance, kFullHistory };

std::string_view to_string(BotKind kind);

struct BotDescriptor {
  std::string name;
  BotKind kind = BotKind::kStubNeutral;
  ContextMode context_mode = ContextMode::kSingleUtterance;
};

struct GenerationRecord {
  std::string user_text;
  std::string response_text;
  std::string bot;
  std::chrono::milliseconds latency{0};
};

/// Uniform chatbot adapter. Model-specific decoding lives inside `respond`;
/// callers never branch on which bot they hold. Implementations must tolerate
/// concurrent calls.
class Bot {
 public:
  virtual ~Bot() = default;

  virtual const BotDescriptor& descriptor() const = 0;

  /// `history` holds the prior utterances of the conversation, oldest first,
  /// and is only passed to FULL_HISTORY bots.
  virtual std::string respond(const std::string& user_text, const std::vector<std::string>* history) const = 0;
};

/// Validates the call, times it and rejects empty generations. Throws
/// std::invalid_argument for a blank user text or for history passed to a
/// SINGLE_UTTERANCE bot, BackendError for an empty response.
GenerationRecord generate_response(const Bot& bot, const std::string& user_text,
                                   const std::vector<std::string>* history = nullptr);

/// Replays recorded responses keyed by the exact user utterance.
class ScriptedBot final : public Bot {
 public:
  ScriptedBot(std::string name, std::map<std::string, std::string> transcript);

  /// Reads transcript JSONL `{"user": str, "response": str}`. A user
  /// utterance recorded twice with different responses is a DataError.
  static ScriptedBot from_jsonl(std::istream& in, std::string name, const std::string& source_name = "transcript");
  static ScriptedBot from_file(const std::string& path, std::string name);

  /// Builds a transcript from a corpus whose turns already carry responses.
  static ScriptedBot from_corpus(const Corpus& corpus, std::string name);

  const BotDescriptor& descriptor() const override { return descriptor_; }
  /// Throws DataError listing the unmatched utterance.
  std::string respond(const std::string& user_text, const std::vector<std::string>* history) const override;

  std::size_t size() const { return transcript_.size(); }

 private:
  BotDescriptor descriptor_;
  std::map<std::string, std::string> transcript_;
};

/// Rule-based bots whose scores are forced under the lexicon classifiers:
/// mirror answers with the input's lexicon polarity, contrarian with the
/// opposite one, neutral always with "I see.".
class StubBot final : public Bot {
 public:
  static constexpr std::string_view kNeutralResponse = "I see.";

  explicit StubBot(BotKind kind, std::string name = {});

  const BotDescriptor& descriptor() const override { return descriptor_; }
  std::string respond(const std::string& user_text, const std::vector<std::string>* history) const override;

  static const std::vector<std::string>& positive_templates();
  static const std::vector<std::string>& negative_templates();

 private:
  BotDescriptor descriptor_;
  LexiconBackend lexicon_;
};

/// Location of one turn inside a corpus.
struct TurnRef {
  std::size_t conversation = 0;
  std::size_t turn = 0;

  friend auto operator<=>(const TurnRef&, const TurnRef&) = default;
};

/// A turn failed during attach_responses. `completed` lists every turn that
/// had received its response before the run was aborted.
class AttachError : public BackendError {
 public:
  AttachError(const std::string& what, std::vector<TurnRef> completed)
      : BackendError(what), completed_(std::move(completed)) {}

  const std::vector<TurnRef>& completed() const noexcept { return completed_; }

 private:
  std::vector<TurnRef> completed_;
};

struct AttachOptions {
  bool overwrite = false;
  /// Concurrent conversations; turns within a conversation stay sequential.
  std::size_t jobs = 1;
  /// Restricts generation to these turns; the rest are left untouched.
  /// Unset means every turn.
  std::optional<std::vector<TurnRef>> only;
};

struct AttachResult {
  Corpus corpus;
  /// In corpus order.
  std::vector<GenerationRecord> records;
};

/// Fills the response of every (selected) turn with `bot`. Existing responses
/// are a DataError unless options.overwrite is set. Structure and user
/// utterances are preserved exactly.
AttachResult attach_responses(const Corpus& corpus, const Bot& bot, const AttachOptions& options = {});

}  // namespace empath_eval
