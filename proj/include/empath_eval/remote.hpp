#pragma once

#include <chrono>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "empath_eval/bots.hpp"
#include "empath_eval/classifiers.hpp"

namespace empath_eval {

/// Environment variable consulted when a remote backend is selected without
/// an explicit URL.
inline constexpr const char* kInferenceUrlEnv = "EMPATH_EVAL_INFERENCE_URL";

struct RetryPolicy {
  int max_attempts = 3;
  std::chrono::milliseconds initial_backoff{200};
  double backoff_multiplier = 2.0;
};

/// POSTs JSON bodies to one server. Connection failures and 5xx responses are
/// retried per the policy; any other non-200 status fails immediately.
/// A fresh connection is opened per request, so instances are thread-safe.
class JsonHttpClient {
 public:
  /// `base_url` is "http://host[:port][/prefix]".
  explicit JsonHttpClient(const std::string& base_url, RetryPolicy retry = {},
                          std::chrono::seconds timeout = std::chrono::seconds(60));

  nlohmann::json post(const std::string& path, const nlohmann::json& body) const;

  const std::string& base_url() const { return base_url_; }

 private:
  std::string base_url_;
  std::string scheme_host_port_;
  std::string prefix_;
  RetryPolicy retry_;
  std::chrono::seconds timeout_;
};

/// Client for `POST /classify` `{"task", "texts"}` -> `{"verdicts": [...]}`.
/// A status other than 200, a verdict count differing from the request, or an
/// unknown label is a BackendError.
class RemoteClassifier final : public ClassifierBackend {
 public:
  explicit RemoteClassifier(JsonHttpClient client, std::size_t batch_size = 32);

  std::vector<NeutralityVerdict> neutrality(std::span<const std::string> texts) const override;
  std::vector<PolarityVerdict> polarity(std::span<const std::string> texts) const override;

 private:
  std::vector<std::pair<std::string, double>> call(ClassifierTask task, std::span<const std::string> texts) const;

  JsonHttpClient client_;
  std::size_t batch_size_;
};

/// Client for `POST /generate` `{"bot", "text", "history"}` -> `{"response"}`.
class RemoteBot final : public Bot {
 public:
  RemoteBot(std::string name, JsonHttpClient client, ContextMode context_mode = ContextMode::kSingleUtterance);

  const BotDescriptor& descriptor() const override { return descriptor_; }
  std::string respond(const std::string& user_text, const std::vector<std::string>* history) const override;

 private:
  BotDescriptor descriptor_;
  JsonHttpClient client_;
};

}  // namespace empath_eval
