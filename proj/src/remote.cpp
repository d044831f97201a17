#include "empath_eval/remote.hpp"

#include <algorithm>
#include <thread>

#include <httplib.h>

#include "empath_eval/error.hpp"

namespace empath_eval {

JsonHttpClient::JsonHttpClient(const std::string& base_url, RetryPolicy retry, std::chrono::seconds timeout)
    : base_url_(base_url), retry_(retry), timeout_(timeout) {
  const auto scheme_end = base_url.find("://");
  if (scheme_end == std::string::npos || base_url.compare(0, scheme_end, "http") != 0) {
    throw std::invalid_argument("remote URL must start with http://, got \"" + base_url + "\"");
  }
  const auto path_start = base_url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) {
    scheme_host_port_ = base_url;
  } else {
    scheme_host_port_ = base_url.substr(0, path_start);
    prefix_ = base_url.substr(path_start);
    while (!prefix_.empty() && prefix_.back() == '/') prefix_.pop_back();
  }
  if (scheme_host_port_.size() <= scheme_end + 3) throw std::invalid_argument("remote URL has no host: " + base_url);
  if (retry_.max_attempts < 1) retry_.max_attempts = 1;
}

nlohmann::json JsonHttpClient::post(const std::string& path, const nlohmann::json& body) const {
  const std::string target = prefix_ + path;
  const std::string payload = body.dump();
  auto backoff = retry_.initial_backoff;
  std::string last_error;

  for (int attempt = 1; attempt <= retry_.max_attempts; ++attempt) {
    httplib::Client client(scheme_host_port_);
    client.set_connection_timeout(timeout_);
    client.set_read_timeout(timeout_);
    client.set_write_timeout(timeout_);

    auto res = client.Post(target, payload, "application/json");
    if (!res) {
      last_error = "connection error: " + httplib::to_string(res.error());
    } else if (res->status == 200) {
      try {
        return nlohmann::json::parse(res->body);
      } catch (const nlohmann::json::parse_error& e) {
        throw BackendError("POST " + base_url_ + path + ": response is not JSON: " + e.what());
      }
    } else if (res->status >= 500) {
      last_error = "HTTP " + std::to_string(res->status);
    } else {
      throw BackendError("POST " + base_url_ + path + ": HTTP " + std::to_string(res->status) + ": " + res->body);
    }

    if (attempt < retry_.max_attempts) {
      std::this_thread::sleep_for(backoff);
      backoff = std::chrono::milliseconds(
          static_cast<std::chrono::milliseconds::rep>(static_cast<double>(backoff.count()) * retry_.backoff_multiplier));
    }
  }
  throw BackendError("POST " + base_url_ + path + " failed after " + std::to_string(retry_.max_attempts) +
                     " attempts: " + last_error);
}

// ---------------------------------------------------------------------------

RemoteClassifier::RemoteClassifier(JsonHttpClient client, std::size_t batch_size)
    : client_(std::move(client)), batch_size_(std::max<std::size_t>(1, batch_size)) {}

std::vector<std::pair<std::string, double>> RemoteClassifier::call(ClassifierTask task,
                                                                   std::span<const std::string> texts) const {
  std::vector<std::pair<std::string, double>> out;
  out.reserve(texts.size());
  for (std::size_t begin = 0; begin < texts.size(); begin += batch_size_) {
    const auto batch = texts.subspan(begin, std::min(batch_size_, texts.size() - begin));
    nlohmann::json body{{"task", std::string(to_string(task))},
                        {"texts", std::vector<std::string>(batch.begin(), batch.end())}};
    const auto reply = client_.post("/classify", body);
    if (!reply.is_object() || !reply.contains("verdicts") || !reply["verdicts"].is_array()) {
      throw BackendError("/classify response has no \"verdicts\" array");
    }
    const auto& verdicts = reply["verdicts"];
    if (verdicts.size() != batch.size()) {
      throw BackendError("/classify returned " + std::to_string(verdicts.size()) + " verdicts for " +
                         std::to_string(batch.size()) + " texts");
    }
    for (const auto& v : verdicts) {
      if (!v.is_object() || !v.contains("label") || !v["label"].is_string() || !v.contains("confidence") ||
          !v["confidence"].is_number()) {
        throw BackendError("/classify verdict must carry a string label and a numeric confidence");
      }
      out.emplace_back(v["label"].get<std::string>(), v["confidence"].get<double>());
    }
  }
  return out;
}

std::vector<NeutralityVerdict> RemoteClassifier::neutrality(std::span<const std::string> texts) const {
  std::vector<NeutralityVerdict> out;
  for (auto& [label, confidence] : call(ClassifierTask::kNeutrality, texts)) {
    try {
      out.push_back({parse_neutrality(label), confidence});
    } catch (const DataError& e) {
      throw BackendError(std::string("/classify: ") + e.what());
    }
  }
  return out;
}

std::vector<PolarityVerdict> RemoteClassifier::polarity(std::span<const std::string> texts) const {
  std::vector<PolarityVerdict> out;
  for (auto& [label, confidence] : call(ClassifierTask::kPolarity, texts)) {
    try {
      out.push_back({parse_polarity(label), confidence});
    } catch (const DataError& e) {
      throw BackendError(std::string("/classify: ") + e.what());
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

RemoteBot::RemoteBot(std::string name, JsonHttpClient client, ContextMode context_mode)
    : descriptor_{std::move(name), BotKind::kRemote, context_mode}, client_(std::move(client)) {}

std::string RemoteBot::respond(const std::string& user_text, const std::vector<std::string>* history) const {
  nlohmann::json body{{"bot", descriptor_.name}, {"text", user_text}};
  body["history"] = history ? nlohmann::json(*history) : nlohmann::json(nullptr);
  const auto reply = client_.post("/generate", body);
  if (!reply.is_object() || !reply.contains("response") || !reply["response"].is_string()) {
    throw BackendError("/generate response has no string \"response\" field");
  }
  return reply["response"].get<std::string>();
}

}  // namespace empath_eval
