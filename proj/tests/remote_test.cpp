#include <gtest/gtest.h>

#include <atomic>
#include <thread>

#include <httplib.h>

#include "empath_eval/error.hpp"
#include "empath_eval/remote.hpp"
#include "empath_eval/scoring.hpp"

using namespace empath_eval;

namespace {

/// Lexicon-like server: "neutral" for texts containing "noon", else
/// non_neutral; polarity positive iff the text contains "great".
class FakeServer {
 public:
  FakeServer() {
    server_.Post("/classify", [this](const httplib::Request& req, httplib::Response& res) {
      ++classify_calls;
      if (failures_left > 0) {
        --failures_left;
        res.status = 503;
        return;
      }
      const auto body = nlohmann::json::parse(req.body);
      nlohmann::json verdicts = nlohmann::json::array();
      for (const auto& t : body["texts"]) {
        const std::string text = t.get<std::string>();
        std::string label;
        if (body["task"] == "neutrality") {
          label = text.find("noon") != std::string::npos ? "neutral" : "non_neutral";
        } else {
          label = text.find("great") != std::string::npos ? "positive" : "negative";
        }
        verdicts.push_back({{"label", label}, {"confidence", 0.9}});
      }
      if (drop_one) verdicts.erase(verdicts.begin());
      if (bad_label) verdicts[0]["label"] = "joyful";
      res.set_content(nlohmann::json{{"verdicts", verdicts}}.dump(), "application/json");
    });
    server_.Post("/v1/generate", [this](const httplib::Request& req, httplib::Response& res) {
      const auto body = nlohmann::json::parse(req.body);
      last_history = body["history"];
      res.set_content(nlohmann::json{{"response", "echo: " + body["text"].get<std::string>()}}.dump(),
                      "application/json");
    });
    server_.Post("/missing", [](const httplib::Request&, httplib::Response& res) { res.status = 404; });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~FakeServer() {
    server_.stop();
    thread_.join();
  }

  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }

  std::atomic<int> classify_calls{0};
  std::atomic<int> failures_left{0};
  std::atomic<bool> drop_one{false};
  std::atomic<bool> bad_label{false};
  nlohmann::json last_history;

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

RetryPolicy fast_retry(int attempts = 3) { return RetryPolicy{attempts, std::chrono::milliseconds(1), 2.0}; }

}  // namespace

TEST(JsonHttpClient, RejectsBadUrls) {
  EXPECT_THROW(JsonHttpClient("ftp://x"), std::invalid_argument);
  EXPECT_THROW(JsonHttpClient("localhost:8080"), std::invalid_argument);
  EXPECT_THROW(JsonHttpClient("http://"), std::invalid_argument);
}

TEST(RemoteClassifier, ClassifiesInBatches) {
  FakeServer server;
  const RemoteClassifier classifier(JsonHttpClient(server.url(), fast_retry()), 2);
  const std::vector<std::string> texts{"great day", "the meeting is at noon", "sad", "great", "x"};
  const auto n = classify_neutrality(texts, classifier);
  EXPECT_EQ(n[1].label, Neutrality::kNeutral);
  EXPECT_EQ(n[0].label, Neutrality::kNonNeutral);
  EXPECT_EQ(server.classify_calls.load(), 3);
  const auto p = classify_polarity(texts, classifier);
  EXPECT_EQ(p[0].label, Polarity::kPositive);
  EXPECT_EQ(p[2].label, Polarity::kNegative);
  EXPECT_DOUBLE_EQ(p[0].confidence, 0.9);
}

TEST(RemoteClassifier, RetriesServerErrors) {
  FakeServer server;
  server.failures_left = 2;
  const RemoteClassifier classifier(JsonHttpClient(server.url(), fast_retry(3)));
  const std::vector<std::string> texts{"great"};
  EXPECT_EQ(classify_polarity(texts, classifier)[0].label, Polarity::kPositive);
  EXPECT_EQ(server.classify_calls.load(), 3);

  server.failures_left = 5;
  EXPECT_THROW(classify_polarity(texts, classifier), ClassificationError);
}

TEST(RemoteClassifier, MalformedRepliesAreBackendErrors) {
  FakeServer server;
  const RemoteClassifier classifier(JsonHttpClient(server.url(), fast_retry()));
  const std::vector<std::string> texts{"a", "b"};
  server.drop_one = true;
  try {
    classify_polarity(texts, classifier);
    FAIL() << "expected ClassificationError";
  } catch (const ClassificationError& e) {
    EXPECT_EQ(e.unclassified(), (std::vector<std::size_t>{0, 1}));
  }
  server.drop_one = false;
  server.bad_label = true;
  EXPECT_THROW(classify_polarity(texts, classifier), BackendError);
}

TEST(JsonHttpClient, ClientErrorsAreNotRetried) {
  FakeServer server;
  const JsonHttpClient client(server.url(), fast_retry(3));
  EXPECT_THROW(client.post("/missing", nlohmann::json::object()), BackendError);
}

TEST(JsonHttpClient, UnreachableServerFailsAfterRetries) {
  std::string url;
  {
    FakeServer gone;
    url = gone.url();
  }
  const JsonHttpClient client(url, fast_retry(2), std::chrono::seconds(1));
  EXPECT_THROW(client.post("/classify", nlohmann::json::object()), BackendError);
}

TEST(RemoteBot, GeneratesWithPrefixAndHistory) {
  FakeServer server;
  const RemoteBot bot("blender", JsonHttpClient(server.url() + "/v1/", fast_retry()), ContextMode::kFullHistory);
  const std::vector<std::string> history{"earlier", "reply"};
  const auto record = generate_response(bot, "hello", &history);
  EXPECT_EQ(record.response_text, "echo: hello");
  EXPECT_EQ(server.last_history, nlohmann::json(history));

  const RemoteBot single("gpt", JsonHttpClient(server.url() + "/v1", fast_retry()));
  EXPECT_EQ(single.respond("hi", nullptr), "echo: hi");
  EXPECT_TRUE(server.last_history.is_null());
}

TEST(RemoteBackends, ScoreCorpusEndToEnd) {
  FakeServer server;
  const RemoteClassifier classifier(JsonHttpClient(server.url(), fast_retry()));
  Corpus corpus;
  Conversation c;
  c.id = "a";
  c.turns.push_back({Utterance{"great news", Speaker::kUser, {}, "s"},
                     Utterance{"great to hear", Speaker::kHumanResponder, {}, "s"}});
  c.turns.push_back({Utterance{"at noon", Speaker::kUser, {}, "s"}, std::nullopt});
  corpus.push_back(c);
  const auto score = score_corpus(corpus, classifier, classifier);
  EXPECT_EQ(score.scored_turns, 1u);
  EXPECT_EQ(score.mean(), Rational(1));
}
