#include "cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <memory>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "empath_eval/bots.hpp"
#include "empath_eval/corpus.hpp"
#include "empath_eval/error.hpp"
#include "empath_eval/lexicon.hpp"
#include "empath_eval/remote.hpp"
#include "empath_eval/report.hpp"
#include "empath_eval/scoring.hpp"
#include "empath_eval/validation.hpp"

namespace empath_eval::cli {
namespace {

namespace fs = std::filesystem;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string stem_of(const std::string& path) { return fs::path(path).stem().string(); }

void require_file(const std::string& path) {
  if (!fs::is_regular_file(path)) throw DataError("input file not found: " + path);
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  return out;
}

std::string resolve_url(const std::string& spec, const char* what) {
  if (spec.rfind("remote:", 0) == 0) return spec.substr(7);
  const char* env = std::getenv(kInferenceUrlEnv);
  if (env == nullptr || *env == '\0') {
    throw UsageError(std::string(what) + " \"remote\" needs a URL: use remote:<url> or set " + kInferenceUrlEnv);
  }
  return env;
}

std::unique_ptr<ClassifierBackend> make_backend(const std::string& spec) {
  if (spec == "lexicon") return std::make_unique<LexiconBackend>();
  if (spec == "remote" || spec.rfind("remote:", 0) == 0) {
    return std::make_unique<RemoteClassifier>(JsonHttpClient(resolve_url(spec, "--backend")));
  }
  throw UsageError("unknown --backend \"" + spec + "\" (expected lexicon, remote or remote:<url>)");
}

std::unique_ptr<Bot> make_bot(const std::string& spec, const std::string& name, bool full_history) {
  if (spec == "stub-neutral") return std::make_unique<StubBot>(BotKind::kStubNeutral, name);
  if (spec == "stub-mirror") return std::make_unique<StubBot>(BotKind::kStubMirror, name);
  if (spec == "stub-contrarian") return std::make_unique<StubBot>(BotKind::kStubContrarian, name);
  if (spec.rfind("scripted:", 0) == 0) {
    const std::string path = spec.substr(9);
    require_file(path);
    return std::make_unique<ScriptedBot>(ScriptedBot::from_file(path, name.empty() ? stem_of(path) : name));
  }
  if (spec == "remote" || spec.rfind("remote:", 0) == 0) {
    return std::make_unique<RemoteBot>(name.empty() ? "remote" : name, JsonHttpClient(resolve_url(spec, "--bot")),
                                       full_history ? ContextMode::kFullHistory : ContextMode::kSingleUtterance);
  }
  throw UsageError("unknown --bot \"" + spec +
                   "\" (expected stub-neutral, stub-mirror, stub-contrarian, scripted:<path> or remote:<url>)");
}

SplitRatios parse_ratios(const std::vector<double>& values) {
  if (values.size() != 3) throw UsageError("--ratios takes exactly three values");
  return {values[0], values[1], values[2]};
}

// ---------------------------------------------------------------------------

struct PrepareArgs {
  std::vector<std::string> sources;
  std::string out_dir;
  std::uint64_t seed = 0;
  std::vector<double> ratios{0.8, 0.1, 0.1};
};

int cmd_prepare(const PrepareArgs& a, std::ostream& out) {
  std::vector<SourceCollection> collections;
  for (const auto& path : a.sources) {
    require_file(path);
    collections.push_back({stem_of(path), read_conversations_file(path)});
  }
  const Corpus merged = merge_corpora(collections);
  const SplitRatios ratios = parse_ratios(a.ratios);
  const SplitResult split = split_corpus(merged, a.seed, ratios);

  fs::create_directories(a.out_dir);
  const fs::path dir(a.out_dir);
  auto write = [&](const char* name, const Corpus& corpus) {
    auto file = open_output(dir / name);
    write_conversations(file, corpus);
  };
  write("merged.jsonl", merged);
  write("train.jsonl", split.train);
  write("validation.jsonl", split.validation);
  write("test.jsonl", split.test);

  nlohmann::ordered_json manifest;
  manifest["seed"] = a.seed;
  manifest["ratios"] = {{"train", ratios.train}, {"validation", ratios.validation}, {"test", ratios.test}};
  manifest["sizes"] = {{"train", split.train.size()},
                       {"validation", split.validation.size()},
                       {"test", split.test.size()}};
  manifest["sources"] = nlohmann::ordered_json::array();
  for (const auto& c : collections) {
    manifest["sources"].push_back({{"name", c.name}, {"conversations", c.conversations.size()}});
  }
  auto file = open_output(dir / "split_manifest.json");
  file << manifest.dump(2) << '\n';

  out << "merged " << merged.size() << " conversations from " << collections.size() << " sources\n"
      << "split sizes: train " << split.train.size() << ", validation " << split.validation.size() << ", test "
      << split.test.size() << " (seed " << a.seed << ")\n";
  return kOk;
}

// ---------------------------------------------------------------------------

struct ResolveArgs {
  std::string corpus;
  std::string backend = "lexicon";
  double threshold = LabelPolarityMap::kDefaultThreshold;
  std::string out_file;
};

int cmd_resolve_labels(const ResolveArgs& a, std::ostream& out) {
  require_file(a.corpus);
  const Corpus corpus = read_conversations_file(a.corpus);
  const auto backend = make_backend(a.backend);
  const LabelPolarityMap map = resolve_label_polarity(corpus, *backend, a.threshold);
  const std::string json = label_polarity_map_to_json(map);
  if (a.out_file.empty()) {
    out << json << '\n';
  } else {
    auto file = open_output(a.out_file);
    file << json << '\n';
    out << "resolved " << map.entries.size() << " labels -> " << a.out_file << '\n';
  }
  return kOk;
}

// ---------------------------------------------------------------------------

struct EvaluateArgs {
  std::string corpus;
  std::string bot;
  std::string backend = "lexicon";
  std::string out_dir;
  std::vector<std::string> reports;
  std::string responder;
  bool full_history = false;
  std::size_t jobs = 1;
  std::size_t batch_size = 0;
};

int cmd_evaluate(const EvaluateArgs& a, std::ostream& out) {
  require_file(a.corpus);
  const Corpus corpus = read_conversations_file(a.corpus);
  const auto backend = make_backend(a.backend);
  std::unique_ptr<Bot> bot;
  if (!a.bot.empty()) bot = make_bot(a.bot, a.responder, a.full_history);

  ScoreOptions options;
  options.bot = bot.get();
  options.jobs = std::max<std::size_t>(1, a.jobs);
  options.batch_size = a.batch_size;

  ScoreReport report;
  report.responder = !a.responder.empty() ? a.responder : bot ? bot->descriptor().name : stem_of(a.corpus);
  report.score = score_corpus(corpus, *backend, *backend, options);
  const auto groups = group_by_conversation(corpus, report.score);
  report.dialogue = aggregate_dialogues(groups);

  std::vector<std::string> formats = a.reports.empty() ? std::vector<std::string>{"json", "csv"} : a.reports;
  auto emit = [&](const std::string& format, std::ostream& stream) {
    if (format == "json") {
      stream << score_report_to_json(report).dump(2) << '\n';
    } else if (format == "csv") {
      write_score_csv(stream, report);
    } else {
      write_score_markdown(stream, std::span<const ScoreReport>(&report, 1));
    }
  };

  if (a.out_dir.empty()) {
    for (const auto& f : formats) emit(f, out);
    return kOk;
  }
  fs::create_directories(a.out_dir);
  for (const auto& f : formats) {
    auto file = open_output(fs::path(a.out_dir) / ("score_report." + f));
    emit(f, file);
  }
  out << report.responder << ": mean " << report.score.mean().to_fixed(4) << " over " << report.score.scored_turns
      << " scored turns (" << report.score.skipped_neutral_user_turns << " neutral user turns skipped); dialogue max "
      << report.dialogue->corpus_max.to_fixed(4) << " min " << report.dialogue->corpus_min.to_fixed(4) << " mid "
      << report.dialogue->corpus_mid.to_fixed(4) << " over " << report.dialogue->scored_conversations
      << " conversations\n";
  return kOk;
}

// ---------------------------------------------------------------------------

struct ValidateArgs {
  std::vector<std::string> reports;
  std::string human;
  std::string out_file;
};

int cmd_validate(const ValidateArgs& a, std::ostream& out) {
  std::map<std::string, EvaluatorScores> evaluator;
  for (const auto& path : a.reports) {
    require_file(path);
    const ScoreSummary s = read_score_summary_file(path);
    if (evaluator.count(s.responder)) throw DataError("responder \"" + s.responder + "\" appears in two reports");
    evaluator[s.responder] = {s.mean, s.dialogue_mid};
  }
  require_file(a.human);
  const auto human = ingest_human_ratings_file(a.human);
  const ValidationReport report = validate_evaluator(evaluator, human);
  write_validation_text(out, report);
  if (!a.out_file.empty()) {
    auto file = open_output(a.out_file);
    file << validation_report_to_json(report).dump(2) << '\n';
  }
  return kOk;
}

// ---------------------------------------------------------------------------

struct StatsArgs {
  std::string corpus;
  bool json = false;
};

int cmd_stats(const StatsArgs& a, std::ostream& out) {
  require_file(a.corpus);
  const Corpus corpus = read_conversations_file(a.corpus);
  if (corpus.empty()) throw DataError("corpus is empty: " + a.corpus);
  const CorpusStats stats = compute_stats(corpus);

  auto two = [](double v) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(2) << v;
    return s.str();
  };
  if (a.json) {
    nlohmann::ordered_json j;
    j["conversation_count"] = stats.conversation_count;
    j["turn_count"] = stats.turn_count;
    j["average_turns"] = std::stod(two(stats.average_turns()));
    j["turns_histogram"] = nlohmann::ordered_json::object();
    for (const auto& [turns, freq] : stats.turns_histogram) j["turns_histogram"][std::to_string(turns)] = freq;
    j["avg_length_by_speaker"] = nlohmann::ordered_json::object();
    for (const auto& [speaker, len] : stats.avg_length_by_speaker) {
      j["avg_length_by_speaker"][std::string(to_string(speaker))] = std::stod(two(len));
    }
    out << j.dump(2) << '\n';
    return kOk;
  }
  out << "conversations: " << stats.conversation_count << '\n'
      << "turns: " << stats.turn_count << '\n'
      << "average turns: " << two(stats.average_turns()) << "\n\n"
      << "| # of Conversation Turns | Frequency |\n|---|---|\n";
  for (const auto& [turns, freq] : stats.turns_histogram) out << "| " << turns << " | " << freq << " |\n";
  out << "\n| Type of Utterance | Ave. Utterance Length |\n|---|---|\n";
  for (const auto& [speaker, len] : stats.avg_length_by_speaker) {
    out << "| " << to_string(speaker) << " | " << two(len) << " |\n";
  }
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Emotional-consistency evaluator for chatbots", "empath_eval"};
  app.require_subcommand(1);

  PrepareArgs prepare;
  auto* prepare_cmd = app.add_subcommand("prepare", "Merge source corpora and write train/validation/test splits");
  prepare_cmd->add_option("sources", prepare.sources, "Conversation JSONL files")->required();
  prepare_cmd->add_option("--out", prepare.out_dir, "Output directory")->required();
  prepare_cmd->add_option("--seed", prepare.seed, "Shuffle seed");
  prepare_cmd->add_option("--ratios", prepare.ratios, "train validation test ratios")->expected(3)->delimiter(',');

  ResolveArgs resolve;
  auto* resolve_cmd = app.add_subcommand("resolve-labels", "Resolve raw emotion labels to polarity");
  resolve_cmd->add_option("corpus", resolve.corpus, "Conversation JSONL")->required();
  resolve_cmd->add_option("--backend", resolve.backend, "lexicon | remote | remote:<url>");
  resolve_cmd->add_option("--threshold", resolve.threshold, "Majority threshold in (0.5, 1]");
  resolve_cmd->add_option("--out", resolve.out_file, "Output JSON file (default: stdout)");

  EvaluateArgs evaluate;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Score a bot's emotional consistency over a corpus");
  evaluate_cmd->add_option("corpus", evaluate.corpus, "Conversation JSONL")->required();
  evaluate_cmd->add_option("--bot", evaluate.bot,
                           "stub-neutral | stub-mirror | stub-contrarian | scripted:<path> | remote[:<url>]; "
                           "omit to score the responses already in the corpus");
  evaluate_cmd->add_option("--backend", evaluate.backend, "lexicon | remote | remote:<url>");
  evaluate_cmd->add_option("--out", evaluate.out_dir, "Output directory (default: print to stdout)");
  evaluate_cmd->add_option("--report", evaluate.reports, "json | csv | md (repeatable)")
      ->check(CLI::IsMember({"json", "csv", "md"}));
  evaluate_cmd->add_option("--responder", evaluate.responder, "Name reported for the responder");
  evaluate_cmd->add_flag("--history", evaluate.full_history, "Send conversation history to remote bots");
  evaluate_cmd->add_option("--jobs", evaluate.jobs, "Concurrent bot calls")->check(CLI::PositiveNumber);
  evaluate_cmd->add_option("--batch-size", evaluate.batch_size, "Texts per classifier call (0 = all)");

  ValidateArgs validate;
  auto* validate_cmd = app.add_subcommand("validate", "Correlate evaluator scores with human ratings");
  validate_cmd->add_option("reports", validate.reports, "Score report JSON files")->required();
  validate_cmd->add_option("--human", validate.human, "Human ratings JSONL")->required();
  validate_cmd->add_option("--out", validate.out_file, "Write the validation report JSON here");

  StatsArgs stats;
  auto* stats_cmd = app.add_subcommand("stats", "Descriptive statistics of a corpus");
  stats_cmd->add_option("corpus", stats.corpus, "Conversation JSONL")->required();
  stats_cmd->add_flag("--json", stats.json, "Print JSON instead of tables");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*prepare_cmd) return cmd_prepare(prepare, out);
    if (*resolve_cmd) return cmd_resolve_labels(resolve, out);
    if (*evaluate_cmd) return cmd_evaluate(evaluate, out);
    if (*validate_cmd) return cmd_validate(validate, out);
    if (*stats_cmd) return cmd_stats(stats, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const DataError& e) {
    err << "error: " << e.what() << '\n';
    return kData;
  } catch (const BackendError& e) {
    err << "error: " << e.what() << '\n';
    return kBackend;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kData;
  }
  return kUsage;
}

}  // namespace empath_eval::cli
