// infodemic: command-line front end for the misinformation pipeline.
//
// Exit codes: 0 ok, 1 config error, 2 missing dependency, 3 data error.

#include <cstdlib>
#include <functional>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "infodemic/errors.hpp"
#include "infodemic/fixture.hpp"
#include "infodemic/pipeline.hpp"

namespace fs = std::filesystem;
using namespace infodemic;

namespace {

struct Overrides {
  std::string config;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::optional<double> threshold;
  std::optional<int> epochs;
  std::optional<double> learning_rate;
  std::optional<int> batch_size;
  std::optional<int> dim_h;
  std::optional<std::size_t> min_count;
  std::optional<int> max_lag;
  std::optional<std::string> granularity;
  std::optional<std::string> oov_policy;
  std::optional<std::string> discovery, retrospective, embeddings, subwords, lexicon, seeds, gazetteer, stopwords;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("-c,--config", o.config, "JSON run configuration");
  cmd->add_option("-o,--out", o.out, "Output directory");
  cmd->add_option("--seed", o.seed, "Global seed");
  cmd->add_option("--workers", o.workers, "Worker threads (1 = deterministic serial run)");
  cmd->add_option("--threshold", o.threshold, "Category cosine threshold in (0, 1)");
  cmd->add_option("--epochs", o.epochs, "Training epochs");
  cmd->add_option("--learning-rate", o.learning_rate, "Optimizer step size");
  cmd->add_option("--batch-size", o.batch_size, "Mini-batch size");
  cmd->add_option("--hidden", o.dim_h, "LSTM hidden size");
  cmd->add_option("--min-count", o.min_count, "Omit groups with at most this many tweets");
  cmd->add_option("--max-lag", o.max_lag, "Largest lead/lag tested, in periods");
  cmd->add_option("--granularity", o.granularity, "daily or monthly");
  cmd->add_option("--oov", o.oov_policy, "auto, skip, subword or zero");
  cmd->add_option("--discovery", o.discovery, "Labeled corpus (.jsonl or .csv)");
  cmd->add_option("--retrospective", o.retrospective, "Unlabeled corpus (.jsonl or .csv)");
  cmd->add_option("--embeddings", o.embeddings, "Word vectors (text format)");
  cmd->add_option("--subwords", o.subwords, "Subword bucket vectors");
  cmd->add_option("--lexicon", o.lexicon, "Word-emotion lexicon TSV");
  cmd->add_option("--seeds", o.seeds, "Category seeds TSV");
  cmd->add_option("--gazetteer", o.gazetteer, "Location pattern TSV");
  cmd->add_option("--stopwords", o.stopwords, "Stopword list");
}

RunConfig build_config(const Overrides& o) {
  RunConfig cfg = o.config.empty() ? RunConfig{} : RunConfig::load(o.config);
  if (o.out) cfg.out = *o.out;
  if (o.seed) cfg.seed = cfg.train.seed = *o.seed;
  if (o.workers) cfg.workers = *o.workers;
  if (o.threshold) cfg.threshold = *o.threshold;
  if (o.epochs) cfg.train.epochs = *o.epochs;
  if (o.learning_rate) cfg.train.learning_rate = *o.learning_rate;
  if (o.batch_size) cfg.train.batch_size = *o.batch_size;
  if (o.dim_h) cfg.train.dim_h = *o.dim_h;
  if (o.min_count) cfg.min_count = *o.min_count;
  if (o.max_lag) cfg.max_lag = *o.max_lag;
  if (o.granularity) {
    auto g = granularity_from_name(*o.granularity);
    if (!g) throw ConfigError("--granularity must be daily or monthly");
    cfg.granularity = *g;
  }
  if (o.oov_policy) cfg.oov_policy = *o.oov_policy;
  auto path = [](const std::optional<std::string>& flag, std::optional<fs::path>& slot) {
    if (flag) slot = fs::path(*flag);
  };
  path(o.discovery, cfg.discovery);
  path(o.retrospective, cfg.retrospective);
  path(o.embeddings, cfg.embeddings);
  path(o.subwords, cfg.subwords);
  path(o.lexicon, cfg.lexicon);
  path(o.seeds, cfg.seeds);
  path(o.gazetteer, cfg.gazetteer);
  path(o.stopwords, cfg.stopwords);
  cfg.validate();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Misinformation detection and infodemic analysis pipeline"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  Overrides o;
  std::function<void()> action;
  auto stage = [&](const char* name, const char* help, void (*fn)(const RunConfig&)) {
    auto* cmd = app.add_subcommand(name, help);
    add_common(cmd, o);
    cmd->callback([&, fn] { action = [&, fn] { fn(build_config(o)); }; });
    return cmd;
  };

  stage("ingest", "Validate and normalize the input corpora", cmd_ingest);
  stage("split", "Stratified train/test split of the discovery cohort", cmd_split);
  stage("train", "Train the BiLSTM classifier", cmd_train);
  stage("label", "Label the retrospective cohort with the trained model", cmd_label);
  stage("emotions", "Score emotions and build the country matrix", cmd_emotions);
  stage("categories", "Assign topical categories to misinformation tweets", cmd_categories);
  stage("stratify", "Misinformation rates by country, wave and half-year", cmd_stratify);
  stage("leadlag", "Time series and lead-lag against external series", cmd_leadlag);
  stage("report", "Collect the tables into report.md", cmd_report);
  auto* run = stage("run", "Run every stage in order", cmd_run);
  run->alias("pipeline");

  std::optional<std::string> predictions;
  auto* evaluate = app.add_subcommand("evaluate", "Score the model on the test split");
  add_common(evaluate, o);
  evaluate->add_option("--predictions", predictions, "Score a CSV with gold,predicted columns instead");
  evaluate->callback([&] {
    action = [&] {
      cmd_evaluate(build_config(o), predictions ? std::optional<fs::path>(*predictions) : std::nullopt);
    };
  });

  std::string fixture_out = "data/fixture";
  std::string resources = "data";
  FixtureOptions fixture_opts;
  auto* fixture = app.add_subcommand("fixture", "Generate the synthetic demo corpus");
  fixture->add_option("-o,--out", fixture_out, "Directory to write")->capture_default_str();
  fixture->add_option("--resources", resources, "Directory holding seeds, lexicon, gazetteer, stopwords")
      ->capture_default_str();
  fixture->add_option("--seed", fixture_opts.seed, "Generator seed")->capture_default_str();
  fixture->add_option("--retrospective-size", fixture_opts.retrospective_size, "Unlabeled tweets")
      ->capture_default_str();
  fixture->callback([&] { action = [&] { write_fixture(fixture_out, resources, fixture_opts); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    action();
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const MissingDependency& e) {
    std::cerr << "missing dependency: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
