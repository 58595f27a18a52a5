#include "infodemic/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "infodemic/categories.hpp"
#include "infodemic/corpus.hpp"
#include "infodemic/csv.hpp"
#include "infodemic/emotion.hpp"
#include "infodemic/errors.hpp"
#include "infodemic/metrics.hpp"
#include "infodemic/preprocess.hpp"
#include "infodemic/random.hpp"

namespace infodemic {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string fixed(double v, int decimals) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingDependency("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Records one command's inputs and outputs; written last so a manifest only
// exists for a completed stage.
class Manifest {
 public:
  Manifest(const RunConfig& cfg, std::string command) : cfg_(cfg), command_(std::move(command)) {}

  // Upstream artifacts are keyed relative to the output directory so the
  // manifest does not depend on where the run was written.
  void input(const fs::path& path) {
    const fs::path rel = path.lexically_relative(cfg_.out);
    const bool inside = !rel.empty() && *rel.begin() != "..";
    inputs_[inside ? "$out/" + rel.generic_string() : path.generic_string()] = file_digest(path);
  }
  void output(const std::string& name) { outputs_[name] = file_digest(cfg_.out / name); }
  ojson& extra() { return extra_; }

  void write() const {
    ojson j;
    j["command"] = command_;
    j["version"] = kVersion;
    j["seed"] = cfg_.seed;
    j["config_hash"] = cfg_.hash();
    j["inputs"] = ojson::object();
    for (const auto& [k, v] : inputs_) j["inputs"][k] = v;
    j["outputs"] = ojson::object();
    for (const auto& [k, v] : outputs_) j["outputs"][k] = v;
    if (!extra_.is_null()) j["details"] = extra_;
    fs::create_directories(cfg_.out / "manifests");
    std::ofstream(cfg_.out / "manifests" / (command_ + ".json"), std::ios::binary) << j.dump(2) << '\n';
  }

 private:
  const RunConfig& cfg_;
  std::string command_;
  std::map<std::string, std::string> inputs_;
  std::map<std::string, std::string> outputs_;
  ojson extra_;
};

std::ofstream open_out(const RunConfig& cfg, const std::string& name) {
  fs::create_directories(cfg.out);
  std::ofstream out(cfg.out / name, std::ios::binary);
  if (!out) throw DataError("cannot write " + (cfg.out / name).string());
  return out;
}

fs::path need_artifact(const RunConfig& cfg, const std::string& name, const std::string& producer) {
  fs::path p = cfg.out / name;
  if (!fs::exists(p))
    throw MissingDependency("missing " + p.string() + "; run `infodemic " + producer + "` first");
  return p;
}

const fs::path& need_path(const std::optional<fs::path>& p, const char* key, const char* command) {
  if (!p) throw ConfigError(std::string("paths.") + key + " is required by `" + command + "`");
  return *p;
}

StopwordList load_stops(const RunConfig& cfg, Manifest& m) {
  if (!cfg.stopwords) return StopwordList::english();
  m.input(*cfg.stopwords);
  return StopwordList::load(*cfg.stopwords);
}

EmbeddingTable load_table(const RunConfig& cfg, Manifest& m, const char* command) {
  const fs::path& vec = need_path(cfg.embeddings, "embeddings", command);
  m.input(vec);
  if (cfg.subwords) m.input(*cfg.subwords);
  auto loaded = load_embeddings(vec, cfg.subwords);
  for (const auto& w : loaded.warnings) std::cerr << "warning: " << w << '\n';
  return std::move(loaded.table);
}

OovPolicy resolve_policy(const RunConfig& cfg, const EmbeddingTable& table) {
  if (cfg.oov_policy == "skip") return OovPolicy::Skip;
  if (cfg.oov_policy == "zero") return OovPolicy::Zero;
  if (cfg.oov_policy == "subword") {
    if (!table.has_subwords()) throw ConfigError("oov_policy 'subword' needs paths.subwords");
    return OovPolicy::Subword;
  }
  return default_oov_policy(table);
}

Cohort load_artifact_cohort(const RunConfig& cfg, Manifest& m, const std::string& name, CohortKind kind,
                            const std::string& producer) {
  const fs::path p = need_artifact(cfg, name, producer);
  m.input(p);
  auto result = ingest(p, InputFormat::Jsonl, kind);
  if (result.report.rejected > 0) throw DataError(p.string() + " contains rejected records; rerun the producer");
  return std::move(result.cohort);
}

// labels.csv: id,label,p_misinformation
std::map<std::string, Label> read_labels(const RunConfig& cfg, Manifest& m) {
  const fs::path p = need_artifact(cfg, "labels.csv", "label");
  m.input(p);
  std::ifstream in(p);
  csv::Reader reader(in);
  reader.next();
  std::map<std::string, Label> labels;
  while (auto row = reader.next()) {
    if (row->size() < 2) throw DataError(p.string() + ":" + std::to_string(reader.line()) + ": short row");
    labels[(*row)[0]] = (*row)[1] == "0" ? Label::Misinformation : Label::NotMisinformation;
  }
  return labels;
}

Label label_of(const std::map<std::string, Label>& labels, const std::string& id) {
  auto it = labels.find(id);
  if (it == labels.end()) throw DataError("no label for tweet " + id + "; rerun `infodemic label`");
  return it->second;
}

std::string country_of(const Tweet& t, const LocationResolver& resolver) {
  return resolve_country(t.location.value_or(""), resolver);
}

Gazetteer load_gazetteer(const RunConfig& cfg, Manifest& m, const char* command) {
  const fs::path& p = need_path(cfg.gazetteer, "gazetteer", command);
  m.input(p);
  return Gazetteer::load(p);
}

void write_metrics(const RunConfig& cfg, const Metrics& metrics, std::size_t n) {
  ojson j;
  j["n"] = n;
  j["accuracy"] = metrics.accuracy;
  j["precision"] = metrics.precision;
  j["recall"] = metrics.recall;
  j["f1"] = metrics.f1;
  j["confusion"] = {{"labels", {"misinformation", "not_misinformation"}},
                    {"rows_gold_cols_pred",
                     {{metrics.confusion[0][0], metrics.confusion[0][1]},
                      {metrics.confusion[1][0], metrics.confusion[1][1]}}}};
  open_out(cfg, "metrics.json") << j.dump(2) << '\n';
}

Label parse_label_cell(const std::string& s, const std::string& where) {
  if (s == "0") return Label::Misinformation;
  if (s == "1") return Label::NotMisinformation;
  throw DataError(where + ": label must be 0 or 1, got '" + s + "'");
}

std::string rate_row(const std::string& group, std::size_t total, std::size_t misinfo) {
  return csv::join({group, std::to_string(total), std::to_string(misinfo), format_rate4(misinfo, total)});
}

std::vector<std::vector<std::string>> read_csv_rows(const fs::path& p) {
  std::ifstream in(p);
  csv::Reader reader(in);
  std::vector<std::vector<std::string>> rows;
  while (auto row = reader.next()) rows.push_back(std::move(*row));
  return rows;
}

std::string markdown_table(const std::vector<std::vector<std::string>>& rows) {
  if (rows.empty()) return "(empty)\n";
  std::string out;
  auto line = [&](const std::vector<std::string>& r) {
    out += "|";
    for (const auto& c : r) out += " " + c + " |";
    out += "\n";
  };
  line(rows[0]);
  out += "|";
  for (std::size_t i = 0; i < rows[0].size(); ++i) out += " --- |";
  out += "\n";
  for (std::size_t i = 1; i < rows.size(); ++i) line(rows[i]);
  return out;
}

Optimizer optimizer_from(const std::string& s) {
  if (s == "adam") return Optimizer::Adam;
  if (s == "sgd") return Optimizer::Sgd;
  throw ConfigError("train.optimizer must be 'adam' or 'sgd'");
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return fallback;
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("config key '") + key + "' has the wrong type");
  }
}

void reject_unknown(const json& j, std::initializer_list<const char*> known, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, _] : j.items()) {
    if (std::none_of(known.begin(), known.end(), [&](const char* k) { return key == k; }))
      throw ConfigError("unknown config key '" + where + key + "'");
  }
}

}  // namespace

std::string file_digest(const fs::path& path) { return hex64(fnv1a64(read_file(path))); }

RunConfig RunConfig::load(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return from_json(j, path.parent_path());
}

RunConfig RunConfig::from_json(const json& j, const fs::path& base) {
  reject_unknown(j, {"seed", "out", "workers", "paths", "external_series", "train", "analysis"}, "");
  RunConfig c;
  auto rel = [&](const std::string& p) { return (base / p).lexically_normal(); };
  c.seed = get_or<std::uint64_t>(j, "seed", c.seed);
  if (j.contains("out")) c.out = rel(get_or<std::string>(j, "out", "out"));
  c.workers = get_or<int>(j, "workers", c.workers);
  if (auto it = j.find("paths"); it != j.end()) {
    const json& p = *it;
    reject_unknown(p,
                   {"discovery", "retrospective", "embeddings", "subwords", "lexicon", "seeds", "gazetteer",
                    "stopwords"},
                   "paths.");
    auto opt = [&](const char* key, std::optional<fs::path>& slot) {
      if (p.contains(key) && !p[key].is_null()) slot = rel(get_or<std::string>(p, key, ""));
    };
    opt("discovery", c.discovery);
    opt("retrospective", c.retrospective);
    opt("embeddings", c.embeddings);
    opt("subwords", c.subwords);
    opt("lexicon", c.lexicon);
    opt("seeds", c.seeds);
    opt("gazetteer", c.gazetteer);
    opt("stopwords", c.stopwords);
  }
  if (auto it = j.find("external_series"); it != j.end()) {
    if (!it->is_array()) throw ConfigError("external_series must be a list");
    for (const auto& e : *it) {
      reject_unknown(e, {"label", "path", "granularity", "resample"}, "external_series.");
      ExternalSeriesSpec s;
      s.label = get_or<std::string>(e, "label", "");
      s.path = rel(get_or<std::string>(e, "path", ""));
      auto g = granularity_from_name(get_or<std::string>(e, "granularity", "daily"));
      if (!g) throw ConfigError("external_series.granularity must be 'daily' or 'monthly'");
      s.granularity = *g;
      const auto how = get_or<std::string>(e, "resample", "mean");
      if (how != "mean" && how != "sum") throw ConfigError("external_series.resample must be 'mean' or 'sum'");
      s.resample = how == "sum" ? Resample::Sum : Resample::Mean;
      if (s.label.empty()) throw ConfigError("external_series entries need a label");
      c.external_series.push_back(std::move(s));
    }
  }
  if (auto it = j.find("train"); it != j.end()) {
    const json& t = *it;
    reject_unknown(t,
                   {"epochs", "batch_size", "learning_rate", "optimizer", "beta1", "beta2", "epsilon",
                    "max_seq_len", "clip_norm", "dim_h"},
                   "train.");
    c.train.epochs = get_or<int>(t, "epochs", c.train.epochs);
    c.train.batch_size = get_or<int>(t, "batch_size", c.train.batch_size);
    c.train.learning_rate = get_or<double>(t, "learning_rate", c.train.learning_rate);
    c.train.optimizer = optimizer_from(get_or<std::string>(t, "optimizer", "adam"));
    c.train.beta1 = get_or<double>(t, "beta1", c.train.beta1);
    c.train.beta2 = get_or<double>(t, "beta2", c.train.beta2);
    c.train.epsilon = get_or<double>(t, "epsilon", c.train.epsilon);
    c.train.max_seq_len = get_or<int>(t, "max_seq_len", c.train.max_seq_len);
    c.train.dim_h = get_or<int>(t, "dim_h", c.train.dim_h);
    if (t.contains("clip_norm")) {
      if (t["clip_norm"].is_null()) {
        c.train.clip_norm.reset();
      } else {
        c.train.clip_norm = get_or<double>(t, "clip_norm", 5.0);
      }
    }
  }
  if (auto it = j.find("analysis"); it != j.end()) {
    const json& a = *it;
    reject_unknown(a,
                   {"threshold", "min_count", "max_lag", "granularity", "top_n", "train_fraction",
                    "keywords_top_k", "oov_policy"},
                   "analysis.");
    c.threshold = get_or<double>(a, "threshold", c.threshold);
    c.min_count = get_or<std::size_t>(a, "min_count", c.min_count);
    c.max_lag = get_or<int>(a, "max_lag", c.max_lag);
    auto g = granularity_from_name(get_or<std::string>(a, "granularity", "monthly"));
    if (!g) throw ConfigError("analysis.granularity must be 'daily' or 'monthly'");
    c.granularity = *g;
    c.top_n = get_or<std::size_t>(a, "top_n", c.top_n);
    c.train_fraction = get_or<double>(a, "train_fraction", c.train_fraction);
    c.keywords_top_k = get_or<std::size_t>(a, "keywords_top_k", c.keywords_top_k);
    c.oov_policy = get_or<std::string>(a, "oov_policy", c.oov_policy);
  }
  c.train.seed = c.seed;
  return c;
}

json RunConfig::to_json() const {
  json j;
  j["seed"] = seed;
  json p = json::object();
  auto put = [&](const char* key, const std::optional<fs::path>& v) {
    if (v) p[key] = v->generic_string();
  };
  put("discovery", discovery);
  put("retrospective", retrospective);
  put("embeddings", embeddings);
  put("subwords", subwords);
  put("lexicon", lexicon);
  put("seeds", seeds);
  put("gazetteer", gazetteer);
  put("stopwords", stopwords);
  j["paths"] = p;
  j["external_series"] = json::array();
  for (const auto& s : external_series) {
    j["external_series"].push_back({{"label", s.label},
                                    {"path", s.path.generic_string()},
                                    {"granularity", std::string(granularity_name(s.granularity))},
                                    {"resample", s.resample == Resample::Sum ? "sum" : "mean"}});
  }
  j["train"] = {{"epochs", train.epochs},
                {"batch_size", train.batch_size},
                {"learning_rate", train.learning_rate},
                {"optimizer", train.optimizer == Optimizer::Adam ? "adam" : "sgd"},
                {"beta1", train.beta1},
                {"beta2", train.beta2},
                {"epsilon", train.epsilon},
                {"max_seq_len", train.max_seq_len},
                {"clip_norm", train.clip_norm ? json(*train.clip_norm) : json(nullptr)},
                {"dim_h", train.dim_h}};
  j["analysis"] = {{"threshold", threshold},
                   {"min_count", min_count},
                   {"max_lag", max_lag},
                   {"granularity", std::string(granularity_name(granularity))},
                   {"top_n", top_n},
                   {"train_fraction", train_fraction},
                   {"keywords_top_k", keywords_top_k},
                   {"oov_policy", oov_policy}};
  return j;
}

std::string RunConfig::hash() const { return hex64(fnv1a64(to_json().dump())); }

void RunConfig::validate() const {
  if (!(threshold > 0.0 && threshold < 1.0)) throw ConfigError("analysis.threshold must lie in (0, 1)");
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw ConfigError("analysis.train_fraction must lie in (0, 1)");
  if (max_lag < 0) throw ConfigError("analysis.max_lag must be >= 0");
  if (top_n == 0) throw ConfigError("analysis.top_n must be >= 1");
  if (workers < 1) throw ConfigError("workers must be >= 1");
  if (oov_policy != "auto" && oov_policy != "skip" && oov_policy != "subword" && oov_policy != "zero")
    throw ConfigError("analysis.oov_policy must be one of auto, skip, subword, zero");
  train.validate();
  auto exists = [](const std::optional<fs::path>& p, const char* key) {
    if (p && !fs::exists(*p)) throw ConfigError(std::string("paths.") + key + " does not exist: " + p->string());
  };
  exists(discovery, "discovery");
  exists(retrospective, "retrospective");
  exists(embeddings, "embeddings");
  exists(subwords, "subwords");
  exists(lexicon, "lexicon");
  exists(seeds, "seeds");
  exists(gazetteer, "gazetteer");
  exists(stopwords, "stopwords");
  std::set<std::string> labels;
  for (const auto& s : external_series) {
    if (!fs::exists(s.path)) throw ConfigError("external series does not exist: " + s.path.string());
    if (!labels.insert(s.label).second) throw ConfigError("duplicate external series label " + s.label);
    for (char ch : s.label) {
      if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '_' && ch != '-')
        throw ConfigError("external series label may only use [A-Za-z0-9_-]: " + s.label);
    }
  }
}

void cmd_ingest(const RunConfig& cfg) {
  Manifest m(cfg, "ingest");
  auto run = [&](const fs::path& path, CohortKind kind, const std::string& stem) {
    auto fmt = format_from_extension(path);
    if (!fmt) throw ConfigError("cannot tell the format of " + path.string() + " (use .jsonl or .csv)");
    m.input(path);
    auto result = ingest(path, *fmt, kind);
    fs::create_directories(cfg.out);
    write_jsonl(result.cohort, cfg.out / (stem + ".jsonl"));
    open_out(cfg, stem + "_rejections.json") << result.report.to_json() << '\n';
    m.output(stem + ".jsonl");
    m.output(stem + "_rejections.json");
    m.extra()[stem] = {{"accepted", result.report.accepted}, {"rejected", result.report.rejected}};
    if (result.cohort.empty()) throw DataError(path.string() + ": no usable records");
  };
  run(need_path(cfg.discovery, "discovery", "ingest"), CohortKind::Discovery, "discovery");
  if (cfg.retrospective) run(*cfg.retrospective, CohortKind::Retrospective, "retrospective");
  m.write();
}

void cmd_split(const RunConfig& cfg) {
  Manifest m(cfg, "split");
  const Cohort cohort = load_artifact_cohort(cfg, m, "discovery.jsonl", CohortKind::Discovery, "ingest");
  auto [train_set, test_set] = stratified_split(cohort, cfg.train_fraction, derive_seed(cfg.seed, "split"));
  write_jsonl(train_set, cfg.out / "train.jsonl");
  write_jsonl(test_set, cfg.out / "test.jsonl");

  std::map<std::pair<std::string, int>, std::pair<std::size_t, std::size_t>> cells;
  for (const auto& r : train_set.records()) ++cells[{r.tweet.source.value_or(""), to_int(*r.label)}].first;
  for (const auto& r : test_set.records()) ++cells[{r.tweet.source.value_or(""), to_int(*r.label)}].second;
  auto out = open_out(cfg, "split_summary.csv");
  out << "source,label,train,test\n";
  for (const auto& [key, counts] : cells) {
    out << csv::join({key.first, std::to_string(key.second), std::to_string(counts.first),
                      std::to_string(counts.second)})
        << '\n';
  }
  out.close();
  m.output("train.jsonl");
  m.output("test.jsonl");
  m.output("split_summary.csv");
  m.extra() = {{"train", train_set.size()}, {"test", test_set.size()}, {"train_fraction", cfg.train_fraction}};
  m.write();
}

void cmd_train(const RunConfig& cfg) {
  Manifest m(cfg, "train");
  const Cohort cohort = load_artifact_cohort(cfg, m, "train.jsonl", CohortKind::Discovery, "split");
  const StopwordList stops = load_stops(cfg, m);
  const EmbeddingTable table = load_table(cfg, m, "train");
  const OovPolicy policy = resolve_policy(cfg, table);
  std::vector<LabeledSequence> data;
  for (const auto& r : cohort.records()) {
    const ProcessedTweet pt = preprocess(r.tweet, stops);
    data.push_back({embed_sequence(table, pt.tokens, policy, static_cast<std::size_t>(cfg.train.max_seq_len)),
                    *r.label});
  }
  BiLstmModel model = BiLstmModel::initialize(static_cast<int>(table.dim()), cfg.train.dim_h,
                                              derive_seed(cfg.seed, "init"));
  TrainResult result = train(std::move(model), data, cfg.train);
  save_model(result.model, cfg.out / "model.bin");
  auto log = open_out(cfg, "training_log.csv");
  log << "epoch,train_loss\n";
  for (const auto& e : result.history) log << e.epoch << ',' << num(e.train_loss) << '\n';
  log.close();
  m.output("model.bin");
  m.output("training_log.csv");
  m.extra() = {{"examples", data.size()},
               {"parameters", result.model.parameter_count()},
               {"final_loss", result.history.empty() ? 0.0 : result.history.back().train_loss}};
  m.write();
}

void cmd_evaluate(const RunConfig& cfg, const std::optional<fs::path>& predictions) {
  Manifest m(cfg, "evaluate");
  std::vector<Label> golds, preds;
  if (predictions) {
    if (!fs::exists(*predictions)) throw MissingDependency("predictions file not found: " + predictions->string());
    m.input(*predictions);
    std::ifstream in(*predictions);
    csv::Reader reader(in);
    auto header = reader.next();
    if (!header) throw DataError(predictions->string() + " is empty");
    auto col = [&](const char* name) {
      auto it = std::find(header->begin(), header->end(), name);
      if (it == header->end()) throw DataError(predictions->string() + ": missing column '" + name + "'");
      return static_cast<std::size_t>(it - header->begin());
    };
    const std::size_t gi = col("gold"), pi = col("predicted");
    while (auto row = reader.next()) {
      const std::string where = predictions->string() + ":" + std::to_string(reader.line());
      if (row->size() <= std::max(gi, pi)) throw DataError(where + ": short row");
      golds.push_back(parse_label_cell((*row)[gi], where));
      preds.push_back(parse_label_cell((*row)[pi], where));
    }
    if (golds.empty()) throw DataError(predictions->string() + " has no rows");
  } else {
    const Cohort test_set = load_artifact_cohort(cfg, m, "test.jsonl", CohortKind::Discovery, "split");
    const fs::path model_path = need_artifact(cfg, "model.bin", "train");
    m.input(model_path);
    const BiLstmModel model = load_model(model_path);
    const StopwordList stops = load_stops(cfg, m);
    const EmbeddingTable table = load_table(cfg, m, "evaluate");
    const OovPolicy policy = resolve_policy(cfg, table);
    auto out = open_out(cfg, "test_predictions.csv");
    out << "id,gold,predicted,p_misinformation\n";
    for (const auto& r : test_set.records()) {
      const Prediction p = predict(model, table, preprocess(r.tweet, stops), policy,
                                   static_cast<std::size_t>(cfg.train.max_seq_len));
      golds.push_back(*r.label);
      preds.push_back(p.label);
      out << csv::join({r.tweet.id, std::to_string(to_int(*r.label)), std::to_string(to_int(p.label)),
                        fixed(p.probs[0], 6)})
          << '\n';
    }
    out.close();
    m.output("test_predictions.csv");
  }
  const Metrics metrics = evaluate(preds, golds);
  write_metrics(cfg, metrics, golds.size());
  m.output("metrics.json");
  m.write();
}

void cmd_label(const RunConfig& cfg) {
  Manifest m(cfg, "label");
  const Cohort cohort = load_artifact_cohort(cfg, m, "retrospective.jsonl", CohortKind::Retrospective, "ingest");
  const fs::path model_path = need_artifact(cfg, "model.bin", "train");
  m.input(model_path);
  const BiLstmModel model = load_model(model_path);
  const StopwordList stops = load_stops(cfg, m);
  const EmbeddingTable table = load_table(cfg, m, "label");
  const OovPolicy policy = resolve_policy(cfg, table);
  const auto& records = cohort.records();
  std::vector<Prediction> results(records.size());
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i)
      results[i] = predict(model, table, preprocess(records[i].tweet, stops), policy,
                           static_cast<std::size_t>(cfg.train.max_seq_len));
  };
  // Each prediction is independent, so the split across workers cannot
  // change the output.
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(cfg.workers), records.size());
  if (workers <= 1) {
    work(0, records.size());
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (records.size() + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back(work, std::min(records.size(), w * chunk), std::min(records.size(), (w + 1) * chunk));
    for (auto& t : pool) t.join();
  }
  auto out = open_out(cfg, "labels.csv");
  out << "id,label,p_misinformation\n";
  std::size_t misinfo = 0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    misinfo += results[i].label == Label::Misinformation;
    out << csv::join({records[i].tweet.id, std::to_string(to_int(results[i].label)), fixed(results[i].probs[0], 6)})
        << '\n';
  }
  out.close();
  m.output("labels.csv");
  m.extra() = {{"tweets", records.size()}, {"misinformation", misinfo}};
  m.write();
}

void cmd_emotions(const RunConfig& cfg) {
  Manifest m(cfg, "emotions");
  const Cohort cohort = load_artifact_cohort(cfg, m, "retrospective.jsonl", CohortKind::Retrospective, "ingest");
  const auto labels = read_labels(cfg, m);
  const StopwordList stops = load_stops(cfg, m);
  const fs::path& lex_path = need_path(cfg.lexicon, "lexicon", "emotions");
  m.input(lex_path);
  const LexiconEmotionScorer scorer(EmotionLexicon::load(lex_path));
  const Gazetteer gaz = load_gazetteer(cfg, m, "emotions");

  auto header = [](std::ostream& out, const std::string& first) {
    out << first;
    for (auto e : kAllEmotions) out << ',' << emotion_name(e);
    out << '\n';
  };
  auto out = open_out(cfg, "emotions.csv");
  out << "id,dominant";
  for (auto e : kAllEmotions) out << ',' << emotion_name(e);
  out << '\n';
  std::vector<EmotionCountryRecord> country_records;
  for (const auto& r : cohort.records()) {
    const auto dist = scorer.score(preprocess(r.tweet, stops));
    const Emotion dom = dominant_emotion(dist);
    out << csv::escape(r.tweet.id) << ',' << emotion_name(dom);
    for (double p : dist.probs) out << ',' << fixed(p, 6);
    out << '\n';
    country_records.push_back(
        {country_of(r.tweet, gaz), dom, label_of(labels, r.tweet.id) == Label::Misinformation});
  }
  out.close();
  m.output("emotions.csv");

  const EmotionMatrix matrix = emotion_country_matrix(country_records, cfg.top_n);
  auto mat = open_out(cfg, "emotion_country_matrix.csv");
  header(mat, "country,misinformation");
  for (std::size_t i = 0; i < matrix.countries.size(); ++i) {
    mat << matrix.countries[i] << ',' << matrix.misinfo_counts[i];
    for (double v : matrix.percent[i]) mat << ',' << fixed(v, 2);
    mat << '\n';
  }
  mat.close();
  m.output("emotion_country_matrix.csv");

  // Per-emotion classifier confusion on the labeled test split.
  const fs::path preds_path = need_artifact(cfg, "test_predictions.csv", "evaluate");
  m.input(preds_path);
  const Cohort test_set = load_artifact_cohort(cfg, m, "test.jsonl", CohortKind::Discovery, "split");
  std::map<std::string, Label> predicted;
  for (const auto& row : read_csv_rows(preds_path)) {
    if (row.size() >= 3 && row[0] != "id") predicted[row[0]] = parse_label_cell(row[2], preds_path.string());
  }
  std::vector<EmotionRecord> er;
  for (const auto& r : test_set.records()) {
    auto it = predicted.find(r.tweet.id);
    if (it == predicted.end()) throw DataError("test tweet " + r.tweet.id + " has no prediction; rerun evaluate");
    er.push_back({dominant_emotion(scorer.score(preprocess(r.tweet, stops))), *r.label, it->second});
  }
  const auto conf = per_emotion_confusion(er);
  auto cf = open_out(cfg, "emotion_confusion.csv");
  cf << "emotion,tp,tn,fp,fn,sensitivity,specificity,fp_rate\n";
  auto opt = [](const std::optional<double>& v) { return v ? fixed(*v, 4) : std::string(); };
  for (auto e : kAllEmotions) {
    const auto& c = conf[static_cast<std::size_t>(e)];
    cf << emotion_name(e) << ',' << c.tp << ',' << c.tn << ',' << c.fp << ',' << c.fn << ',' << opt(c.sensitivity)
       << ',' << opt(c.specificity) << ',' << opt(c.fp_rate) << '\n';
  }
  cf.close();
  m.output("emotion_confusion.csv");
  m.write();
}

void cmd_categories(const RunConfig& cfg) {
  Manifest m(cfg, "categories");
  const Cohort cohort = load_artifact_cohort(cfg, m, "retrospective.jsonl", CohortKind::Retrospective, "ingest");
  const auto labels = read_labels(cfg, m);
  const StopwordList stops = load_stops(cfg, m);
  const EmbeddingTable table = load_table(cfg, m, "categories");
  const OovPolicy policy = resolve_policy(cfg, table);
  const fs::path& seeds_path = need_path(cfg.seeds, "seeds", "categories");
  m.input(seeds_path);
  const CategorySet cats = CategorySet::load(seeds_path);
  const SeedVectors seeds = embed_seeds(table, cats, stops, policy);

  std::vector<ProcessedTweet> misinfo;
  for (const auto& r : cohort.records()) {
    if (label_of(labels, r.tweet.id) == Label::Misinformation) misinfo.push_back(preprocess(r.tweet, stops));
  }
  const CohortCategories result =
      categorize_cohort(misinfo, table, seeds, cfg.threshold, derive_seed(cfg.seed, "categories"), policy);

  auto out = open_out(cfg, "categories.csv");
  out << "tweet_id,category\n";
  for (const auto& a : result.assignments) out << csv::join({a.tweet_id, a.category}) << '\n';
  out.close();
  auto counts = open_out(cfg, "category_counts.csv");
  std::vector<std::string> head = {"stratum"};
  head.insert(head.end(), result.columns.begin(), result.columns.end());
  head.emplace_back("total");
  counts << csv::join(head) << '\n';
  std::vector<std::string> row = {"all"};
  for (auto c : result.counts) row.push_back(std::to_string(c));
  row.push_back(std::to_string(misinfo.size()));
  counts << csv::join(row) << '\n';
  counts.close();

  // Characteristic terms of each assigned category (c-TF-IDF).
  std::map<std::string, std::vector<Document>> by_cat;
  for (std::size_t i = 0; i < misinfo.size(); ++i) {
    const auto& cat = result.assignments[i].category;
    if (cat != kUncategorized && !misinfo[i].tokens.empty()) by_cat[cat].push_back(misinfo[i].tokens);
  }
  ojson kw = ojson::object();
  if (by_cat.size() >= 2) {
    std::vector<std::pair<std::string, std::vector<Document>>> docs;
    for (const auto& name : cats.names()) {
      if (by_cat.count(name)) docs.emplace_back(name, by_cat[name]);
    }
    for (const auto& [name, terms] : ctfidf_keywords(docs, cfg.keywords_top_k)) kw[name] = terms;
  }
  open_out(cfg, "category_keywords.json") << kw.dump(2) << '\n';
  m.output("categories.csv");
  m.output("category_counts.csv");
  m.output("category_keywords.json");
  m.extra() = {{"misinformation_tweets", misinfo.size()}, {"threshold", cfg.threshold}};
  m.write();
}

void cmd_stratify(const RunConfig& cfg) {
  Manifest m(cfg, "stratify");
  const Cohort cohort = load_artifact_cohort(cfg, m, "retrospective.jsonl", CohortKind::Retrospective, "ingest");
  const auto labels = read_labels(cfg, m);
  const Gazetteer gaz = load_gazetteer(cfg, m, "stratify");

  std::vector<std::pair<std::string, bool>> by_country, by_wave;
  std::size_t total_misinfo = 0;
  std::map<std::string, std::string> country;
  std::map<std::string, Date> date;
  for (const auto& r : cohort.records()) {
    const bool mis = label_of(labels, r.tweet.id) == Label::Misinformation;
    total_misinfo += mis;
    country[r.tweet.id] = country_of(r.tweet, gaz);
    date[r.tweet.id] = to_date(r.tweet.created_at);
    by_country.emplace_back(country[r.tweet.id], mis);
    by_wave.emplace_back(std::string(wave_name(assign_wave(date[r.tweet.id]))), mis);
  }
  {
    auto out = open_out(cfg, "rates_by_country.csv");
    out << "group,total,misinformation,rate_percent\n";
    if (!cohort.empty()) out << rate_row("Total", cohort.size(), total_misinfo) << '\n';
    const auto groups = misinfo_rate_by(by_country, cfg.min_count);
    std::size_t rest_total = cohort.size(), rest_mis = total_misinfo;
    for (const auto& [g, rate] : groups) {
      if (g == kUnknownCountry) continue;
      out << rate_row(g, rate.total, rate.misinfo) << '\n';
      rest_total -= rate.total;
      rest_mis -= rate.misinfo;
    }
    if (rest_total > 0) out << rate_row("Others", rest_total, rest_mis) << '\n';
  }
  {
    auto out = open_out(cfg, "rates_by_wave.csv");
    out << "group,total,misinformation,rate_percent\n";
    const auto groups = misinfo_rate_by(by_wave, 0);
    for (Wave w : {Wave::First, Wave::Delta, Wave::Omicron, Wave::Other}) {
      auto it = groups.find(std::string(wave_name(w)));
      if (it != groups.end()) out << rate_row(it->first, it->second.total, it->second.misinfo) << '\n';
    }
  }
  m.output("rates_by_country.csv");
  m.output("rates_by_wave.csv");

  // Category share per half-year and country needs the categories stage.
  const fs::path cat_path = need_artifact(cfg, "categories.csv", "categories");
  m.input(cat_path);
  const fs::path& seeds_path = need_path(cfg.seeds, "seeds", "stratify");
  std::vector<std::string> columns = CategorySet::load(seeds_path).names();
  columns.emplace_back(kUncategorized);
  std::vector<CategoryRecord> cat_records;
  for (const auto& row : read_csv_rows(cat_path)) {
    if (row.size() < 2 || row[0] == "tweet_id") continue;
    auto c = country.find(row[0]);
    if (c == country.end()) throw DataError("categorized tweet " + row[0] + " is not in the cohort");
    if (c->second == kUnknownCountry) continue;
    cat_records.push_back({c->second, date.at(row[0]), row[1]});
  }
  const auto table = category_period_table(cat_records, columns);
  auto out = open_out(cfg, "category_periods.csv");
  std::vector<std::string> head = {"period", "country"};
  for (const auto& c : columns) head.push_back(c);
  head.emplace_back("total");
  for (const auto& c : columns) head.push_back(c + "_percent");
  out << csv::join(head) << '\n';
  for (const auto& row : table.rows) {
    std::vector<std::string> cells = {row.period, row.country};
    for (auto c : row.counts) cells.push_back(std::to_string(c));
    cells.push_back(std::to_string(row.total));
    for (double p : row.percent) cells.push_back(fixed(p, 2));
    out << csv::join(cells) << '\n';
  }
  out.close();
  m.output("category_periods.csv");
  m.extra() = {{"min_count", cfg.min_count}};
  m.write();
}

void cmd_leadlag(const RunConfig& cfg) {
  Manifest m(cfg, "leadlag");
  const Cohort cohort = load_artifact_cohort(cfg, m, "retrospective.jsonl", CohortKind::Retrospective, "ingest");
  const auto labels = read_labels(cfg, m);
  std::vector<std::pair<Date, bool>> records;
  for (const auto& r : cohort.records())
    records.emplace_back(to_date(r.tweet.created_at), label_of(labels, r.tweet.id) == Label::Misinformation);
  const TimeSeries rate = build_series(records, cfg.granularity, SeriesMode::Rate, "misinfo_rate");
  const TimeSeries count = build_series(records, cfg.granularity, SeriesMode::Count, "misinfo_count");
  write_series_csv(rate, cfg.out / "series_misinfo_rate.csv");
  write_series_csv(count, cfg.out / "series_misinfo_count.csv");
  m.output("series_misinfo_rate.csv");
  m.output("series_misinfo_count.csv");

  ojson summary;
  summary["granularity"] = granularity_name(cfg.granularity);
  summary["max_lag"] = cfg.max_lag;
  summary["convention"] = "positive lag: misinformation rate leads the external series";
  summary["series"] = ojson::array();
  for (const auto& spec : cfg.external_series) {
    m.input(spec.path);
    TimeSeries ext = load_external_series(spec.path, spec.granularity, spec.label);
    if (cfg.granularity == Granularity::Monthly) ext = to_monthly(ext, spec.resample);
    if (ext.granularity != cfg.granularity)
      throw ConfigError("external series " + spec.label + " is coarser than analysis.granularity");
    const std::string name = "series_" + spec.label + ".csv";
    write_series_csv(ext, cfg.out / name);
    m.output(name);
    const LagResult lag = lead_lag(rate, ext, cfg.max_lag);
    ojson corr = ojson::object();
    for (const auto& [k, r] : lag.correlations) corr[std::to_string(k)] = r;
    summary["series"].push_back({{"label", spec.label},
                                 {"best_lag", lag.best_lag},
                                 {"best_r", lag.best_r},
                                 {"overlap", lag.overlap},
                                 {"relation", lag.best_lag > 0   ? "misinformation leads"
                                              : lag.best_lag < 0 ? "misinformation lags"
                                                                 : "coincident"},
                                 {"correlations", corr}});
  }
  ojson shares = ojson::object();
  const std::pair<Wave, std::pair<Date, Date>> windows[] = {
      {Wave::First, {std::chrono::year{2020} / 1 / 1, std::chrono::year{2020} / 6 / 30}},
      {Wave::Delta, {std::chrono::year{2021} / 4 / 1, std::chrono::year{2021} / 10 / 31}},
      {Wave::Omicron, {std::chrono::year{2021} / 12 / 1, std::chrono::year{2022} / 3 / 31}}};
  for (const auto& [wave, range] : windows) {
    const PeriodShare share = period_share(count, range.first, range.second);
    shares[std::string(wave_name(wave))] = share.undefined ? ojson(nullptr) : ojson(share.fraction);
  }
  summary["misinformation_share_by_wave"] = shares;
  open_out(cfg, "leadlag.json") << summary.dump(2) << '\n';
  m.output("leadlag.json");
  m.write();
}

void cmd_report(const RunConfig& cfg) {
  Manifest m(cfg, "report");
  const std::vector<std::pair<std::string, std::string>> parts = {
      {"metrics.json", "evaluate"},           {"rates_by_country.csv", "stratify"},
      {"rates_by_wave.csv", "stratify"},      {"category_periods.csv", "stratify"},
      {"emotion_country_matrix.csv", "emotions"}, {"emotion_confusion.csv", "emotions"},
      {"category_counts.csv", "categories"},  {"leadlag.json", "leadlag"}};
  for (const auto& [name, producer] : parts) m.input(need_artifact(cfg, name, producer));

  const json metrics = json::parse(read_file(cfg.out / "metrics.json"));
  const json leadlag = json::parse(read_file(cfg.out / "leadlag.json"));
  std::string md = "# Infodemic report\n\n";
  md += "## Classifier (test split)\n\n";
  md += markdown_table({{"accuracy", "precision", "recall", "f1"},
                        {fixed(metrics["accuracy"].get<double>(), 4), fixed(metrics["precision"].get<double>(), 4),
                         fixed(metrics["recall"].get<double>(), 4), fixed(metrics["f1"].get<double>(), 4)}});
  md += "\n## Misinformation rate by country\n\n" + markdown_table(read_csv_rows(cfg.out / "rates_by_country.csv"));
  md += "\n## Misinformation rate by wave\n\n" + markdown_table(read_csv_rows(cfg.out / "rates_by_wave.csv"));
  md += "\n## Dominant emotion of misinformation by country (%)\n\n" +
        markdown_table(read_csv_rows(cfg.out / "emotion_country_matrix.csv"));
  md += "\n## Per-emotion classifier confusion\n\n" +
        markdown_table(read_csv_rows(cfg.out / "emotion_confusion.csv"));
  md += "\n## Categories of misinformation\n\n" + markdown_table(read_csv_rows(cfg.out / "category_counts.csv"));
  md += "\n## Categories by half-year and country\n\n" +
        markdown_table(read_csv_rows(cfg.out / "category_periods.csv"));
  md += "\n## Lead-lag against external series\n\n";
  std::vector<std::vector<std::string>> lag_rows = {{"series", "best_lag", "best_r", "relation"}};
  for (const auto& s : leadlag["series"])
    lag_rows.push_back({s["label"].get<std::string>(), std::to_string(s["best_lag"].get<int>()),
                        fixed(s["best_r"].get<double>(), 4), s["relation"].get<std::string>()});
  md += markdown_table(lag_rows);
  open_out(cfg, "report.md") << md;
  m.output("report.md");
  m.write();
}

void cmd_run(const RunConfig& cfg) {
  cmd_ingest(cfg);
  cmd_split(cfg);
  cmd_train(cfg);
  cmd_evaluate(cfg);
  cmd_label(cfg);
  cmd_emotions(cfg);
  cmd_categories(cfg);
  cmd_stratify(cfg);
  cmd_leadlag(cfg);
  cmd_report(cfg);
}

}  // namespace infodemic
