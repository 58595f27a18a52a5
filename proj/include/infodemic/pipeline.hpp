#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "infodemic/analytics.hpp"
#include "infodemic/lstm.hpp"

namespace infodemic {

inline constexpr const char* kVersion = "0.1.0";

struct ExternalSeriesSpec {
  std::string label;
  std::filesystem::path path;
  Granularity granularity = Granularity::Daily;
  Resample resample = Resample::Mean;
};

struct RunConfig {
  std::uint64_t seed = 42;
  std::filesystem::path out = "out";
  int workers = 1;

  std::optional<std::filesystem::path> discovery;
  std::optional<std::filesystem::path> retrospective;
  std::optional<std::filesystem::path> embeddings;
  std::optional<std::filesystem::path> subwords;
  std::optional<std::filesystem::path> lexicon;
  std::optional<std::filesystem::path> seeds;
  std::optional<std::filesystem::path> gazetteer;
  std::optional<std::filesystem::path> stopwords;  // NLTK English when unset
  std::vector<ExternalSeriesSpec> external_series;

  TrainConfig train;

  double threshold = 0.75;
  std::size_t min_count = 50;
  int max_lag = 6;
  Granularity granularity = Granularity::Monthly;
  std::size_t top_n = 5;
  double train_fraction = 0.8;
  std::size_t keywords_top_k = 10;
  std::string oov_policy = "auto";  // auto | skip | subword | zero

  // Relative paths inside the file are taken relative to the file's
  // directory. Unknown keys throw ConfigError.
  static RunConfig load(const std::filesystem::path& path);
  static RunConfig from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);

  // Canonical form used for hashing; excludes `out` and `workers`, which do
  // not affect output contents.
  nlohmann::json to_json() const;
  std::string hash() const;

  // Throws ConfigError on out-of-range knobs or referenced paths that do not
  // exist.
  void validate() const;
};

// 64-bit FNV-1a of the file contents, as 16 hex digits.
std::string file_digest(const std::filesystem::path& path);

// Each command reads upstream artifacts from cfg.out, writes its own files
// there, and records them in manifests/<command>.json. Missing upstream
// artifacts throw MissingDependency.
void cmd_ingest(const RunConfig& cfg);
void cmd_split(const RunConfig& cfg);
void cmd_train(const RunConfig& cfg);
// With `predictions` (CSV id,gold,predicted) only the metrics are computed;
// otherwise the trained model is run over the test split.
void cmd_evaluate(const RunConfig& cfg, const std::optional<std::filesystem::path>& predictions = std::nullopt);
void cmd_label(const RunConfig& cfg);
void cmd_emotions(const RunConfig& cfg);
void cmd_categories(const RunConfig& cfg);
void cmd_stratify(const RunConfig& cfg);
void cmd_leadlag(const RunConfig& cfg);
void cmd_report(const RunConfig& cfg);
void cmd_run(const RunConfig& cfg);

}  // namespace infodemic
