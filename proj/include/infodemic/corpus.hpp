#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "infodemic/timeutil.hpp"

namespace infodemic {

// Fixed project-wide: 0 is the misinformation class.
enum class Label : int { Misinformation = 0, NotMisinformation = 1 };

inline int to_int(Label l) { return static_cast<int>(l); }
std::optional<Label> label_from_int(long long v);

struct Tweet {
  std::string id;
  std::string text;
  Timestamp created_at;
  std::optional<std::string> location;
  std::optional<std::string> source;
};

struct LabeledTweet {
  Tweet tweet;
  Label label;
};

// A record of a cohort; discovery cohorts require `label` on every record.
struct Record {
  Tweet tweet;
  std::optional<Label> label;
};

enum class CohortKind { Discovery, Retrospective };

class Cohort {
 public:
  Cohort() = default;
  // Throws DataError on duplicate ids or unlabeled discovery records.
  Cohort(CohortKind kind, std::vector<Record> records);

  CohortKind kind() const { return kind_; }
  const std::vector<Record>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  bool fully_labeled() const;

 private:
  CohortKind kind_ = CohortKind::Retrospective;
  std::vector<Record> records_;
};

enum class InputFormat { Jsonl, Csv };

struct RejectionReport {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::map<std::string, std::size_t> reasons;

  void reject(const std::string& reason) {
    ++rejected;
    ++reasons[reason];
  }
  std::string to_json() const;
};

struct IngestResult {
  Cohort cohort;
  RejectionReport report;
};

// Reads tweet records in file order. Records with empty text, unparseable
// dates, missing fields, bad labels or duplicate ids are dropped and counted.
// For a Discovery cohort, unlabeled records are rejected as well.
// Throws DataError when the file cannot be opened.
IngestResult ingest(const std::filesystem::path& path, InputFormat format,
                    CohortKind kind = CohortKind::Retrospective);

std::optional<InputFormat> format_from_extension(const std::filesystem::path& path);

// Writes the cohort as JSONL using the same record schema ingest() reads.
void write_jsonl(const Cohort& cohort, const std::filesystem::path& path);

// Per (source, label) cell, round(cell_size * train_fraction) records go to
// train and the remainder to test. Within a cell the selection is a seeded
// shuffle; both outputs preserve the input order.
std::pair<Cohort, Cohort> stratified_split(const Cohort& cohort, double train_fraction, std::uint64_t seed);

// Train share of one cell, as used by stratified_split.
std::size_t split_train_count(std::size_t cell_size, double train_fraction);

// Cohen's kappa for two binary annotations. Returns 1.0 when expected
// agreement is 1 (both annotators constant and identical).
double cohens_kappa(std::span<const Label> a, std::span<const Label> b);

}  // namespace infodemic
