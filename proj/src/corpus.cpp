#include "infodemic/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <unordered_set>
#include <variant>
#include <cctype>

#include <json.hpp>

#include "infodemic/csv.hpp"
#include "infodemic/errors.hpp"
#include "infodemic/random.hpp"

namespace infodemic {
namespace {

using nlohmann::json;

bool blank(const std::string& s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

// Raw string-typed fields as they appear in a JSONL object or CSV row.
struct RawRecord {
  std::optional<std::string> id, text, created_at, location, label, source;
};

// Validates one raw record; on failure returns the rejection reason.
std::variant<Record, std::string> validate(const RawRecord& raw, CohortKind kind) {
  if (!raw.id || raw.id->empty() || !raw.text || !raw.created_at) return std::string("missing_field");
  if (blank(*raw.text)) return std::string("empty_text");
  auto ts = parse_timestamp(*raw.created_at);
  if (!ts) return std::string("bad_date");
  Record rec;
  rec.tweet.id = *raw.id;
  rec.tweet.text = *raw.text;
  rec.tweet.created_at = *ts;
  if (raw.location && !raw.location->empty()) rec.tweet.location = raw.location;
  if (raw.source && !raw.source->empty()) rec.tweet.source = raw.source;
  if (raw.label && !raw.label->empty()) {
    const std::string& s = *raw.label;
    if (s == "0") {
      rec.label = Label::Misinformation;
    } else if (s == "1") {
      rec.label = Label::NotMisinformation;
    } else {
      return std::string("bad_label");
    }
  }
  if (kind == CohortKind::Discovery && !rec.label) return std::string("missing_label");
  return rec;
}

std::optional<std::string> json_string_field(const json& obj, const char* key, bool& type_error) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (it->is_string()) return it->get<std::string>();
  if (it->is_number_integer()) return std::to_string(it->get<long long>());
  type_error = true;
  return std::nullopt;
}

template <typename Source>
IngestResult collect(Source&& next_raw, CohortKind kind) {
  IngestResult result;
  std::vector<Record> records;
  std::unordered_set<std::string> seen;
  std::string malformed;
  while (true) {
    std::optional<RawRecord> raw;
    malformed.clear();
    if (!next_raw(raw, malformed)) break;
    if (!malformed.empty()) {
      result.report.reject(malformed);
      continue;
    }
    auto checked = validate(*raw, kind);
    if (auto* reason = std::get_if<std::string>(&checked)) {
      result.report.reject(*reason);
      continue;
    }
    auto& rec = std::get<Record>(checked);
    if (!seen.insert(rec.tweet.id).second) {
      result.report.reject("duplicate_id");
      continue;
    }
    records.push_back(std::move(rec));
  }
  result.report.accepted = records.size();
  result.cohort = Cohort(kind, std::move(records));
  return result;
}

IngestResult ingest_jsonl(std::istream& in, CohortKind kind) {
  std::string line;
  return collect(
      [&](std::optional<RawRecord>& raw, std::string& malformed) {
        while (std::getline(in, line)) {
          if (!line.empty() && line.back() == '\r') line.pop_back();
          if (blank(line)) continue;
          json obj = json::parse(line, nullptr, false);
          if (obj.is_discarded() || !obj.is_object()) {
            malformed = "malformed_record";
            return true;
          }
          bool type_error = false;
          RawRecord r;
          r.id = json_string_field(obj, "id", type_error);
          r.text = json_string_field(obj, "text", type_error);
          r.created_at = json_string_field(obj, "created_at", type_error);
          r.location = json_string_field(obj, "location", type_error);
          r.source = json_string_field(obj, "source", type_error);
          if (auto it = obj.find("label"); it != obj.end() && !it->is_null()) {
            if (it->is_number_integer()) {
              r.label = std::to_string(it->get<long long>());
            } else {
              r.label = "invalid";
            }
          }
          if (type_error) {
            malformed = "malformed_record";
            return true;
          }
          raw = std::move(r);
          return true;
        }
        return false;
      },
      kind);
}

IngestResult ingest_csv(std::istream& in, CohortKind kind) {
  csv::Reader reader(in);
  auto header = reader.next();
  if (!header) return collect([](auto&, auto&) { return false; }, kind);
  std::map<std::string, std::size_t> column;
  for (std::size_t i = 0; i < header->size(); ++i) column[(*header)[i]] = i;
  for (const char* required : {"id", "text", "created_at"}) {
    if (!column.count(required)) throw DataError(std::string("CSV header lacks required column '") + required + "'");
  }
  const std::size_t width = header->size();
  return collect(
      [&](std::optional<RawRecord>& raw, std::string& malformed) {
        auto row = reader.next();
        while (row && row->size() == 1 && row->front().empty()) row = reader.next();
        if (!row) return false;
        if (row->size() != width) {
          malformed = "malformed_record";
          return true;
        }
        auto cell = [&](const char* name) -> std::optional<std::string> {
          auto it = column.find(name);
          if (it == column.end()) return std::nullopt;
          return (*row)[it->second];
        };
        RawRecord r{cell("id"), cell("text"), cell("created_at"), cell("location"), cell("label"), cell("source")};
        raw = std::move(r);
        return true;
      },
      kind);
}

}  // namespace

std::optional<Label> label_from_int(long long v) {
  if (v == 0) return Label::Misinformation;
  if (v == 1) return Label::NotMisinformation;
  return std::nullopt;
}

Cohort::Cohort(CohortKind kind, std::vector<Record> records) : kind_(kind), records_(std::move(records)) {
  std::unordered_set<std::string> ids;
  for (const auto& r : records_) {
    if (!ids.insert(r.tweet.id).second) throw DataError("duplicate tweet id in cohort: " + r.tweet.id);
    if (kind_ == CohortKind::Discovery && !r.label)
      throw DataError("discovery cohort record without label: " + r.tweet.id);
  }
}

bool Cohort::fully_labeled() const {
  return std::all_of(records_.begin(), records_.end(), [](const Record& r) { return r.label.has_value(); });
}

std::string RejectionReport::to_json() const {
  json j;
  j["accepted"] = accepted;
  j["rejected"] = rejected;
  j["reasons"] = json::object();
  for (const auto& [reason, count] : reasons) j["reasons"][reason] = count;
  return j.dump(2);
}

std::optional<InputFormat> format_from_extension(const std::filesystem::path& path) {
  auto ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  if (ext == ".jsonl" || ext == ".json" || ext == ".ndjson") return InputFormat::Jsonl;
  if (ext == ".csv") return InputFormat::Csv;
  return std::nullopt;
}

IngestResult ingest(const std::filesystem::path& path, InputFormat format, CohortKind kind) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open corpus file: " + path.string());
  return format == InputFormat::Jsonl ? ingest_jsonl(in, kind) : ingest_csv(in, kind);
}

void write_jsonl(const Cohort& cohort, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  for (const auto& r : cohort.records()) {
    json j;
    j["id"] = r.tweet.id;
    j["text"] = r.tweet.text;
    j["created_at"] = format_timestamp(r.tweet.created_at);
    j["location"] = r.tweet.location ? json(*r.tweet.location) : json(nullptr);
    j["label"] = r.label ? json(to_int(*r.label)) : json(nullptr);
    j["source"] = r.tweet.source ? json(*r.tweet.source) : json(nullptr);
    out << j.dump() << '\n';
  }
}

std::size_t split_train_count(std::size_t cell_size, double train_fraction) {
  // Half-up rounding with a small guard so that e.g. 1469 * 0.8 stays 1175.
  const double quota = static_cast<double>(cell_size) * train_fraction;
  auto k = static_cast<std::size_t>(std::floor(quota + 0.5 + 1e-9));
  return std::min(k, cell_size);
}

std::pair<Cohort, Cohort> stratified_split(const Cohort& cohort, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw ConfigError("train_fraction must lie strictly between 0 and 1");
  const auto& records = cohort.records();
  std::map<std::pair<std::string, int>, std::vector<std::size_t>> cells;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (!records[i].label) throw DataError("stratified_split requires labeled records; unlabeled: " + records[i].tweet.id);
    cells[{records[i].tweet.source.value_or(""), to_int(*records[i].label)}].push_back(i);
  }
  std::vector<bool> to_train(records.size(), false);
  for (auto& [key, members] : cells) {
    Rng rng(derive_seed(seed, key.first + '\x1f' + std::to_string(key.second)));
    rng.shuffle(std::span<std::size_t>(members));
    const std::size_t k = split_train_count(members.size(), train_fraction);
    for (std::size_t j = 0; j < k; ++j) to_train[members[j]] = true;
  }
  std::vector<Record> train, test;
  for (std::size_t i = 0; i < records.size(); ++i) (to_train[i] ? train : test).push_back(records[i]);
  return {Cohort(cohort.kind(), std::move(train)), Cohort(cohort.kind(), std::move(test))};
}

double cohens_kappa(std::span<const Label> a, std::span<const Label> b) {
  if (a.size() != b.size()) throw std::invalid_argument("cohens_kappa: sequences differ in length");
  if (a.empty()) throw std::invalid_argument("cohens_kappa: empty sequences");
  const double n = static_cast<double>(a.size());
  std::size_t agree = 0, a0 = 0, b0 = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    agree += a[i] == b[i];
    a0 += a[i] == Label::Misinformation;
    b0 += b[i] == Label::Misinformation;
  }
  const double po = static_cast<double>(agree) / n;
  const double pa0 = static_cast<double>(a0) / n, pb0 = static_cast<double>(b0) / n;
  const double pe = pa0 * pb0 + (1.0 - pa0) * (1.0 - pb0);
  if (pe >= 1.0) return 1.0;
  return (po - pe) / (1.0 - pe);
}

}  // namespace infodemic
