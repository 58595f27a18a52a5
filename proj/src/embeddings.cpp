#include "infodemic/embeddings.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "infodemic/errors.hpp"

namespace infodemic {
namespace {

std::vector<std::string_view> split_spaces(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    if (i > start) fields.push_back(line.substr(start, i - start));
  }
  return fields;
}

bool parse_double(std::string_view s, double& out) {
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size() && std::isfinite(out);
}

bool parse_size(std::string_view s, std::size_t& out) {
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

struct RawVectors {
  std::size_t dim = 0;
  std::vector<std::string> words;
  std::vector<double> values;
};

RawVectors read_vector_file(const std::filesystem::path& path, std::vector<std::string>& warnings) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open vector file: " + path.string());
  RawVectors raw;
  std::string line;
  std::size_t line_no = 0;
  bool first = true;
  std::vector<double> row;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto fields = split_spaces(line);
    if (fields.empty()) continue;
    if (first) {
      first = false;
      std::size_t n_words, n_dim;
      if (fields.size() == 2 && parse_size(fields[0], n_words) && parse_size(fields[1], n_dim)) {
        if (n_dim == 0) throw DataError(path.string() + ": header declares zero dimensions");
        raw.dim = n_dim;
        continue;
      }
    }
    row.clear();
    bool numeric = true;
    for (std::size_t k = 1; k < fields.size(); ++k) {
      double v;
      if (!parse_double(fields[k], v)) {
        numeric = false;
        break;
      }
      row.push_back(v);
    }
    if (!numeric) {
      warnings.push_back(path.string() + ":" + std::to_string(line_no) + ": non-numeric component, line skipped");
      continue;
    }
    if (raw.dim == 0) {
      if (row.empty()) throw DataError(path.string() + ":" + std::to_string(line_no) + ": vector has no components");
      raw.dim = row.size();
    }
    if (row.size() != raw.dim) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": expected " + std::to_string(raw.dim) +
                      " components, found " + std::to_string(row.size()));
    }
    raw.words.emplace_back(fields[0]);
    raw.values.insert(raw.values.end(), row.begin(), row.end());
  }
  return raw;
}

void write_row(std::FILE* f, std::string_view word, std::span<const double> values) {
  std::fwrite(word.data(), 1, word.size(), f);
  for (double v : values) std::fprintf(f, " %.17g", v);
  std::fputc('\n', f);
}

}  // namespace

EmbeddingTable::EmbeddingTable(std::size_t dim) : dim_(dim) {
  if (dim == 0) throw DataError("embedding dimension must be positive");
}

bool EmbeddingTable::set(const std::string& word, std::span<const double> values) {
  if (values.size() != dim_)
    throw DataError("vector for '" + word + "' has " + std::to_string(values.size()) + " components, table dim is " +
                    std::to_string(dim_));
  for (double v : values) {
    if (!std::isfinite(v)) throw DataError("non-finite component in vector for '" + word + "'");
  }
  auto [it, inserted] = index_.try_emplace(word, words_.size());
  if (inserted) {
    words_.push_back(word);
    values_.insert(values_.end(), values.begin(), values.end());
  } else {
    std::copy(values.begin(), values.end(), values_.begin() + static_cast<std::ptrdiff_t>(it->second * dim_));
  }
  return inserted;
}

void EmbeddingTable::set_subwords(std::vector<double> buckets, int min_n, int max_n) {
  if (buckets.empty() || buckets.size() % dim_ != 0)
    throw DataError("subword bucket table size is not a positive multiple of the dimension");
  if (min_n < 3 || max_n < min_n) throw DataError("subword n-gram range must satisfy 3 <= min_n <= max_n");
  for (double v : buckets) {
    if (!std::isfinite(v)) throw DataError("non-finite component in subword bucket table");
  }
  buckets_ = std::move(buckets);
  bucket_count_ = buckets_.size() / dim_;
  min_n_ = min_n;
  max_n_ = max_n;
}

std::optional<std::span<const double>> EmbeddingTable::lookup(std::string_view word) const {
  auto it = index_.find(std::string(word));
  if (it == index_.end()) return std::nullopt;
  return std::span<const double>(values_.data() + it->second * dim_, dim_);
}

std::span<const double> EmbeddingTable::bucket(std::size_t i) const {
  return std::span<const double>(buckets_.data() + i * dim_, dim_);
}

EmbeddingLoad load_embeddings(const std::filesystem::path& path, const std::optional<std::filesystem::path>& subword_path,
                              int min_n, int max_n) {
  std::vector<std::string> warnings;
  RawVectors raw = read_vector_file(path, warnings);
  if (raw.dim == 0) throw DataError(path.string() + ": no vectors found");
  EmbeddingTable table(raw.dim);
  for (std::size_t i = 0; i < raw.words.size(); ++i) {
    std::span<const double> v(raw.values.data() + i * raw.dim, raw.dim);
    if (!table.set(raw.words[i], v)) warnings.push_back("duplicate word '" + raw.words[i] + "', last occurrence kept");
  }
  if (subword_path) {
    RawVectors b = read_vector_file(*subword_path, warnings);
    if (b.dim != raw.dim)
      throw DataError(subword_path->string() + ": bucket dimension " + std::to_string(b.dim) +
                      " differs from vocabulary dimension " + std::to_string(raw.dim));
    const std::size_t n = b.words.size();
    std::vector<double> buckets(n * raw.dim, 0.0);
    std::vector<bool> seen(n, false);
    for (std::size_t i = 0; i < n; ++i) {
      std::string_view w = b.words[i];
      std::size_t idx;
      if (!w.starts_with("bucket_") || !parse_size(w.substr(7), idx) || idx >= n || seen[idx])
        throw DataError(subword_path->string() + ": bucket rows must be bucket_0 .. bucket_" + std::to_string(n - 1) +
                        ", each exactly once (offending '" + std::string(w) + "')");
      seen[idx] = true;
      std::copy_n(b.values.begin() + static_cast<std::ptrdiff_t>(i * raw.dim), raw.dim,
                  buckets.begin() + static_cast<std::ptrdiff_t>(idx * raw.dim));
    }
    table.set_subwords(std::move(buckets), min_n, max_n);
  }
  return {std::move(table), std::move(warnings)};
}

void save_embeddings(const EmbeddingTable& table, const std::filesystem::path& path,
                     const std::optional<std::filesystem::path>& subword_path) {
  std::FILE* f = std::fopen(path.string().c_str(), "wb");
  if (!f) throw DataError("cannot write " + path.string());
  std::fprintf(f, "%zu %zu\n", table.vocab_size(), table.dim());
  for (const auto& w : table.words()) write_row(f, w, *table.lookup(w));
  std::fclose(f);
  if (subword_path && table.has_subwords()) {
    f = std::fopen(subword_path->string().c_str(), "wb");
    if (!f) throw DataError("cannot write " + subword_path->string());
    std::fprintf(f, "%zu %zu\n", table.bucket_count(), table.dim());
    for (std::size_t i = 0; i < table.bucket_count(); ++i) write_row(f, "bucket_" + std::to_string(i), table.bucket(i));
    std::fclose(f);
  }
}

std::uint32_t fasttext_hash(std::string_view s) {
  std::uint32_t h = 2166136261u;
  for (char c : s) {
    h ^= static_cast<std::uint32_t>(static_cast<std::int8_t>(c));
    h *= 16777619u;
  }
  return h;
}

std::vector<std::string> char_ngrams(std::string_view word, int min_n, int max_n) {
  const std::string wrapped = "<" + std::string(word) + ">";
  std::vector<std::string> grams;
  for (std::size_t i = 0; i < wrapped.size(); ++i) {
    if ((static_cast<unsigned char>(wrapped[i]) & 0xC0) == 0x80) continue;  // not a code point start
    std::string gram;
    std::size_t j = i;
    for (int n = 1; j < wrapped.size() && n <= max_n; ++n) {
      gram.push_back(wrapped[j++]);
      while (j < wrapped.size() && (static_cast<unsigned char>(wrapped[j]) & 0xC0) == 0x80) gram.push_back(wrapped[j++]);
      if (n >= min_n && !(n == 1 && (i == 0 || j == wrapped.size()))) grams.push_back(gram);
    }
  }
  return grams;
}

Vector subword_vector(const EmbeddingTable& table, std::string_view word) {
  if (!table.has_subwords())
    throw std::logic_error("embedding table has no subword buckets; choose the Skip or Zero OOV policy");
  Vector out(table.dim(), 0.0);
  const auto grams = char_ngrams(word, table.min_n(), table.max_n());
  if (grams.empty()) return out;
  for (const auto& g : grams) {
    auto b = table.bucket(fasttext_hash(g) % table.bucket_count());
    for (std::size_t d = 0; d < out.size(); ++d) out[d] += b[d];
  }
  for (double& x : out) x /= static_cast<double>(grams.size());
  return out;
}

MeanEmbedding mean_embedding(const EmbeddingTable& table, std::span<const std::string> tokens, OovPolicy policy) {
  if (policy == OovPolicy::Subword && !table.has_subwords())
    throw std::logic_error("Subword OOV policy requested but the embedding table has no subword buckets");
  MeanEmbedding result{Vector(table.dim(), 0.0), false};
  std::size_t count = 0;
  for (const auto& t : tokens) {
    if (auto v = table.lookup(t)) {
      for (std::size_t d = 0; d < v->size(); ++d) result.vector[d] += (*v)[d];
      ++count;
    } else if (policy == OovPolicy::Subword) {
      Vector sv = subword_vector(table, t);
      for (std::size_t d = 0; d < sv.size(); ++d) result.vector[d] += sv[d];
      ++count;
    } else if (policy == OovPolicy::Zero) {
      ++count;
    }
  }
  if (count == 0) {
    result.empty = true;
    return result;
  }
  for (double& x : result.vector) x /= static_cast<double>(count);
  return result;
}

OovPolicy default_oov_policy(const EmbeddingTable& table) {
  return table.has_subwords() ? OovPolicy::Subword : OovPolicy::Skip;
}

double cosine(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size())
    throw std::invalid_argument("cosine: dimension mismatch (" + std::to_string(u.size()) + " vs " +
                                std::to_string(v.size()) + ")");
  double dot = 0.0, nu = 0.0, nv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot += u[i] * v[i];
    nu += u[i] * u[i];
    nv += v[i] * v[i];
  }
  if (nu == 0.0 || nv == 0.0) return 0.0;
  double c = dot / (std::sqrt(nu) * std::sqrt(nv));
  return std::clamp(c, -1.0, 1.0);
}

}  // namespace infodemic
