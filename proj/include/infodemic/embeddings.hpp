#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace infodemic {

using Vector = std::vector<double>;

inline constexpr std::uint32_t kDefaultBucketCount = 2'000'000;
inline constexpr int kDefaultMinN = 3;
inline constexpr int kDefaultMaxN = 6;

// How mean_embedding treats tokens missing from the vocabulary.
enum class OovPolicy { Skip, Subword, Zero };

// Word -> dense vector table with optional fastText-style subword buckets.
// Immutable once built; safe for concurrent reads.
class EmbeddingTable {
 public:
  explicit EmbeddingTable(std::size_t dim);

  std::size_t dim() const { return dim_; }
  std::size_t vocab_size() const { return index_.size(); }
  bool has_subwords() const { return bucket_count_ > 0; }
  std::size_t bucket_count() const { return bucket_count_; }
  int min_n() const { return min_n_; }
  int max_n() const { return max_n_; }

  // Inserts or overwrites. Returns false when the word already existed.
  // Throws DataError on a wrong-sized or non-finite vector.
  bool set(const std::string& word, std::span<const double> values);

  // Throws DataError unless buckets.size() is a positive multiple of dim
  // and 3 <= min_n <= max_n.
  void set_subwords(std::vector<double> buckets, int min_n = kDefaultMinN, int max_n = kDefaultMaxN);

  std::optional<std::span<const double>> lookup(std::string_view word) const;
  std::span<const double> bucket(std::size_t i) const;

  // Words in insertion order.
  const std::vector<std::string>& words() const { return words_; }

 private:
  std::size_t dim_;
  std::vector<std::string> words_;
  std::vector<double> values_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<double> buckets_;
  std::size_t bucket_count_ = 0;
  int min_n_ = kDefaultMinN;
  int max_n_ = kDefaultMaxN;
};

struct EmbeddingLoad {
  EmbeddingTable table;
  std::vector<std::string> warnings;
};

// Text vector format: optional "<vocab_size> <dim>" header (detected when the
// first line has exactly two integer fields), then "word v1 ... v_dim".
// Lines with non-numeric components are skipped with a warning; a line with
// the wrong number of components is fatal (DataError). Duplicate words: the
// last occurrence wins, with a warning. The optional bucket file uses the
// same layout with words "bucket_<i>".
EmbeddingLoad load_embeddings(const std::filesystem::path& path,
                              const std::optional<std::filesystem::path>& subword_path = std::nullopt,
                              int min_n = kDefaultMinN, int max_n = kDefaultMaxN);

// Writes the vocabulary (with header) and, if present, the bucket table.
void save_embeddings(const EmbeddingTable& table, const std::filesystem::path& path,
                     const std::optional<std::filesystem::path>& subword_path = std::nullopt);

// fastText's string hash: 32-bit FNV-1a over bytes sign-extended from int8.
std::uint32_t fasttext_hash(std::string_view s);

// Character n-grams (by UTF-8 code point) of "<word>" for n in [min_n, max_n],
// excluding the single-character boundary grams "<" and ">".
std::vector<std::string> char_ngrams(std::string_view word, int min_n, int max_n);

// Mean of the bucket vectors selected by hashing each n-gram of the word.
// Throws std::logic_error if the table carries no subword buckets.
Vector subword_vector(const EmbeddingTable& table, std::string_view word);

struct MeanEmbedding {
  Vector vector;
  bool empty = false;  // no token produced a vector
};

// Arithmetic mean over tokens. Subword policy requires subword buckets.
MeanEmbedding mean_embedding(const EmbeddingTable& table, std::span<const std::string> tokens, OovPolicy policy);

// Subword when the table carries buckets, otherwise Skip.
OovPolicy default_oov_policy(const EmbeddingTable& table);

// u.v / (|u||v|); 0 when either norm is zero. Throws on dim mismatch.
double cosine(std::span<const double> u, std::span<const double> v);

}  // namespace infodemic
