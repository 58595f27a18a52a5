#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "infodemic/embeddings.hpp"
#include "infodemic/preprocess.hpp"
#include "infodemic/random.hpp"

namespace infodemic {

inline constexpr const char* kUncategorized = "Uncategorized";
inline constexpr double kDefaultCategoryThreshold = 0.75;

class CategorySet {
 public:
  CategorySet() = default;
  // Throws DataError on duplicate names or a category without seeds.
  CategorySet(std::vector<std::string> names, std::map<std::string, std::vector<std::string>> seeds);

  // TSV "category<TAB>phrase"; category order is first appearance.
  static CategorySet load(const std::filesystem::path& path);

  const std::vector<std::string>& names() const { return names_; }
  const std::vector<std::string>& seeds(const std::string& category) const { return seeds_.at(category); }
  std::size_t size() const { return names_.size(); }

 private:
  std::vector<std::string> names_;
  std::map<std::string, std::vector<std::string>> seeds_;
};

// Class-document term statistics over unigrams and bigrams.
struct TermWeightMatrix {
  std::vector<std::string> terms;    // sorted lexicographically
  std::vector<std::string> classes;  // input class order
  // Row-major: [term][class].
  std::vector<double> weights;
  std::vector<std::size_t> raw_counts;
  double average_class_length = 0.0;  // mean term tokens per class-document

  double weight(std::size_t term, std::size_t cls) const { return weights[term * classes.size() + cls]; }
  std::size_t count(std::size_t term, std::size_t cls) const { return raw_counts[term * classes.size() + cls]; }
};

using Document = std::vector<std::string>;

// Class-based TF-IDF. Each class's documents are concatenated into one
// class-document; terms are unigrams plus within-document bigrams.
//   W(t, c) = tf(t, c) * log(1 + A / f(t)),  f(t) = sum_c tf(t, c),
//   A = mean term tokens per class-document.
// Throws std::invalid_argument for fewer than two classes or an empty class.
TermWeightMatrix ctfidf_matrix(const std::vector<std::pair<std::string, std::vector<Document>>>& docs_by_class);

// Top-k terms per class by weight, ties by raw count then lexicographic.
std::map<std::string, std::vector<std::string>> ctfidf_keywords(
    const std::vector<std::pair<std::string, std::vector<Document>>>& docs_by_class, std::size_t top_k);

// Mean of the phrase's token vectors (tokens from preprocess_text).
Vector seed_embedding(const EmbeddingTable& table, std::string_view phrase, const StopwordList& stops,
                      OovPolicy policy);

// Seed vectors per category, index-aligned with CategorySet::names().
struct SeedVectors {
  std::vector<std::string> categories;
  std::vector<std::vector<Vector>> vectors;
};

SeedVectors embed_seeds(const EmbeddingTable& table, const CategorySet& cats, const StopwordList& stops,
                        OovPolicy policy);

// Number of seeds per category whose cosine with tweet_vec exceeds threshold.
std::vector<std::size_t> seed_votes(std::span<const double> tweet_vec, const SeedVectors& seeds, double threshold);

// Category with the most votes; ties broken uniformly with rng; no votes
// -> kUncategorized. Throws std::invalid_argument on a dimension mismatch or
// a threshold outside (0, 1).
std::string classify_category(std::span<const double> tweet_vec, const SeedVectors& seeds, double threshold,
                              Rng& rng);

struct CategoryAssignment {
  std::string tweet_id;
  std::string category;
};

struct CohortCategories {
  std::vector<CategoryAssignment> assignments;
  std::vector<std::string> columns;  // categories then kUncategorized
  std::vector<std::size_t> counts;   // aligned with columns
};

// Per tweet: mean embedding of its tokens, then classify_category with an rng
// seeded from (global_seed, tweet id), so results do not depend on order.
CohortCategories categorize_cohort(std::span<const ProcessedTweet> tweets, const EmbeddingTable& table,
                                   const SeedVectors& seeds, double threshold, std::uint64_t global_seed,
                                   OovPolicy policy);

}  // namespace infodemic
