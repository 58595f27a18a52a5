#include "infodemic/categories.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>

#include "infodemic/errors.hpp"

namespace infodemic {

CategorySet::CategorySet(std::vector<std::string> names, std::map<std::string, std::vector<std::string>> seeds)
    : names_(std::move(names)), seeds_(std::move(seeds)) {
  std::set<std::string> unique(names_.begin(), names_.end());
  if (unique.size() != names_.size()) throw DataError("category names must be unique");
  for (const auto& n : names_) {
    if (n == kUncategorized) throw DataError(std::string("'") + kUncategorized + "' is reserved");
    auto it = seeds_.find(n);
    if (it == seeds_.end() || it->second.empty()) throw DataError("category '" + n + "' has no seed phrases");
  }
  for (const auto& [name, _] : seeds_) {
    if (!unique.count(name)) throw DataError("seeds given for undeclared category '" + name + "'");
  }
}

CategorySet CategorySet::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open seeds file: " + path.string());
  std::vector<std::string> names;
  std::map<std::string, std::vector<std::string>> seeds;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || tab + 1 >= line.size())
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": expected category<TAB>phrase");
    std::string cat = line.substr(0, tab);
    if (!seeds.count(cat)) names.push_back(cat);
    seeds[cat].push_back(line.substr(tab + 1));
  }
  return CategorySet(std::move(names), std::move(seeds));
}

TermWeightMatrix ctfidf_matrix(const std::vector<std::pair<std::string, std::vector<Document>>>& docs_by_class) {
  if (docs_by_class.size() < 2) throw std::invalid_argument("c-TF-IDF needs at least two classes");
  const std::size_t n_classes = docs_by_class.size();
  std::map<std::string, std::vector<std::size_t>> counts;
  for (std::size_t c = 0; c < n_classes; ++c) {
    const auto& [name, docs] = docs_by_class[c];
    std::size_t class_terms = 0;
    auto bump = [&](const std::string& term) {
      auto& row = counts[term];
      if (row.empty()) row.assign(n_classes, 0);
      ++row[c];
      ++class_terms;
    };
    for (const auto& doc : docs) {
      for (std::size_t i = 0; i < doc.size(); ++i) {
        bump(doc[i]);
        if (i + 1 < doc.size()) bump(doc[i] + " " + doc[i + 1]);
      }
    }
    if (class_terms == 0) throw std::invalid_argument("class '" + name + "' has no terms");
  }

  TermWeightMatrix m;
  for (const auto& [name, _] : docs_by_class) m.classes.push_back(name);
  m.terms.reserve(counts.size());
  m.weights.reserve(counts.size() * n_classes);
  m.raw_counts.reserve(counts.size() * n_classes);
  std::size_t total = 0;
  for (const auto& [term, row] : counts) total = std::accumulate(row.begin(), row.end(), total);
  m.average_class_length = static_cast<double>(total) / static_cast<double>(n_classes);
  for (const auto& [term, row] : counts) {
    m.terms.push_back(term);
    const double f = static_cast<double>(std::accumulate(row.begin(), row.end(), std::size_t{0}));
    const double idf = std::log(1.0 + m.average_class_length / f);
    for (std::size_t c = 0; c < n_classes; ++c) {
      m.raw_counts.push_back(row[c]);
      m.weights.push_back(static_cast<double>(row[c]) * idf);
    }
  }
  return m;
}

std::map<std::string, std::vector<std::string>> ctfidf_keywords(
    const std::vector<std::pair<std::string, std::vector<Document>>>& docs_by_class, std::size_t top_k) {
  const TermWeightMatrix m = ctfidf_matrix(docs_by_class);
  std::map<std::string, std::vector<std::string>> out;
  std::vector<std::size_t> order(m.terms.size());
  for (std::size_t c = 0; c < m.classes.size(); ++c) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (m.weight(a, c) != m.weight(b, c)) return m.weight(a, c) > m.weight(b, c);
      if (m.count(a, c) != m.count(b, c)) return m.count(a, c) > m.count(b, c);
      return m.terms[a] < m.terms[b];
    });
    auto& ranked = out[m.classes[c]];
    for (std::size_t i = 0; i < order.size() && ranked.size() < top_k; ++i) {
      if (m.count(order[i], c) == 0) break;
      ranked.push_back(m.terms[order[i]]);
    }
  }
  return out;
}

Vector seed_embedding(const EmbeddingTable& table, std::string_view phrase, const StopwordList& stops,
                      OovPolicy policy) {
  const auto tokens = preprocess_text(phrase, stops);
  return mean_embedding(table, tokens, policy).vector;
}

SeedVectors embed_seeds(const EmbeddingTable& table, const CategorySet& cats, const StopwordList& stops,
                        OovPolicy policy) {
  SeedVectors out;
  for (const auto& name : cats.names()) {
    out.categories.push_back(name);
    auto& vecs = out.vectors.emplace_back();
    for (const auto& phrase : cats.seeds(name)) vecs.push_back(seed_embedding(table, phrase, stops, policy));
  }
  return out;
}

std::vector<std::size_t> seed_votes(std::span<const double> tweet_vec, const SeedVectors& seeds, double threshold) {
  std::vector<std::size_t> votes(seeds.categories.size(), 0);
  for (std::size_t c = 0; c < seeds.vectors.size(); ++c) {
    for (const auto& s : seeds.vectors[c]) {
      if (s.size() != tweet_vec.size())
        throw std::invalid_argument("tweet vector and seed vector dimensions differ");
      if (cosine(tweet_vec, s) > threshold) ++votes[c];
    }
  }
  return votes;
}

std::string classify_category(std::span<const double> tweet_vec, const SeedVectors& seeds, double threshold,
                              Rng& rng) {
  if (!(threshold > 0.0 && threshold < 1.0)) throw std::invalid_argument("category threshold must lie in (0, 1)");
  const auto votes = seed_votes(tweet_vec, seeds, threshold);
  const std::size_t best = votes.empty() ? 0 : *std::max_element(votes.begin(), votes.end());
  if (best == 0) return kUncategorized;
  std::vector<std::size_t> tied;
  for (std::size_t c = 0; c < votes.size(); ++c) {
    if (votes[c] == best) tied.push_back(c);
  }
  const std::size_t pick = tied.size() == 1 ? tied[0] : tied[rng.uniform_index(tied.size())];
  return seeds.categories[pick];
}

CohortCategories categorize_cohort(std::span<const ProcessedTweet> tweets, const EmbeddingTable& table,
                                   const SeedVectors& seeds, double threshold, std::uint64_t global_seed,
                                   OovPolicy policy) {
  CohortCategories out;
  out.columns = seeds.categories;
  out.columns.emplace_back(kUncategorized);
  out.counts.assign(out.columns.size(), 0);
  std::map<std::string, std::size_t> column_index;
  for (std::size_t i = 0; i < out.columns.size(); ++i) column_index[out.columns[i]] = i;
  out.assignments.reserve(tweets.size());
  for (const auto& tweet : tweets) {
    const auto embedding = mean_embedding(table, tweet.tokens, policy);
    Rng rng(derive_seed(global_seed, tweet.id));
    std::string category = classify_category(embedding.vector, seeds, threshold, rng);
    ++out.counts[column_index.at(category)];
    out.assignments.push_back({tweet.id, std::move(category)});
  }
  return out;
}

}  // namespace infodemic
