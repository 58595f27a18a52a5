#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "infodemic/corpus.hpp"

namespace infodemic {

class StopwordList {
 public:
  StopwordList() = default;
  StopwordList(std::string source_name, std::span<const std::string> words);

  // One lowercase word per line; blank lines and '#' comments ignored.
  static StopwordList load(const std::filesystem::path& path);
  // The English list distributed with NLTK (179 words).
  static StopwordList english();

  bool contains(std::string_view word) const { return words_.count(std::string(word)) > 0; }
  std::size_t size() const { return words_.size(); }
  const std::string& source_name() const { return source_name_; }

 private:
  std::string source_name_;
  std::unordered_set<std::string> words_;
};

struct ProcessedTweet {
  std::string id;
  std::vector<std::string> tokens;
  // Non-owning; points into the cohort the tweet came from (may be null).
  const Tweet* original = nullptr;
};

// Normalizes raw tweet text. Rule order:
//   HTML entities decoded, markup tags removed, URLs removed, @mentions
//   removed, '#' dropped from hashtags, punctuation -> space, lowercase,
//   whitespace collapsed.
// Only [a-z0-9'] and single spaces survive; apostrophes are kept only
// between two alphanumerics. Idempotent.
std::string clean(std::string_view text);

std::vector<std::string> tokenize(std::string_view cleaned);

std::vector<std::string> remove_stopwords(std::span<const std::string> tokens, const StopwordList& stops);

// clean -> tokenize -> stopword removal -> Porter stem.
std::vector<std::string> preprocess_text(std::string_view text, const StopwordList& stops);

ProcessedTweet preprocess(const Tweet& tweet, const StopwordList& stops);

}  // namespace infodemic
