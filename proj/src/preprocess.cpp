#include "infodemic/preprocess.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <fstream>

#include "infodemic/errors.hpp"
#include "infodemic/porter.hpp"

namespace infodemic {
namespace {

bool is_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x110000) {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

std::string decode_entities(std::string_view in) {
  struct Named {
    std::string_view name;
    std::string_view text;
  };
  static constexpr std::array<Named, 8> kNamed = {{{"amp", "&"},
                                                   {"lt", "<"},
                                                   {"gt", ">"},
                                                   {"quot", "\""},
                                                   {"apos", "'"},
                                                   {"nbsp", " "},
                                                   {"hellip", "..."},
                                                   {"ndash", "-"}}};
  std::string out;
  out.reserve(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) {
    if (in[i] != '&') {
      out.push_back(in[i]);
      continue;
    }
    const std::size_t semi = in.find(';', i + 1);
    if (semi == std::string_view::npos || semi - i > 10) {
      out.push_back('&');
      continue;
    }
    std::string_view body = in.substr(i + 1, semi - i - 1);
    bool decoded = false;
    if (body.size() > 1 && body[0] == '#') {
      std::uint32_t cp = 0;
      const bool hex = body[1] == 'x' || body[1] == 'X';
      std::string_view digits = body.substr(hex ? 2 : 1);
      auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), cp, hex ? 16 : 10);
      if (ec == std::errc{} && ptr == digits.data() + digits.size() && !digits.empty()) {
        append_utf8(out, cp);
        decoded = true;
      }
    } else {
      for (const auto& e : kNamed) {
        if (body == e.name) {
          out += e.text;
          decoded = true;
          break;
        }
      }
    }
    if (decoded) {
      i = semi;
    } else {
      out.push_back('&');
    }
  }
  return out;
}

std::string strip_tags(std::string_view in) {
  std::string out;
  out.reserve(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) {
    if (in[i] == '<' && i + 1 < in.size() && (std::isalpha(static_cast<unsigned char>(in[i + 1])) || in[i + 1] == '/' || in[i + 1] == '!')) {
      const std::size_t close = in.find('>', i + 1);
      if (close != std::string_view::npos) {
        out.push_back(' ');
        i = close;
        continue;
      }
    }
    out.push_back(in[i]);
  }
  return out;
}

bool starts_with_ci(std::string_view s, std::size_t pos, std::string_view prefix) {
  if (pos + prefix.size() > s.size()) return false;
  for (std::size_t k = 0; k < prefix.size(); ++k) {
    if (std::tolower(static_cast<unsigned char>(s[pos + k])) != prefix[k]) return false;
  }
  return true;
}

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

// Drops URLs (http://, https://, www.) and @mentions through the end of the token.
std::string strip_urls_and_mentions(std::string_view in) {
  std::string out;
  out.reserve(in.size());
  std::size_t i = 0;
  while (i < in.size()) {
    const bool boundary = i == 0 || !is_alnum(in[i - 1]);
    if (boundary && (starts_with_ci(in, i, "http://") || starts_with_ci(in, i, "https://") || starts_with_ci(in, i, "www."))) {
      while (i < in.size() && !is_space(in[i])) ++i;
      out.push_back(' ');
      continue;
    }
    if (in[i] == '@' && i + 1 < in.size() && (is_alnum(in[i + 1]) || in[i + 1] == '_')) {
      ++i;
      while (i < in.size() && (is_alnum(in[i]) || in[i] == '_')) ++i;
      out.push_back(' ');
      continue;
    }
    out.push_back(in[i]);
    ++i;
  }
  return out;
}

// Everything outside [A-Za-z0-9'] becomes a space; curly single quotes
// count as apostrophes. Lowercases ASCII letters.
std::string punctuation_to_space(std::string_view in) {
  std::string out;
  out.reserve(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) {
    const auto c = static_cast<unsigned char>(in[i]);
    if (c == 0xE2 && i + 2 < in.size() && static_cast<unsigned char>(in[i + 1]) == 0x80 &&
        (static_cast<unsigned char>(in[i + 2]) == 0x98 || static_cast<unsigned char>(in[i + 2]) == 0x99)) {
      out.push_back('\'');
      i += 2;
    } else if (c < 0x80 && (std::isalnum(c) || c == '\'')) {
      out.push_back(static_cast<char>(std::tolower(c)));
    } else {
      out.push_back(' ');
    }
  }
  return out;
}

std::string collapse(std::string_view in) {
  std::string out;
  out.reserve(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) {
    char c = in[i];
    if (c == '\'') {
      const bool inner = i > 0 && i + 1 < in.size() && is_alnum(in[i - 1]) && is_alnum(in[i + 1]);
      if (!inner) c = ' ';
    }
    if (c == ' ') {
      if (!out.empty() && out.back() != ' ') out.push_back(' ');
    } else {
      out.push_back(c);
    }
  }
  if (!out.empty() && out.back() == ' ') out.pop_back();
  return out;
}

const char* const kNltkEnglish[] = {
    "i",        "me",       "my",         "myself",   "we",        "our",     "ours",     "ourselves", "you",
    "you're",   "you've",   "you'll",     "you'd",    "your",      "yours",   "yourself", "yourselves", "he",
    "him",      "his",      "himself",    "she",      "she's",     "her",     "hers",     "herself",   "it",
    "it's",     "its",      "itself",     "they",     "them",      "their",   "theirs",   "themselves", "what",
    "which",    "who",      "whom",       "this",     "that",      "that'll", "these",    "those",     "am",
    "is",       "are",      "was",        "were",     "be",        "been",    "being",    "have",      "has",
    "had",      "having",   "do",         "does",     "did",       "doing",   "a",        "an",        "the",
    "and",      "but",      "if",         "or",       "because",   "as",      "until",    "while",     "of",
    "at",       "by",       "for",        "with",     "about",     "against", "between",  "into",      "through",
    "during",   "before",   "after",      "above",    "below",     "to",      "from",     "up",        "down",
    "in",       "out",      "on",         "off",      "over",      "under",   "again",    "further",   "then",
    "once",     "here",     "there",      "when",     "where",     "why",     "how",      "all",       "any",
    "both",     "each",     "few",        "more",     "most",      "other",   "some",     "such",      "no",
    "nor",      "not",      "only",       "own",      "same",      "so",      "than",     "too",       "very",
    "s",        "t",        "can",        "will",     "just",      "don",     "don't",    "should",    "should've",
    "now",      "d",        "ll",         "m",        "o",         "re",      "ve",       "y",         "ain",
    "aren",     "aren't",   "couldn",     "couldn't", "didn",      "didn't",  "doesn",    "doesn't",   "hadn",
    "hadn't",   "hasn",     "hasn't",     "haven",    "haven't",   "isn",     "isn't",    "ma",        "mightn",
    "mightn't", "mustn",    "mustn't",    "needn",    "needn't",   "shan",    "shan't",   "shouldn",   "shouldn't",
    "wasn",     "wasn't",   "weren",      "weren't",  "won",       "won't",   "wouldn",   "wouldn't"};

}  // namespace

StopwordList::StopwordList(std::string source_name, std::span<const std::string> words)
    : source_name_(std::move(source_name)) {
  for (const auto& w : words) {
    std::string lower(w);
    for (auto& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    words_.insert(std::move(lower));
  }
}

StopwordList StopwordList::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open stopword file: " + path.string());
  std::vector<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::size_t b = 0, e = line.size();
    while (b < e && is_space(line[b])) ++b;
    while (e > b && is_space(line[e - 1])) --e;
    if (b < e) words.emplace_back(line.substr(b, e - b));
  }
  return StopwordList(path.filename().string(), words);
}

StopwordList StopwordList::english() {
  std::vector<std::string> words(std::begin(kNltkEnglish), std::end(kNltkEnglish));
  return StopwordList("nltk-english", words);
}

std::string clean(std::string_view text) {
  std::string s = decode_entities(text);
  s = strip_tags(s);
  s = strip_urls_and_mentions(s);
  s = punctuation_to_space(s);
  return collapse(s);
}

std::vector<std::string> tokenize(std::string_view cleaned) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < cleaned.size()) {
    while (i < cleaned.size() && is_space(cleaned[i])) ++i;
    std::size_t start = i;
    while (i < cleaned.size() && !is_space(cleaned[i])) ++i;
    if (i > start) tokens.emplace_back(cleaned.substr(start, i - start));
  }
  return tokens;
}

std::vector<std::string> remove_stopwords(std::span<const std::string> tokens, const StopwordList& stops) {
  std::vector<std::string> kept;
  kept.reserve(tokens.size());
  for (const auto& t : tokens) {
    if (!stops.contains(t)) kept.push_back(t);
  }
  return kept;
}

std::vector<std::string> preprocess_text(std::string_view text, const StopwordList& stops) {
  auto tokens = remove_stopwords(tokenize(clean(text)), stops);
  for (auto& t : tokens) t = porter_stem(t);
  return tokens;
}

ProcessedTweet preprocess(const Tweet& tweet, const StopwordList& stops) {
  return ProcessedTweet{tweet.id, preprocess_text(tweet.text, stops), &tweet};
}

}  // namespace infodemic
