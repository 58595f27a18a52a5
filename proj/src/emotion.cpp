#include "infodemic/emotion.hpp"

#include <fstream>

#include "infodemic/errors.hpp"
#include "infodemic/porter.hpp"

namespace infodemic {
namespace {

constexpr std::array<std::string_view, kEmotionCount> kNames = {"joy",     "trust",        "fear",  "surprise",
                                                                "sadness", "anticipation", "anger", "disgust"};

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

std::string_view emotion_name(Emotion e) { return kNames[static_cast<std::size_t>(e)]; }

std::optional<Emotion> emotion_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kNames.size(); ++i) {
    if (kNames[i] == name) return static_cast<Emotion>(i);
  }
  return std::nullopt;
}

EmotionDistribution EmotionDistribution::uniform() {
  EmotionDistribution d;
  d.probs.fill(1.0 / static_cast<double>(kEmotionCount));
  return d;
}

void EmotionLexicon::add(const std::string& stemmed_word, Emotion e) {
  entries_[stemmed_word] |= static_cast<std::uint8_t>(1u << static_cast<unsigned>(e));
}

std::uint8_t EmotionLexicon::associations(std::string_view stemmed_word) const {
  auto it = entries_.find(std::string(stemmed_word));
  return it == entries_.end() ? 0 : it->second;
}

std::array<std::size_t, kEmotionCount> EmotionLexicon::coverage() const {
  std::array<std::size_t, kEmotionCount> counts{};
  for (const auto& [word, mask] : entries_) {
    for (std::size_t e = 0; e < kEmotionCount; ++e) counts[e] += (mask >> e) & 1u;
  }
  return counts;
}

EmotionLexicon EmotionLexicon::load(const std::filesystem::path& path, bool stem_keys) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open emotion lexicon: " + path.string());
  EmotionLexicon lex(path.stem().string(), "file");
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = trim(line);
    if (view.empty() || view.front() == '#') continue;
    const auto t1 = view.find('\t');
    const auto t2 = t1 == std::string_view::npos ? t1 : view.find('\t', t1 + 1);
    if (t2 == std::string_view::npos)
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": expected word<TAB>emotion<TAB>0|1");
    std::string word(trim(view.substr(0, t1)));
    std::string_view emotion = trim(view.substr(t1 + 1, t2 - t1 - 1));
    std::string_view flag = trim(view.substr(t2 + 1));
    if (flag != "0" && flag != "1")
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": association flag must be 0 or 1");
    auto e = emotion_from_name(emotion);
    if (!e || flag == "0" || word.empty()) continue;
    for (auto& c : word) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    lex.add(stem_keys ? porter_stem(word) : word, *e);
  }
  const auto cov = lex.coverage();
  bool any = false;
  for (auto c : cov) any = any || c > 0;
  if (!any) throw DataError("emotion lexicon " + path.string() + " has no associations for any emotion");
  return lex;
}

EmotionDistribution score_emotions(const ProcessedTweet& tweet, const EmotionLexicon& lexicon) {
  if (lexicon.size() == 0) throw DataError("emotion lexicon is empty for all eight emotions");
  std::array<std::size_t, kEmotionCount> counts{};
  std::size_t total = 0;
  for (const auto& token : tweet.tokens) {
    const std::uint8_t mask = lexicon.associations(token);
    for (std::size_t e = 0; e < kEmotionCount; ++e) {
      if ((mask >> e) & 1u) {
        ++counts[e];
        ++total;
      }
    }
  }
  if (total == 0) return EmotionDistribution::uniform();
  EmotionDistribution d;
  for (std::size_t e = 0; e < kEmotionCount; ++e)
    d.probs[e] = static_cast<double>(counts[e]) / static_cast<double>(total);
  return d;
}

LexiconEmotionScorer::LexiconEmotionScorer(EmotionLexicon lexicon) : lexicon_(std::move(lexicon)) {
  const auto cov = lexicon_.coverage();
  bool any = false;
  for (auto c : cov) any = any || c > 0;
  if (!any) throw DataError("emotion lexicon '" + lexicon_.name() + "' is empty for all eight emotions");
}

Emotion dominant_emotion(const EmotionDistribution& dist) {
  std::size_t best = 0;
  for (std::size_t e = 1; e < kEmotionCount; ++e) {
    if (dist.probs[e] > dist.probs[best]) best = e;
  }
  return static_cast<Emotion>(best);
}

EmotionConfusion confusion_from_counts(std::size_t tp, std::size_t tn, std::size_t fp, std::size_t fn) {
  EmotionConfusion c{tp, tn, fp, fn, std::nullopt, std::nullopt, std::nullopt};
  auto ratio = [](std::size_t num, std::size_t den) -> std::optional<double> {
    if (den == 0) return std::nullopt;
    return static_cast<double>(num) / static_cast<double>(den);
  };
  c.sensitivity = ratio(tp, tp + fn);
  c.specificity = ratio(tn, tn + fp);
  c.fp_rate = ratio(fp, tp + tn + fp + fn);
  return c;
}

std::array<EmotionConfusion, kEmotionCount> per_emotion_confusion(std::span<const EmotionRecord> records) {
  std::array<std::array<std::size_t, 4>, kEmotionCount> counts{};  // tp, tn, fp, fn
  for (const auto& r : records) {
    auto& c = counts[static_cast<std::size_t>(r.emotion)];
    const bool gold_pos = r.gold == Label::Misinformation;
    const bool pred_pos = r.predicted == Label::Misinformation;
    if (gold_pos && pred_pos) {
      ++c[0];
    } else if (!gold_pos && !pred_pos) {
      ++c[1];
    } else if (pred_pos) {
      ++c[2];
    } else {
      ++c[3];
    }
  }
  std::array<EmotionConfusion, kEmotionCount> out;
  for (std::size_t e = 0; e < kEmotionCount; ++e)
    out[e] = confusion_from_counts(counts[e][0], counts[e][1], counts[e][2], counts[e][3]);
  return out;
}

}  // namespace infodemic
