#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "infodemic/corpus.hpp"
#include "infodemic/preprocess.hpp"

namespace infodemic {

// Plutchik primary emotions in canonical order (serialization and tie-break order).
enum class Emotion : int { Joy = 0, Trust, Fear, Surprise, Sadness, Anticipation, Anger, Disgust };

inline constexpr std::size_t kEmotionCount = 8;
inline constexpr std::array<Emotion, kEmotionCount> kAllEmotions = {
    Emotion::Joy,     Emotion::Trust,        Emotion::Fear,  Emotion::Surprise,
    Emotion::Sadness, Emotion::Anticipation, Emotion::Anger, Emotion::Disgust};

std::string_view emotion_name(Emotion e);  // lowercase, e.g. "anticipation"
std::optional<Emotion> emotion_from_name(std::string_view name);

struct EmotionDistribution {
  std::array<double, kEmotionCount> probs{};

  double operator[](Emotion e) const { return probs[static_cast<std::size_t>(e)]; }
  static EmotionDistribution uniform();
};

// Stemmed word -> associated emotions (bitmask over canonical order).
class EmotionLexicon {
 public:
  EmotionLexicon() = default;
  EmotionLexicon(std::string name, std::string version) : name_(std::move(name)), version_(std::move(version)) {}

  // NRC-style TSV "word<TAB>emotion<TAB>0|1". Rows naming emotions outside
  // the Plutchik eight (e.g. positive/negative) are ignored. Words are stemmed
  // with the pipeline's Porter stemmer unless stem_keys is false.
  // Throws DataError if no emotion ends up with an associated word.
  static EmotionLexicon load(const std::filesystem::path& path, bool stem_keys = true);

  void add(const std::string& stemmed_word, Emotion e);
  std::uint8_t associations(std::string_view stemmed_word) const;
  std::size_t size() const { return entries_.size(); }
  // Number of words associated with each emotion.
  std::array<std::size_t, kEmotionCount> coverage() const;

  const std::string& name() const { return name_; }
  const std::string& version() const { return version_; }

 private:
  std::string name_;
  std::string version_;
  std::unordered_map<std::string, std::uint8_t> entries_;
};

// Pluggable scorer; implementations must be pure and thread-safe.
class EmotionScorer {
 public:
  virtual ~EmotionScorer() = default;
  virtual EmotionDistribution score(const ProcessedTweet& tweet) const = 0;
};

// Counts token/emotion associations; no hits -> uniform distribution.
EmotionDistribution score_emotions(const ProcessedTweet& tweet, const EmotionLexicon& lexicon);

class LexiconEmotionScorer : public EmotionScorer {
 public:
  // Throws DataError if the lexicon covers none of the eight emotions.
  explicit LexiconEmotionScorer(EmotionLexicon lexicon);
  EmotionDistribution score(const ProcessedTweet& tweet) const override { return score_emotions(tweet, lexicon_); }

 private:
  EmotionLexicon lexicon_;
};

// argmax, first emotion in canonical order wins ties.
Emotion dominant_emotion(const EmotionDistribution& dist);

struct EmotionRecord {
  Emotion emotion;
  Label gold;
  Label predicted;
};

// Misinformation is the positive class.
struct EmotionConfusion {
  std::size_t tp = 0, tn = 0, fp = 0, fn = 0;
  std::optional<double> sensitivity;  // TP / (TP + FN)
  std::optional<double> specificity;  // TN / (TN + FP)
  std::optional<double> fp_rate;      // FP / (TP + TN + FP + FN)

  std::size_t total() const { return tp + tn + fp + fn; }
};

// Fills the ratios from the counts; ratios with a zero denominator stay empty.
EmotionConfusion confusion_from_counts(std::size_t tp, std::size_t tn, std::size_t fp, std::size_t fn);

std::array<EmotionConfusion, kEmotionCount> per_emotion_confusion(std::span<const EmotionRecord> records);

}  // namespace infodemic
