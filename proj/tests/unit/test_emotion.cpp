#include <doctest.h>

#include <string>

#include "infodemic/emotion.hpp"
#include "infodemic/errors.hpp"
#include "infodemic/porter.hpp"
#include "infodemic/random.hpp"
#include "oracles.hpp"
#include "published.hpp"
#include "support.hpp"

using namespace infodemic;

namespace {

ProcessedTweet tweet_of(std::vector<std::string> tokens) { return ProcessedTweet{"t", std::move(tokens), nullptr}; }

EmotionLexicon toy_lexicon() {
  EmotionLexicon lex("toy", "1");
  lex.add("happi", Emotion::Joy);
  lex.add("happi", Emotion::Trust);
  lex.add("scare", Emotion::Fear);
  lex.add("vile", Emotion::Disgust);
  lex.add("vile", Emotion::Anger);
  return lex;
}

}  // namespace

TEST_CASE("emotion names round trip in canonical order") {
  const char* names[] = {"joy", "trust", "fear", "surprise", "sadness", "anticipation", "anger", "disgust"};
  for (std::size_t i = 0; i < kEmotionCount; ++i) {
    CHECK(emotion_name(kAllEmotions[i]) == names[i]);
    CHECK(emotion_from_name(names[i]) == kAllEmotions[i]);
  }
  CHECK_FALSE(emotion_from_name("positive"));
}

TEST_CASE("lexicon loading") {
  auto dir = testsupport::scratch("emotion-lex");
  testsupport::write_text(dir / "lex.tsv",
                          "# comment\nhappy\tjoy\t1\nhappy\tpositive\t1\nhappy\tfear\t0\nScared\tfear\t1\n");
  auto lex = EmotionLexicon::load(dir / "lex.tsv");
  CHECK(lex.associations(porter_stem("happy")) == 1u << static_cast<int>(Emotion::Joy));
  CHECK(lex.associations(porter_stem("scared")) == 1u << static_cast<int>(Emotion::Fear));
  CHECK(lex.associations("happy") == 0);
  auto raw = EmotionLexicon::load(dir / "lex.tsv", false);
  CHECK(raw.associations("happy") != 0);

  testsupport::write_text(dir / "bad.tsv", "happy\tjoy\tyes\n");
  CHECK_THROWS_AS(EmotionLexicon::load(dir / "bad.tsv"), DataError);
  testsupport::write_text(dir / "none.tsv", "happy\tpositive\t1\n");
  CHECK_THROWS_AS(EmotionLexicon::load(dir / "none.tsv"), DataError);

  auto shipped = EmotionLexicon::load(testsupport::source_dir() / "data" / "emotion_lexicon.tsv");
  for (auto c : shipped.coverage()) CHECK(c > 0);
}

TEST_CASE("scoring by hand") {
  const auto lex = toy_lexicon();
  auto d = score_emotions(tweet_of({"happi", "scare", "scare", "other"}), lex);
  CHECK(d[Emotion::Joy] == doctest::Approx(0.25));
  CHECK(d[Emotion::Trust] == doctest::Approx(0.25));
  CHECK(d[Emotion::Fear] == doctest::Approx(0.5));
  CHECK(dominant_emotion(d) == Emotion::Fear);
  auto none = score_emotions(tweet_of({"nothing", "here"}), lex);
  for (double p : none.probs) CHECK(p == 0.125);
  CHECK(dominant_emotion(none) == Emotion::Joy);
  // Joy and Trust tie; Joy comes first.
  CHECK(dominant_emotion(score_emotions(tweet_of({"happi"}), lex)) == Emotion::Joy);
  CHECK_THROWS_AS(score_emotions(tweet_of({"x"}), EmotionLexicon{}), DataError);
  CHECK_THROWS_AS(LexiconEmotionScorer(EmotionLexicon{}), DataError);
}

TEST_CASE("distribution properties under fuzz") {
  const auto lex = toy_lexicon();
  const std::vector<std::string> pool = {"happi", "scare", "vile", "foo", "bar"};
  Rng rng(99);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<std::string> toks;
    const auto n = rng.uniform_index(12);
    for (std::size_t i = 0; i < n; ++i) toks.push_back(pool[rng.uniform_index(pool.size())]);
    const auto d = score_emotions(tweet_of(toks), lex);
    double sum = 0;
    for (double p : d.probs) {
      CHECK(p >= 0.0);
      sum += p;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));

    auto padded = toks;
    padded.push_back("unrelated");
    CHECK(score_emotions(tweet_of(padded), lex).probs == d.probs);

    auto tripled = toks;
    for (int k = 0; k < 2; ++k) tripled.insert(tripled.end(), toks.begin(), toks.end());
    CHECK(dominant_emotion(score_emotions(tweet_of(tripled), lex)) == dominant_emotion(d));
  }
}

TEST_CASE("per-emotion confusion sums to the global matrix") {
  Rng rng(17);
  std::vector<EmotionRecord> records;
  std::size_t tp = 0, tn = 0, fp = 0, fn = 0;
  for (int i = 0; i < 2000; ++i) {
    EmotionRecord r{kAllEmotions[rng.uniform_index(7)], static_cast<Label>(rng.uniform_index(2)),
                    static_cast<Label>(rng.uniform_index(2))};
    const bool g = r.gold == Label::Misinformation, p = r.predicted == Label::Misinformation;
    tp += g && p;
    tn += !g && !p;
    fp += !g && p;
    fn += g && !p;
    records.push_back(r);
  }
  auto per = per_emotion_confusion(records);
  std::size_t stp = 0, stn = 0, sfp = 0, sfn = 0;
  for (const auto& c : per) {
    stp += c.tp;
    stn += c.tn;
    sfp += c.fp;
    sfn += c.fn;
  }
  CHECK(stp == tp);
  CHECK(stn == tn);
  CHECK(sfp == fp);
  CHECK(sfn == fn);
  // Disgust never drawn: counts zero, ratios absent.
  const auto& empty = per[static_cast<std::size_t>(Emotion::Disgust)];
  CHECK(empty.total() == 0);
  CHECK_FALSE(empty.sensitivity);
  CHECK_FALSE(empty.fp_rate);

  auto perfect = confusion_from_counts(4, 6, 0, 0);
  CHECK(*perfect.sensitivity == 1.0);
  CHECK(*perfect.specificity == 1.0);
  CHECK(*perfect.fp_rate == 0.0);
}

TEST_CASE("published emotion statistics from the published counts") {
  auto t = confusion_from_counts(53, 442, 19, 5);
  CHECK(*t.sensitivity == doctest::Approx(53.0 / 58.0));
  CHECK(*t.fp_rate == doctest::Approx(19.0 / 519.0));
  auto f = confusion_from_counts(89, 381, 45, 25);
  CHECK(*f.fp_rate == doctest::Approx(45.0 / 540.0));
  CHECK(*f.specificity == doctest::Approx(381.0 / 426.0));

  for (const auto& s : published::kReportedEmotionStats) {
    const auto& rows = s.fasttext ? published::kFastTextEmotions : published::kWord2VecEmotions;
    for (const auto& r : rows) {
      if (std::string(r.emotion) != s.emotion) continue;
      const auto c = confusion_from_counts(r.tp, r.tn, r.fp, r.fn);
      double v = 0;
      switch (s.stat) {
        case published::Stat::Sensitivity: v = *c.sensitivity; break;
        case published::Stat::Specificity: v = *c.specificity; break;
        case published::Stat::FpRatePercent: v = 100.0 * *c.fp_rate; break;
      }
      CAPTURE(s.emotion);
      CHECK(oracle::truncate_like(v, s.value) == s.value);
    }
  }
}
