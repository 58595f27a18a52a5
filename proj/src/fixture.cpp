#include "infodemic/fixture.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "infodemic/categories.hpp"
#include "infodemic/corpus.hpp"
#include "infodemic/emotion.hpp"
#include "infodemic/embeddings.hpp"
#include "infodemic/errors.hpp"
#include "infodemic/porter.hpp"
#include "infodemic/preprocess.hpp"
#include "infodemic/random.hpp"

namespace infodemic {
namespace {

using namespace std::chrono;
namespace fs = std::filesystem;

const std::vector<std::string> kMisinfoWords = {"hoax",   "plandemic", "microchip", "coverup",  "fake",
                                                "lies",   "scam",      "bleach",    "sheeple",  "agenda",
                                                "depopulation", "propaganda", "exposed", "censored", "truth"};
const std::vector<std::string> kReliableWords = {"study",     "trial",   "data",     "guidance", "clinic",
                                                 "report",    "research", "update",  "official", "published",
                                                 "reviewed",  "analysis", "statistics", "briefing", "advice"};
const std::vector<std::string> kFillers = {"people", "news", "think", "say",   "really", "week",
                                           "know",   "world", "day",  "city",  "thing",  "everyone"};
// Not written to the vector file; only reachable through subword buckets.
const std::vector<std::string> kOovFillers = {"covid19", "lockdowns", "pandemical", "coronavirus", "quarantined"};

// Emotions each class tends to carry.
const std::vector<Emotion> kMisinfoEmotions = {Emotion::Fear, Emotion::Anger, Emotion::Disgust, Emotion::Surprise};
const std::vector<Emotion> kReliableEmotions = {Emotion::Trust, Emotion::Joy, Emotion::Anticipation,
                                                Emotion::Sadness};

struct Place {
  const char* code;
  double weight;
  std::vector<std::string> spellings;
};

const std::vector<Place> kPlaces = {
    {"US", 0.40, {"New York, NY", "Texas, USA", "Los Angeles, CA", "Chicago", "United States", "Boston, MA"}},
    {"GB", 0.15, {"London, UK", "Manchester, England", "Scotland", "United Kingdom"}},
    {"IN", 0.12, {"New Delhi, India", "Mumbai", "Bengaluru, India", "Chennai"}},
    {"CA", 0.10, {"Toronto, Ontario", "Vancouver, Canada", "Montreal"}},
    {"AU", 0.08, {"Sydney, Australia", "Melbourne", "Perth, Western Australia"}},
    {"--", 0.15, {"", "Earth", "somewhere", "Lagos, Nigeria", "Dublin, Ireland", "Paris"}},
};

const std::vector<std::pair<std::string, std::size_t>> kSources = {
    {"CoAID", 80}, {"AntiVax", 60}, {"CMU", 20}, {"Human-Annotated", 40}};

template <typename T>
const T& pick(Rng& rng, const std::vector<T>& items) {
  return items[static_cast<std::size_t>(rng.uniform_index(items.size()))];
}

std::vector<std::string> split_words(const std::string& phrase) {
  std::vector<std::string> out;
  std::istringstream in(phrase);
  for (std::string w; in >> w;) {
    for (auto& c : w) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    out.push_back(w);
  }
  return out;
}

struct Vocabulary {
  std::vector<std::string> categories;
  std::vector<std::vector<std::string>> category_words;  // raw words per category
  std::vector<std::vector<std::string>> emotion_words;   // raw words per emotion
};

Vocabulary read_vocabulary(const fs::path& resources, const StopwordList& stops) {
  Vocabulary v;
  const CategorySet cats = CategorySet::load(resources / "seeds.tsv");
  for (const auto& name : cats.names()) {
    v.categories.push_back(name);
    std::vector<std::string> words;
    for (const auto& phrase : cats.seeds(name)) {
      for (auto& w : split_words(phrase)) {
        if (!stops.contains(w) && std::find(words.begin(), words.end(), w) == words.end()) words.push_back(w);
      }
    }
    v.category_words.push_back(std::move(words));
  }
  v.emotion_words.assign(kEmotionCount, {});
  std::ifstream in(resources / "emotion_lexicon.tsv");
  if (!in) throw MissingDependency("missing " + (resources / "emotion_lexicon.tsv").string());
  std::set<std::string> taken;
  for (std::string line; std::getline(in, line);) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    std::string word, emotion, flag;
    std::getline(fields, word, '\t');
    std::getline(fields, emotion, '\t');
    std::getline(fields, flag, '\t');
    auto e = emotion_from_name(emotion);
    if (!e || flag != "1" || taken.count(word)) continue;
    taken.insert(word);
    v.emotion_words[static_cast<std::size_t>(*e)].push_back(word);
  }
  return v;
}

std::string decorate(Rng& rng, std::vector<std::string> words, std::size_t serial) {
  std::string text;
  if (rng.uniform01() < 0.3) text += "@user" + std::to_string(serial % 97) + " ";
  if (!words.empty() && rng.uniform01() < 0.5) words[0][0] = static_cast<char>(std::toupper(words[0][0]));
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i) text += rng.uniform01() < 0.1 ? ", " : " ";
    if (rng.uniform01() < 0.05) text += "#";
    text += words[i];
  }
  if (rng.uniform01() < 0.1) text += " &amp; more";
  if (rng.uniform01() < 0.3) text += " https://t.co/x" + std::to_string(rng.uniform_index(100000));
  if (rng.uniform01() < 0.2) text += " #covid19";
  return text;
}

}  // namespace

void write_fixture(const fs::path& dir, const fs::path& resources, const FixtureOptions& opt) {
  const StopwordList stops = StopwordList::load(resources / "stopwords_en.txt");
  const Vocabulary vocab = read_vocabulary(resources, stops);
  const std::size_t k = vocab.categories.size();
  if (opt.dim < 2 + k + 1)
    throw ConfigError("fixture dim " + std::to_string(opt.dim) + " is too small for " + std::to_string(k) +
                      " categories");
  const std::size_t emotion_dims = opt.dim - 2 - k;
  fs::create_directories(dir);
  for (const char* name : {"seeds.tsv", "emotion_lexicon.tsv", "gazetteer.tsv", "stopwords_en.txt"})
    fs::copy_file(resources / name, dir / name, fs::copy_options::overwrite_existing);

  // Embeddings keyed by stem. Category words carry a large norm so a single
  // one dominates a tweet's mean vector.
  EmbeddingTable table(opt.dim);
  Rng erng(derive_seed(opt.seed, "embeddings"));
  auto put = [&](const std::string& raw, std::size_t axis, double norm, double noise) {
    const std::string stem = porter_stem(raw);
    if (table.lookup(stem)) return;
    Vector v(opt.dim);
    for (auto& x : v) x = noise * erng.normal();
    if (axis < opt.dim) v[axis] += norm;
    table.set(stem, v);
  };
  for (const auto& w : kMisinfoWords) put(w, 0, 1.0, 0.05);
  for (const auto& w : kReliableWords) put(w, 1, 1.0, 0.05);
  for (std::size_t c = 0; c < k; ++c) {
    for (const auto& w : vocab.category_words[c]) put(w, 2 + c, 3.0, 0.05);
  }
  for (std::size_t e = 0; e < kEmotionCount; ++e) {
    for (const auto& w : vocab.emotion_words[e]) put(w, 2 + k + e % emotion_dims, 0.8, 0.05);
  }
  for (const auto& w : kFillers) put(w, opt.dim, 0.0, 0.15);
  std::vector<double> buckets(opt.buckets * opt.dim);
  for (auto& x : buckets) x = 0.1 * erng.normal();
  table.set_subwords(std::move(buckets));
  save_embeddings(table, dir / "embeddings.vec", dir / "subwords.vec");

  auto make_words = [&](Rng& rng, bool misinfo, std::optional<std::size_t> category) {
    std::vector<std::string> words;
    const auto& cls = misinfo ? kMisinfoWords : kReliableWords;
    const std::size_t n_cls = 1 + rng.uniform_index(3);
    for (std::size_t i = 0; i < n_cls; ++i) words.push_back(pick(rng, cls));
    if (category) {
      const std::size_t n_cat = 1 + rng.uniform_index(2);
      for (std::size_t i = 0; i < n_cat; ++i) words.push_back(pick(rng, vocab.category_words[*category]));
    }
    if (rng.uniform01() < 0.9) {
      const Emotion e = pick(rng, misinfo ? kMisinfoEmotions : kReliableEmotions);
      const auto& pool = vocab.emotion_words[static_cast<std::size_t>(e)];
      if (!pool.empty()) words.push_back(pick(rng, pool));
    }
    const std::size_t n_fill = 2 + rng.uniform_index(4);
    for (std::size_t i = 0; i < n_fill; ++i)
      words.push_back(rng.uniform01() < 0.15 ? pick(rng, kOovFillers) : pick(rng, kFillers));
    rng.shuffle(std::span<std::string>(words));
    return words;
  };
  auto maybe_category = [&](Rng& rng, double p) -> std::optional<std::size_t> {
    if (rng.uniform01() >= p) return std::nullopt;
    return static_cast<std::size_t>(rng.uniform_index(k));
  };
  auto pick_place = [&](Rng& rng) -> const Place& {
    double u = rng.uniform01();
    for (const auto& p : kPlaces) {
      if (u < p.weight) return p;
      u -= p.weight;
    }
    return kPlaces.back();
  };

  // Discovery cohort: labeled, spread over the listed sources.
  {
    Rng rng(derive_seed(opt.seed, "discovery"));
    std::vector<Record> records;
    std::size_t serial = 0;
    const std::size_t source_total = [] {
      std::size_t t = 0;
      for (const auto& s : kSources) t += s.second;
      return t;
    }();
    for (const auto& [source, weight] : kSources) {
      const std::size_t n = weight * opt.discovery_size / source_total;
      for (std::size_t i = 0; i < n; ++i, ++serial) {
        const bool misinfo = rng.uniform01() < 0.4;
        const auto words = make_words(rng, misinfo, maybe_category(rng, 0.8));
        const sys_days day = sys_days{2020y / February / 1} + days{rng.uniform_index(500)};
        const auto& place = pick_place(rng);
        Tweet t;
        char id[16];
        std::snprintf(id, sizeof id, "d%04zu", serial);
        t.id = id;
        t.text = decorate(rng, words, serial);
        t.created_at = day + seconds{rng.uniform_index(86400)};
        t.location = pick(rng, place.spellings);
        t.source = source;
        records.push_back({std::move(t), misinfo ? Label::Misinformation : Label::NotMisinformation});
      }
    }
    write_jsonl(Cohort(CohortKind::Discovery, std::move(records)), dir / "discovery.jsonl");
  }

  // Latent monthly intensity: drives the misinformation share and, shifted
  // by lead_months, the external vaccination series.
  const sys_days start = sys_days{2020y / January / 1};
  const int n_months = 30;
  std::vector<double> intensity(static_cast<std::size_t>(n_months + opt.lead_months));
  {
    Rng rng(derive_seed(opt.seed, "intensity"));
    double x = 0;
    for (auto& v : intensity) v = (x += rng.normal());
    double mean = 0, var = 0;
    for (double v : intensity) mean += v;
    mean /= static_cast<double>(intensity.size());
    for (double v : intensity) var += (v - mean) * (v - mean);
    const double sd = std::sqrt(var / static_cast<double>(intensity.size()));
    for (auto& v : intensity) v = sd > 0 ? (v - mean) / sd : 0.0;
  }
  auto latent = [&](int month) { return intensity[static_cast<std::size_t>(month + opt.lead_months)]; };

  {
    Rng rng(derive_seed(opt.seed, "retrospective"));
    std::vector<Record> records;
    for (std::size_t i = 0; i < opt.retrospective_size; ++i) {
      const int month = static_cast<int>(rng.uniform_index(n_months));
      const year_month_day first{start};
      const year_month_day month_start = first.year() / first.month() / 1d + months{month};
      const auto month_days = static_cast<unsigned>((month_start.year() / month_start.month() / last).day());
      const sys_days day = sys_days{month_start} + days{rng.uniform_index(month_days)};
      const double p = std::clamp(0.2 + 0.12 * latent(month), 0.03, 0.5);
      const bool misinfo = rng.uniform01() < p;
      const auto words = make_words(rng, misinfo, maybe_category(rng, 0.75));
      const auto& place = pick_place(rng);
      Tweet t;
      char id[16];
      std::snprintf(id, sizeof id, "r%05zu", i);
      t.id = id;
      t.text = decorate(rng, words, i);
      t.created_at = day + seconds{rng.uniform_index(86400)};
      t.location = pick(rng, place.spellings);
      records.push_back({std::move(t), std::nullopt});
    }
    write_jsonl(Cohort(CohortKind::Retrospective, std::move(records)), dir / "retrospective.jsonl");
  }

  {
    Rng rng(derive_seed(opt.seed, "vaccination"));
    std::ofstream out(dir / "vaccination.csv", std::ios::binary);
    out << "date,value\n";
    for (int m = 0; m < n_months; ++m) {
      const year_month_day first{start};
      const year_month_day ms = first.year() / first.month() / 1d + months{m};
      const auto month_days = static_cast<unsigned>((ms.year() / ms.month() / last).day());
      const double base = 40.0 + 8.0 * latent(m - opt.lead_months);
      for (unsigned d = 0; d < month_days; ++d) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.4f", base + rng.uniform(-0.5, 0.5));
        out << format_date(Date{sys_days{ms} + days{d}}) << ',' << buf << '\n';
      }
    }
  }

  nlohmann::ordered_json cfg;
  cfg["seed"] = 42;
  cfg["paths"] = {{"discovery", "discovery.jsonl"},     {"retrospective", "retrospective.jsonl"},
                  {"embeddings", "embeddings.vec"},     {"subwords", "subwords.vec"},
                  {"lexicon", "emotion_lexicon.tsv"},   {"seeds", "seeds.tsv"},
                  {"gazetteer", "gazetteer.tsv"},       {"stopwords", "stopwords_en.txt"}};
  cfg["external_series"] = nlohmann::ordered_json::array(
      {{{"label", "vaccination_rate"}, {"path", "vaccination.csv"}, {"granularity", "daily"}, {"resample", "mean"}}});
  cfg["train"] = {{"epochs", 20}, {"batch_size", 16}, {"learning_rate", 0.01}, {"dim_h", 16}, {"max_seq_len", 50}};
  cfg["analysis"] = {{"threshold", 0.75},     {"min_count", 20},     {"max_lag", 6},
                     {"granularity", "monthly"}, {"top_n", 5},       {"train_fraction", 0.8},
                     {"keywords_top_k", 10},  {"oov_policy", "auto"}};
  std::ofstream(dir / "config.json", std::ios::binary) << cfg.dump(2) << '\n';
}

}  // namespace infodemic
