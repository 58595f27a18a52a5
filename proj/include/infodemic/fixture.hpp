#pragma once

#include <cstdint>
#include <filesystem>

namespace infodemic {

struct FixtureOptions {
  std::uint64_t seed = 7;
  std::size_t discovery_size = 200;
  std::size_t retrospective_size = 1200;
  std::size_t dim = 16;
  std::size_t buckets = 2000;
  int lead_months = 2;  // misinformation rate leads the vaccination series
};

// Writes a self-contained synthetic corpus into `dir`:
//   discovery.jsonl, retrospective.jsonl, embeddings.vec, subwords.vec,
//   vaccination.csv, config.json
// and copies seeds.tsv, emotion_lexicon.tsv, gazetteer.tsv and
// stopwords_en.txt from `resources`. Vocabulary and emotion words are taken
// from those resource files. Output depends only on the options and the
// resource files.
void write_fixture(const std::filesystem::path& dir, const std::filesystem::path& resources,
                   const FixtureOptions& options);

}  // namespace infodemic
