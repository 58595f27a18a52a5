#include <doctest.h>

#include <set>

#include "infodemic/corpus.hpp"
#include "infodemic/errors.hpp"
#include "infodemic/random.hpp"
#include "support.hpp"

using namespace infodemic;
using testsupport::scratch;
using testsupport::write_text;

namespace {

Record labeled(const std::string& id, Label label, const std::string& source = "") {
  Record r;
  r.tweet.id = id;
  r.tweet.text = "text " + id;
  r.tweet.created_at = *parse_timestamp("2020-05-01");
  if (!source.empty()) r.tweet.source = source;
  r.label = label;
  return r;
}

Cohort make_cells(const std::vector<std::tuple<std::string, Label, std::size_t>>& cells) {
  std::vector<Record> records;
  std::size_t serial = 0;
  for (const auto& [source, label, n] : cells) {
    for (std::size_t i = 0; i < n; ++i) records.push_back(labeled("t" + std::to_string(serial++), label, source));
  }
  return Cohort(CohortKind::Discovery, std::move(records));
}

std::size_t count(const Cohort& c, const std::string& source, Label label) {
  std::size_t n = 0;
  for (const auto& r : c.records()) n += r.tweet.source.value_or("") == source && r.label == label;
  return n;
}

}  // namespace

TEST_CASE("ingest JSONL keeps valid records in order") {
  auto dir = scratch("corpus-jsonl");
  write_text(dir / "a.jsonl",
             "{\"id\":\"1\",\"text\":\"first\",\"created_at\":\"2020-03-01T00:00:00Z\",\"label\":0}\n"
             "{\"id\":2,\"text\":\"second\",\"created_at\":\"Wed Oct 10 20:19:24 +0000 2018\",\"label\":1}\n"
             "\n"
             "{\"id\":\"3\",\"text\":\"third\",\"created_at\":\"2020-03-02\",\"location\":\"Delhi\",\"label\":null}\n");
  auto res = ingest(dir / "a.jsonl", InputFormat::Jsonl);
  REQUIRE(res.cohort.size() == 3);
  CHECK(res.report.rejected == 0);
  CHECK(res.cohort.records()[0].tweet.id == "1");
  CHECK(res.cohort.records()[1].tweet.id == "2");
  CHECK(res.cohort.records()[1].label == Label::NotMisinformation);
  CHECK(res.cohort.records()[2].tweet.location == "Delhi");
  CHECK_FALSE(res.cohort.records()[2].label);
}

TEST_CASE("ingest drops and counts bad records") {
  auto dir = scratch("corpus-bad");
  write_text(dir / "b.jsonl",
             "{\"id\":\"1\",\"text\":\"ok\",\"created_at\":\"2020-03-01\"}\n"
             "{\"id\":\"2\",\"text\":\"   \",\"created_at\":\"2020-03-01\"}\n"
             "{\"id\":\"3\",\"text\":\"x\",\"created_at\":\"someday\"}\n"
             "{\"id\":\"4\",\"text\":\"x\"}\n"
             "{\"id\":\"5\",\"text\":\"x\",\"created_at\":\"2020-03-01\",\"label\":7}\n"
             "{\"id\":\"1\",\"text\":\"dup\",\"created_at\":\"2020-03-01\"}\n"
             "not json\n");
  auto res = ingest(dir / "b.jsonl", InputFormat::Jsonl);
  CHECK(res.cohort.size() == 1);
  CHECK(res.report.accepted == 1);
  CHECK(res.report.rejected == 6);
  CHECK(res.report.reasons["empty_text"] == 1);
  CHECK(res.report.reasons["bad_date"] == 1);
  CHECK(res.report.reasons["missing_field"] == 1);
  CHECK(res.report.reasons["bad_label"] == 1);
  CHECK(res.report.reasons["duplicate_id"] == 1);
  CHECK(res.report.reasons["malformed_record"] == 1);
}

TEST_CASE("discovery ingest rejects unlabeled records") {
  auto dir = scratch("corpus-disc");
  write_text(dir / "c.jsonl",
             "{\"id\":\"1\",\"text\":\"a\",\"created_at\":\"2020-03-01\",\"label\":0}\n"
             "{\"id\":\"2\",\"text\":\"b\",\"created_at\":\"2020-03-01\"}\n");
  auto res = ingest(dir / "c.jsonl", InputFormat::Jsonl, CohortKind::Discovery);
  CHECK(res.cohort.size() == 1);
  CHECK(res.report.reasons["missing_label"] == 1);
}

TEST_CASE("ingest CSV with quoted fields") {
  auto dir = scratch("corpus-csv");
  write_text(dir / "d.csv",
             "id,text,created_at,location,label,source\r\n"
             "1,\"hello, \"\"world\"\"\",2020-01-02,\"London, UK\",0,CMU\r\n"
             "2,\"multi\nline\",2020-01-03,,1,\r\n");
  auto res = ingest(dir / "d.csv", InputFormat::Csv);
  REQUIRE(res.cohort.size() == 2);
  CHECK(res.cohort.records()[0].tweet.text == "hello, \"world\"");
  CHECK(res.cohort.records()[0].tweet.location == "London, UK");
  CHECK(res.cohort.records()[0].tweet.source == "CMU");
  CHECK(res.cohort.records()[1].tweet.text == "multi\nline");
  CHECK_FALSE(res.cohort.records()[1].tweet.location);
}

TEST_CASE("ingest failures") {
  CHECK_THROWS_AS(ingest("/nonexistent/file.jsonl", InputFormat::Jsonl), DataError);
  auto dir = scratch("corpus-csvhdr");
  write_text(dir / "e.csv", "id,text\n1,hi\n");
  CHECK_THROWS_AS(ingest(dir / "e.csv", InputFormat::Csv), DataError);
}

TEST_CASE("write_jsonl round-trips") {
  auto dir = scratch("corpus-rt");
  Cohort c = make_cells({{"CMU", Label::Misinformation, 3}, {"", Label::NotMisinformation, 2}});
  write_jsonl(c, dir / "x.jsonl");
  auto res = ingest(dir / "x.jsonl", InputFormat::Jsonl, CohortKind::Discovery);
  REQUIRE(res.cohort.size() == c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    CHECK(res.cohort.records()[i].tweet.id == c.records()[i].tweet.id);
    CHECK(res.cohort.records()[i].label == c.records()[i].label);
    CHECK(res.cohort.records()[i].tweet.source == c.records()[i].tweet.source);
  }
}

TEST_CASE("cohort invariants") {
  std::vector<Record> dup = {labeled("a", Label::Misinformation), labeled("a", Label::Misinformation)};
  CHECK_THROWS_AS(Cohort(CohortKind::Discovery, dup), DataError);
  Record unl = labeled("b", Label::Misinformation);
  unl.label.reset();
  CHECK_THROWS_AS(Cohort(CohortKind::Discovery, {unl}), DataError);
  CHECK_NOTHROW(Cohort(CohortKind::Retrospective, {unl}));
}

TEST_CASE("split of 20/80 at 0.8 gives 16/64 and 4/16") {
  Cohort c = make_cells({{"S", Label::Misinformation, 20}, {"S", Label::NotMisinformation, 80}});
  auto [train, test] = stratified_split(c, 0.8, 1);
  CHECK(count(train, "S", Label::Misinformation) == 16);
  CHECK(count(train, "S", Label::NotMisinformation) == 64);
  CHECK(count(test, "S", Label::Misinformation) == 4);
  CHECK(count(test, "S", Label::NotMisinformation) == 16);
}

TEST_CASE("split is an exact, deterministic, order-preserving partition") {
  Rng rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<std::tuple<std::string, Label, std::size_t>> cells;
    for (const char* s : {"A", "B", "C"}) {
      cells.emplace_back(s, Label::Misinformation, rng.uniform_index(40));
      cells.emplace_back(s, Label::NotMisinformation, rng.uniform_index(40));
    }
    Cohort c = make_cells(cells);
    const double f = 0.05 + 0.9 * rng.uniform01();
    auto [train, test] = stratified_split(c, f, 77);
    auto [train2, test2] = stratified_split(c, f, 77);
    REQUIRE(train.size() + test.size() == c.size());
    std::set<std::string> ids;
    for (const auto& r : train.records()) ids.insert(r.tweet.id);
    for (const auto& r : test.records()) ids.insert(r.tweet.id);
    CHECK(ids.size() == c.size());
    for (std::size_t i = 0; i < train.size(); ++i) CHECK(train.records()[i].tweet.id == train2.records()[i].tweet.id);
    for (std::size_t i = 1; i < train.size(); ++i)
      CHECK(std::stoi(train.records()[i - 1].tweet.id.substr(1)) < std::stoi(train.records()[i].tweet.id.substr(1)));
    for (const auto& [source, label, n] : cells) {
      const double quota = static_cast<double>(n) * f;
      CHECK(std::abs(static_cast<double>(count(train, source, label)) - quota) <= 1.0);
    }
  }
}

TEST_CASE("split seeds select different members") {
  Cohort c = make_cells({{"S", Label::Misinformation, 50}});
  auto a = stratified_split(c, 0.5, 1).first;
  auto b = stratified_split(c, 0.5, 2).first;
  bool differ = false;
  for (std::size_t i = 0; i < a.size(); ++i) differ = differ || a.records()[i].tweet.id != b.records()[i].tweet.id;
  CHECK(differ);
}

TEST_CASE("split preconditions") {
  Cohort c = make_cells({{"S", Label::Misinformation, 5}});
  CHECK_THROWS_AS(stratified_split(c, 0.0, 1), ConfigError);
  CHECK_THROWS_AS(stratified_split(c, 1.0, 1), ConfigError);
  Record unl = labeled("u", Label::Misinformation);
  unl.label.reset();
  CHECK_THROWS_AS(stratified_split(Cohort(CohortKind::Retrospective, {unl}), 0.5, 1), DataError);
}

TEST_CASE("cohens kappa") {
  using L = Label;
  std::vector<L> a, b;
  // 100 items, 60 positive each, agreement on 90.
  for (int i = 0; i < 100; ++i) {
    a.push_back(i < 60 ? L::Misinformation : L::NotMisinformation);
    b.push_back((i < 55 || (i >= 60 && i < 65)) ? L::Misinformation : L::NotMisinformation);
  }
  CHECK(cohens_kappa(a, b) == doctest::Approx((0.9 - 0.52) / 0.48).epsilon(1e-12));
  CHECK(cohens_kappa(a, b) == doctest::Approx(cohens_kappa(b, a)).epsilon(1e-15));
  CHECK(cohens_kappa(a, a) == doctest::Approx(1.0));
  std::vector<L> constant(10, L::Misinformation);
  CHECK(cohens_kappa(constant, constant) == 1.0);
  std::vector<L> shorter(3, L::Misinformation);
  CHECK_THROWS(cohens_kappa(constant, shorter));
}
