#include <doctest.h>

#include <json.hpp>

#include "cli_checks.hpp"
#include "infodemic/errors.hpp"
#include "infodemic/pipeline.hpp"
#include "support.hpp"

using namespace infodemic;
using clicheck::run_cli;
using testsupport::read_text;
using testsupport::scratch;
using testsupport::source_dir;
using testsupport::write_text;

namespace {

std::string fixture_config() { return "\"" + (source_dir() / "data" / "fixture" / "config.json").string() + "\""; }

std::string q(const std::filesystem::path& p) { return "\"" + p.string() + "\""; }

}  // namespace

TEST_CASE("config parsing") {
  auto dir = scratch("cfg");
  write_text(dir / "c.json", R"({"seed": 3, "paths": {"discovery": "d.jsonl"}, "analysis": {"threshold": 0.6}})");
  auto c = RunConfig::load(dir / "c.json");
  CHECK(c.seed == 3);
  CHECK(c.threshold == 0.6);
  CHECK(*c.discovery == (dir / "d.jsonl").lexically_normal());

  write_text(dir / "typo.json", R"({"seeed": 3})");
  CHECK_THROWS_AS(RunConfig::load(dir / "typo.json"), ConfigError);
  write_text(dir / "typo2.json", R"({"train": {"epoch": 3}})");
  CHECK_THROWS_AS(RunConfig::load(dir / "typo2.json"), ConfigError);
  write_text(dir / "broken.json", "{ not json");
  CHECK_THROWS_AS(RunConfig::load(dir / "broken.json"), ConfigError);

  RunConfig a, b;
  b.out = "elsewhere";
  b.workers = 8;
  CHECK(a.hash() == b.hash());
  b.threshold = 0.5;
  CHECK(a.hash() != b.hash());

  RunConfig bad;
  bad.threshold = 1.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = RunConfig{};
  bad.discovery = dir / "nope.jsonl";
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("fixture generator reproduces the shipped fixture") {
  auto dir = scratch("fixture-regen");
  REQUIRE(run_cli("fixture -o " + q(dir / "fx") + " --resources " + q(source_dir() / "data"), dir / "log.txt") == 0);
  const auto fresh = clicheck::snapshot(dir / "fx");
  const auto shipped = clicheck::snapshot(source_dir() / "data" / "fixture");
  CHECK(clicheck::differences(fresh, shipped).empty());
}

TEST_CASE("full run is byte-identical across reruns and worker counts") {
  auto dir = scratch("pipeline-run");
  REQUIRE(run_cli("run -c " + fixture_config() + " -o " + q(dir / "a"), dir / "a.log") == 0);
  REQUIRE(run_cli("run -c " + fixture_config() + " -o " + q(dir / "b") + " --workers 3", dir / "b.log") == 0);
  const auto a = clicheck::snapshot(dir / "a"), b = clicheck::snapshot(dir / "b");
  const auto diff = clicheck::differences(a, b);
  CHECK(diff.empty());
  for (const auto& d : diff) MESSAGE("differs: " << d);

  for (const char* f : {"discovery.jsonl", "train.jsonl", "test.jsonl", "model.bin", "metrics.json", "labels.csv",
                        "emotions.csv", "categories.csv", "category_keywords.json", "rates_by_country.csv",
                        "rates_by_wave.csv", "category_periods.csv", "leadlag.json", "report.md",
                        "manifests/report.json", "manifests/train.json"})
    CHECK_MESSAGE(a.count(f) == 1, std::string(f));

  const auto manifest = nlohmann::json::parse(a.at("manifests/train.json"));
  CHECK(manifest["command"] == "train");
  CHECK(manifest["version"] == kVersion);
  CHECK(manifest["seed"] == 42);
  CHECK(manifest["inputs"].contains("$out/train.jsonl"));
  CHECK(manifest["outputs"].contains("model.bin"));

  // A different seed changes the model.
  REQUIRE(run_cli("split -c " + fixture_config() + " -o " + q(dir / "a") + " --seed 9", dir / "c.log") == 0);
  REQUIRE(run_cli("train -c " + fixture_config() + " -o " + q(dir / "a") + " --seed 9", dir / "c.log") == 0);
  CHECK(read_text(dir / "a" / "model.bin") != b.at("model.bin"));
}

TEST_CASE("evaluate scores a predictions file") {
  auto dir = scratch("pipeline-eval");
  write_text(dir / "p.csv", "id,gold,predicted\na,0,0\nb,1,1\nc,1,1\n");
  REQUIRE(run_cli("evaluate -o " + q(dir / "out") + " --predictions " + q(dir / "p.csv"), dir / "log") == 0);
  auto m = nlohmann::json::parse(read_text(dir / "out" / "metrics.json"));
  for (const char* k : {"accuracy", "precision", "recall", "f1"}) CHECK(m[k].get<double>() == 1.0);

  write_text(dir / "w.csv", "id,gold,predicted\na,0,0\nb,0,1\nc,1,1\nd,1,1\ne,1,1\n");
  REQUIRE(run_cli("evaluate -o " + q(dir / "out") + " --predictions " + q(dir / "w.csv"), dir / "log") == 0);
  m = nlohmann::json::parse(read_text(dir / "out" / "metrics.json"));
  CHECK(m["f1"].get<double>() == doctest::Approx(82.0 / 105.0));
  CHECK(m["precision"].get<double>() == doctest::Approx(0.85));
}

TEST_CASE("exit codes") {
  auto dir = scratch("pipeline-exit");
  CHECK(run_cli("", dir / "log") == 1);
  CHECK(run_cli("frobnicate", dir / "log") == 1);
  CHECK(run_cli("run -c " + fixture_config() + " --threshold 1.5", dir / "log") == 1);
  write_text(dir / "typo.json", R"({"sed": 1})");
  CHECK(run_cli("run -c " + q(dir / "typo.json"), dir / "log") == 1);
  CHECK(run_cli("ingest -o " + q(dir / "out"), dir / "log") == 1);  // no corpus configured

  CHECK(run_cli("train -c " + fixture_config() + " -o " + q(dir / "empty"), dir / "log") == 2);
  CHECK(read_text(dir / "log").find("split") != std::string::npos);
  CHECK(run_cli("evaluate -o " + q(dir / "out") + " --predictions " + q(dir / "absent.csv"), dir / "log") == 2);

  write_text(dir / "bad.csv", "id,gold,predicted\na,0,7\n");
  CHECK(run_cli("evaluate -o " + q(dir / "out") + " --predictions " + q(dir / "bad.csv"), dir / "log") == 3);
  CHECK(run_cli("--version", dir / "log") == 0);
}
