#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <random>
#include <string>

#include "adlens/util.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const char* cli_path() { return ADLENS_CLI_PATH; }

int run(const std::string& args) {
  std::string cmd = std::string(cli_path()) + " " + args + " >/dev/null 2>&1";
  int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("adlens_cli_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string operator/(const char* name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("help exits zero on every subcommand") {
  CHECK(run("--help") == 0);
  for (const char* sub : {"synth", "serve", "crawl", "label", "tier", "analyze", "featurize",
                          "split", "train", "eval", "detect-hidden", "report"}) {
    CAPTURE(sub);
    CHECK(run(std::string(sub) + " --help") == 0);
  }
}

TEST_CASE("usage errors exit with code one") {
  CHECK(run("--definitely-not-a-flag") == 1);
  CHECK(run("synth") == 1);                       // missing required --out
  CHECK(run("nonexistent-subcommand") == 1);
  TempDir tmp;
  // bad input paths are usage errors
  CHECK(run("split --input " + (tmp / "missing_dir") + " --out " + (tmp / "s.json")) == 1);
  CHECK(run("train --model contextual --input " + (tmp / "missing") + " --split " +
            (tmp / "nope.json") + " --out " + (tmp / "m.json")) == 1);
}

TEST_CASE("data errors exit with code two") {
  TempDir tmp;
  fs::create_directories(tmp.path / "corpus");
  adlens::write_text_file(tmp.path / "corpus" / "profiles.jsonl", "this is not json\n");
  adlens::write_text_file(tmp.path / "corpus" / "posts.jsonl", "");
  CHECK(run("tier --input " + (tmp / "corpus") + " --out " + (tmp / "t.jsonl")) == 2);
}

TEST_CASE("full chain: synth, label, tier, split, train, eval, report") {
  TempDir tmp;
  adlens::write_text_file(
      tmp.path / "cfg.json",
      R"({"accounts_per_tier": [16, 8, 5, 3], "posts_per_account": [8, 14], "sponsored_fraction": 0.25, "seed": 5})");

  REQUIRE(run("synth --config " + (tmp / "cfg.json") + " --out " + (tmp / "corpus")) == 0);
  CHECK(fs::exists(tmp.path / "corpus" / "posts.jsonl"));
  CHECK(fs::exists(tmp.path / "corpus" / "manifest.jsonl"));

  REQUIRE(run("label --input " + (tmp / "corpus") + " --out " + (tmp / "labels")) == 0);
  CHECK(fs::exists(tmp.path / "labels" / "post_labels.jsonl"));

  REQUIRE(run("tier --input " + (tmp / "corpus") + " --out " + (tmp / "tiers.jsonl")) == 0);
  REQUIRE(run("analyze --input " + (tmp / "corpus") + " --out " + (tmp / "reports")) == 0);
  CHECK(fs::exists(tmp.path / "reports" / "share.csv"));

  REQUIRE(run("featurize --input " + (tmp / "corpus") + " --out " + (tmp / "features") +
              " --vocab-size 300 --max-len 16") == 0);
  CHECK(fs::exists(tmp.path / "features" / "vocab.json"));

  REQUIRE(run("split --input " + (tmp / "corpus") + " --out " + (tmp / "split.json") +
              " --seed 5") == 0);

  REQUIRE(run("train --model forest --input " + (tmp / "corpus") + " --split " +
              (tmp / "split.json") + " --out " + (tmp / "forest.json") +
              " --trees 20 --seed 5") == 0);
  REQUIRE(run("train --model contextual --input " + (tmp / "corpus") + " --split " +
              (tmp / "split.json") + " --out " + (tmp / "ctx.json") +
              " --epochs 2 --max-len 16 --embed-dim 8 --vocab-size 300 --seed 5") == 0);
  CHECK(fs::exists(tmp.path / "ctx.json.loss.csv"));

  REQUIRE(run("eval --model " + (tmp / "forest.json") + " --input " + (tmp / "corpus") +
              " --split " + (tmp / "split.json") + " --out " + (tmp / "forest_metrics.json")) ==
          0);
  json metrics = json::parse(adlens::read_text_file(tmp.path / "forest_metrics.json"));
  CHECK(metrics["held_out"]["metrics"]["accuracy"].get<double>() > 0.6);

  REQUIRE(run("detect-hidden --model " + (tmp / "ctx.json") + " --input " + (tmp / "corpus") +
              " --threshold 0.5 --out " + (tmp / "audit.json")) == 0);
  json audit = json::parse(adlens::read_text_file(tmp.path / "audit.json"));
  CHECK(audit["threshold"] == 0.5);

  REQUIRE(run("report --metrics " + (tmp / "forest_metrics.json") + " --out " +
              (tmp / "table.txt")) == 0);
  std::string table = adlens::read_text_file(tmp.path / "table.txt");
  CHECK(table.find("forest") != std::string::npos);
  CHECK(table.find("Accuracy") != std::string::npos);

  // unknown model kind in file
  adlens::write_text_file(tmp.path / "bad_model.json", R"({"kind":"mystery","pipeline":{}})");
  CHECK(run("eval --model " + (tmp / "bad_model.json") + " --input " + (tmp / "corpus") +
            " --split " + (tmp / "split.json") + " --out " + (tmp / "x.json")) == 2);
}

TEST_CASE("synth output is byte-identical across reruns with one seed") {
  TempDir tmp;
  REQUIRE(run("synth --seed 99 --out " + (tmp / "a")) == 0);
  REQUIRE(run("synth --seed 99 --out " + (tmp / "b")) == 0);
  for (const char* name : {"profiles.jsonl", "posts.jsonl", "stories.jsonl", "manifest.jsonl"}) {
    CAPTURE(name);
    CHECK(adlens::read_text_file(tmp.path / "a" / name) ==
          adlens::read_text_file(tmp.path / "b" / name));
  }
}

TEST_CASE("run manifests record the invocation") {
  TempDir tmp;
  REQUIRE(run("synth --seed 3 --out " + (tmp / "c")) == 0);
  json manifest = json::parse(adlens::read_text_file(tmp.path / "c" / "run_manifest.json"));
  CHECK(manifest["subcommand"] == "synth");
  CHECK(manifest["tool_version"] == "0.1.0");
  CHECK(manifest.contains("config_hash"));
  CHECK(manifest.contains("duration_ms"));
}
