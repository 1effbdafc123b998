#include <doctest.h>

#include <algorithm>
#include <set>
#include <sstream>

#include "bugtriage/cli.hpp"
#include "bugtriage/corpus.hpp"
#include "support/paths.hpp"

using namespace bugtriage;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

const std::string kHeader = "id,product,component,reporter,severity,summary,intention,label\n";

std::string small_csv(const testing::TempDir& dir) {
  const std::string path = dir.file("small.csv");
  REQUIRE(run({"synth", testing::test_data("small_spec.json"), "--out", path}).code == 0);
  return path;
}

std::size_t count_lines(const std::string& text) {
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

}  // namespace

TEST_CASE("cli: usage errors exit 2, help exits 0") {
  CHECK(run({}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({"stats"}).code == 2);
  CHECK(run({"stats", "/no/such/file.csv"}).code == 2);
  CHECK(run({"--help"}).code == 0);
  CHECK(run({"ablate", "--help"}).code == 0);
  CHECK(run({"evaluate", testing::test_data("small_spec.json"), "--model", "cnn"}).code == 2);
}

TEST_CASE("cli stats: the shipped Apache corpus") {
  const auto r = run({"stats", testing::source_path("data/corpora/apache.csv")});
  CHECK(r.code == 0);
  CHECK(r.out.find("total          446") != std::string::npos);
  CHECK(r.out.find("bug            296") != std::string::npos);
  CHECK(r.out.find("non-bug        150") != std::string::npos);
  CHECK(r.out.find("bug                 265          31") != std::string::npos);
}

TEST_CASE("cli stats: header-only file gives a zero table") {
  testing::TempDir dir;
  testing::write_file(dir.file("empty.csv"), kHeader);
  const auto r = run({"stats", dir.file("empty.csv")});
  CHECK(r.code == 0);
  CHECK(r.out.find("total            0") != std::string::npos);
  CHECK(r.out.find("non-bug               0           0") != std::string::npos);
}

TEST_CASE("cli stats: malformed file exits 2 naming the column") {
  testing::TempDir dir;
  testing::write_file(dir.file("bad.csv"), "id,product,component,reporter,severity,intention,label\n");
  const auto r = run({"stats", dir.file("bad.csv")});
  CHECK(r.code == 2);
  CHECK(r.err.find("summary") != std::string::npos);
}

TEST_CASE("cli: runtime failures exit 1") {
  testing::TempDir dir;
  const std::string data = small_csv(dir);
  const auto r = run({"stats", data, "--out", dir.file("missing/dir/out.txt")});
  CHECK(r.code == 1);
}

TEST_CASE("cli train/predict round trip") {
  testing::TempDir dir;
  const std::string data = small_csv(dir);
  for (const std::string model : {"knn", "nb", "lr", "svm", "rf"}) {
    CAPTURE(model);
    const std::string file = dir.file(model + ".json");
    const auto t = run({"train", data, "--model", model, "--rf-trees", "10", "--out", file});
    REQUIRE(t.code == 0);
    const auto p1 = run({"predict", file, data});
    const auto p2 = run({"predict", file, data});
    REQUIRE(p1.code == 0);
    CHECK(p1.out == p2.out);
    CHECK(count_lines(p1.out) == 61);
    const std::string header = p1.out.substr(0, p1.out.find('\n'));
    CHECK(header.find("predicted_label") != std::string::npos);
    CHECK((header.find(",pi") != std::string::npos) == (model == "lr"));
    CHECK((header.find("posterior_bug,posterior_nonbug") != std::string::npos) == (model == "nb"));
  }
}

TEST_CASE("cli predict: K-NN on a single training row returns its label") {
  testing::TempDir dir;
  const std::string data = small_csv(dir);
  REQUIRE(run({"train", data, "--model", "knn", "--k", "1", "--out", dir.file("knn.json")}).code == 0);
  const Dataset ds = load_csv(data);
  for (std::size_t i : {0u, 7u, 31u}) {
    Dataset one;
    one.reports = {ds[i]};
    save_csv(dir.file("one.csv"), one);
    const auto p = run({"predict", dir.file("knn.json"), dir.file("one.csv")});
    REQUIRE(p.code == 0);
    const std::string row = p.out.substr(p.out.find('\n') + 1);
    CHECK(row.substr(row.rfind(',', row.size() - 2) + 1) == std::string(to_string(ds[i].label)) + "\n");
  }
}

TEST_CASE("cli predict: schema errors") {
  testing::TempDir dir;
  const std::string data = small_csv(dir);
  REQUIRE(run({"train", data, "--model", "nb", "--out", dir.file("nb.json")}).code == 0);
  testing::write_file(dir.file("nosummary.csv"), "id,product,component,reporter,severity,intention\n1,a,b,c,normal,explanation\n");
  const auto r = run({"predict", dir.file("nb.json"), dir.file("nosummary.csv")});
  CHECK(r.code == 2);
  CHECK(r.err.find("summary") != std::string::npos);

  testing::write_file(dir.file("garbage.json"), "{\"format\": \"other\"}");
  CHECK(run({"predict", dir.file("garbage.json"), data}).code == 2);
  CHECK(run({"predict", dir.file("nb.json"), data, "--embedding-dim", "8"}).code == 0);
}

TEST_CASE("cli ablate: filtered grid and byte-identical reruns") {
  testing::TempDir dir;
  const std::vector<std::string> base{"ablate", "--synth", testing::test_data("small_spec.json"),
                                      "--classifiers", "rf", "--rf-trees", "8", "--seeds", "2",
                                      "--folds", "3"};
  auto a = base;
  a.insert(a.end(), {"--out", dir.file("a")});
  auto b = base;
  b.insert(b.end(), {"--out", dir.file("b"), "--jobs", "3"});
  const auto ra = run(a);
  const auto rb = run(b);
  REQUIRE(ra.code == 0);
  REQUIRE(rb.code == 0);
  CHECK(ra.out == rb.out);
  CHECK(testing::read_file(dir.file("a/results.csv")) == testing::read_file(dir.file("b/results.csv")));
  CHECK(testing::read_file(dir.file("a/table.txt")) == testing::read_file(dir.file("b/table.txt")));
  // 3 modes x 1 classifier x 2 seeds x 3 folds
  CHECK(count_lines(testing::read_file(dir.file("a/results.csv"))) == 1 + 18);
  const std::string block = ra.out.substr(ra.out.find("Accuracy"));
  CHECK(block.substr(0, block.find('\n')).find("RF") != std::string::npos);
  CHECK(block.substr(0, block.find('\n')).find("NB") == std::string::npos);
}

TEST_CASE("cli ablate: golden report") {
  testing::TempDir dir;
  const auto r = run({"ablate", "--synth", testing::test_data("small_spec.json"), "--classifiers",
                      "nb,lr", "--seeds", "1", "--folds", "3", "--seed", "5", "--embedding-dim", "16",
                      "--out", dir.file("report")});
  REQUIRE(r.code == 0);
  CHECK(testing::read_file(dir.file("report/results.csv")) ==
        testing::read_file(testing::test_data("golden/results.csv")));
  CHECK(testing::read_file(dir.file("report/table.txt")) ==
        testing::read_file(testing::test_data("golden/table.txt")));
}

TEST_CASE("cli split: stratified 8:2 partition") {
  testing::TempDir dir;
  const std::string data = small_csv(dir);
  const auto r = run({"split", data, "--train", dir.file("train.csv"), "--test", dir.file("test.csv")});
  REQUIRE(r.code == 0);
  const Dataset train = load_csv(dir.file("train.csv"));
  const Dataset test = load_csv(dir.file("test.csv"));
  CHECK(train.size() == 48);
  CHECK(test.size() == 12);
  std::set<std::string> ids;
  for (const auto& x : train.reports) ids.insert(x.id);
  for (const auto& x : test.reports) ids.insert(x.id);
  CHECK(ids.size() == 60);
  CHECK(run({"split", data, "--train", dir.file("t.csv"), "--test", dir.file("u.csv"),
             "--test-fraction", "0"}).code == 2);
}

TEST_CASE("cli synth and preprocess are reproducible") {
  testing::TempDir dir;
  CHECK(run({"synth", testing::test_data("small_spec.json")}).out ==
        run({"synth", testing::test_data("small_spec.json")}).out);
  CHECK(run({"synth", testing::test_data("small_spec.json"), "--seed", "3"}).out !=
        run({"synth", testing::test_data("small_spec.json")}).out);
  const auto p = run({"preprocess", "--text", "Copy XML doesn't work on #document nodes"});
  CHECK(p.code == 0);
  CHECK(p.out == "copi xml work document node\n");
}

TEST_CASE("cli config: print-config and file overrides") {
  testing::TempDir dir;
  const auto shown = run({"--print-config", "--seed", "9", "stats", testing::test_data("small_spec.json")});
  CHECK(shown.code == 0);
  CHECK(shown.out.find("seed=9") != std::string::npos);

  const std::string data = small_csv(dir);
  testing::write_file(dir.file("run.toml"), "seed=3\n");
  const auto from_file = run({"--config", dir.file("run.toml"), "synth", testing::test_data("small_spec.json")});
  const auto from_flag = run({"synth", testing::test_data("small_spec.json"), "--seed", "3"});
  CHECK(from_file.out == from_flag.out);
  const auto overridden = run({"--config", dir.file("run.toml"), "--seed", "4", "synth",
                               testing::test_data("small_spec.json")});
  CHECK(overridden.out == run({"synth", testing::test_data("small_spec.json"), "--seed", "4"}).out);
}
