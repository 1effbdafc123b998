#include <doctest.h>

#include <algorithm>
#include <set>
#include <sstream>

#include "bugtriage/corpus.hpp"
#include "bugtriage/error.hpp"
#include "support/paths.hpp"

using namespace bugtriage;

namespace {

const char* kHeader = "id,product,component,reporter,severity,summary,intention,label\n";

Dataset parse(const std::string& text) {
  std::istringstream in(text);
  return read_csv(in, "test");
}

Dataset balanced(std::size_t bugs, std::size_t nonbugs) {
  Dataset ds;
  for (std::size_t i = 0; i < bugs + nonbugs; ++i) {
    BugReport r;
    r.id = std::to_string(i);
    r.summary = "text";
    r.label = i < bugs ? Label::Bug : Label::NonBug;
    ds.reports.push_back(r);
  }
  return ds;
}

std::vector<std::string> ids(const Dataset& ds) {
  std::vector<std::string> out;
  for (const auto& r : ds.reports) out.push_back(r.id);
  return out;
}

}  // namespace

TEST_CASE("load: header plus one valid row") {
  const auto ds = parse(std::string(kHeader) + "1,Firefox,General,alice,enh,Add a button,suggestion,non-bug\n");
  REQUIRE(ds.size() == 1);
  CHECK(ds[0].id == "1");
  CHECK(ds[0].severity == "enhancement");
  CHECK(ds[0].intention == Intention::Suggestion);
  CHECK(ds[0].label == Label::NonBug);
  CHECK(ds.source == "test");
}

TEST_CASE("load: columns in any order, enums case-insensitive") {
  const auto ds = parse("label,summary,id,intention,severity,reporter,component,product\n"
                        "BUG,Crash on start,9,Explanation,Critical,bob,Core,Tomcat\n");
  REQUIRE(ds.size() == 1);
  CHECK(ds[0].product == "Tomcat");
  CHECK(ds[0].label == Label::Bug);
  CHECK(ds[0].intention == Intention::Explanation);
  CHECK(ds[0].severity == "critical");
}

TEST_CASE("load: schema errors name the column") {
  try {
    parse("id,product,component,reporter,severity,intention,label\n");
    FAIL("expected SchemaError");
  } catch (const SchemaError& e) {
    CHECK(e.column() == "summary");
  }
  try {
    parse("id,product,component,reporter,severity,summary,intention,label,extra\n");
    FAIL("expected SchemaError");
  } catch (const SchemaError& e) {
    CHECK(e.column() == "extra");
  }
}

TEST_CASE("load: row-level errors carry the row number") {
  try {
    parse(std::string(kHeader) + "1,p,c,r,normal,ok,explanation,bug\n2,p,c,r,normal,s,advice,bug\n");
    FAIL("expected RowError");
  } catch (const RowError& e) {
    CHECK(e.row() == 2);
    CHECK(std::string(e.what()).find("advice") != std::string::npos);
  }
  CHECK_THROWS_AS(parse(std::string(kHeader) + "1,p,c,r,,s,explanation,bug\n"), RowError);
  CHECK_THROWS_AS(parse(std::string(kHeader) + "1,p,c,r,urgent,s,explanation,bug\n"), RowError);
  CHECK_THROWS_AS(parse(std::string(kHeader) + "1,p,c,r,normal,s,explanation\n"), RowError);
}

TEST_CASE("load: duplicate id is a validation error") {
  try {
    parse(std::string(kHeader) + "42,p,c,r,normal,a,explanation,bug\n42,p,c,r,normal,b,explanation,bug\n");
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()) == "duplicate id: 42");
  }
}

TEST_CASE("severity canonicalization") {
  CHECK(canonical_severity("BLO") == "blocker");
  CHECK(canonical_severity("Enhancement") == "enhancement");
  CHECK(canonical_severity("s2") == "s2");
  CHECK_FALSE(canonical_severity("").has_value());
  CHECK_FALSE(canonical_severity("whatever").has_value());
}

TEST_CASE("csv round trip") {
  Dataset ds = balanced(2, 1);
  ds.reports[0].summary = "comma, \"quote\" and\nnewline";
  ds.reports[0].severity = "major";
  ds.reports[1].severity = "normal";
  ds.reports[2].severity = "enhancement";
  std::ostringstream out;
  write_csv(out, ds);
  std::istringstream in(out.str());
  CHECK(read_csv(in).reports == ds.reports);
}

TEST_CASE("annotation csv round trip") {
  std::vector<UnlabeledReport> reports{{"1", "p", "c", "r", "normal", "Summary, with comma"}};
  std::ostringstream out;
  write_annotation_csv(out, reports);
  CHECK(out.str().rfind("id,product,component,reporter,severity,summary\n", 0) == 0);
  std::istringstream in(out.str());
  CHECK(read_annotation_csv(in) == reports);
}

TEST_CASE("prediction input: intention optional unless required, label ignored") {
  const std::string no_intention = "id,product,component,reporter,severity,summary\n1,p,c,r,normal,s\n";
  std::istringstream a(no_intention);
  CHECK(read_prediction_csv(a, false).reports.size() == 1);
  std::istringstream b(no_intention);
  CHECK_THROWS_AS(read_prediction_csv(b, true), SchemaError);
  std::istringstream c("id,product,component,reporter,severity,intention\n");
  try {
    read_prediction_csv(c, false);
    FAIL("expected SchemaError");
  } catch (const SchemaError& e) {
    CHECK(e.column() == "summary");
  }
}

TEST_CASE("validate findings") {
  CHECK(validate(balanced(1, 1)).valid());
  const auto single = validate(balanced(3, 0));
  CHECK(std::find(single.findings.begin(), single.findings.end(), "single-class dataset") !=
        single.findings.end());
  Dataset dup = balanced(1, 1);
  dup.reports[0].id = "42";
  dup.reports[1].id = "42";
  const auto report = validate(dup);
  CHECK(std::find(report.findings.begin(), report.findings.end(), "duplicate id: 42") !=
        report.findings.end());
  Dataset blank = balanced(1, 1);
  blank.reports[0].summary = "   ";
  CHECK_FALSE(validate(blank).valid());
}

TEST_CASE("stats: empty and hand-made") {
  CHECK(stats(Dataset{}) == DatasetStats{});
  Dataset ds = balanced(3, 2);
  ds.reports[0].intention = Intention::Suggestion;
  const auto s = stats(ds);
  CHECK(s.total == 5);
  CHECK(s.bug_count == 3);
  CHECK(s.nonbug_count == 2);
  CHECK(s.count(Label::Bug, Intention::Suggestion) == 1);
  CHECK(s.count(Label::Bug, Intention::Explanation) == 2);
  CHECK(s.count(Label::NonBug, Intention::Explanation) == 2);
}

TEST_CASE("stats: shipped corpora match the published type and intention counts") {
  struct Expected {
    const char* file;
    std::size_t total, bug, nonbug, bug_expl, bug_sugg, non_expl, non_sugg;
  };
  const Expected table[] = {
      {"apache", 446, 296, 150, 265, 31, 9, 141},
      {"eclipse", 658, 419, 239, 368, 51, 49, 190},
      {"gentoo", 511, 294, 217, 284, 10, 66, 151},
      {"mozilla", 615, 425, 190, 373, 52, 23, 167},
  };
  for (const auto& e : table) {
    CAPTURE(e.file);
    const auto ds = load_csv(testing::source_path(std::string("data/corpora/") + e.file + ".csv"));
    const auto s = stats(ds);
    CHECK(s.total == e.total);
    CHECK(s.bug_count == e.bug);
    CHECK(s.nonbug_count == e.nonbug);
    CHECK(s.count(Label::Bug, Intention::Explanation) == e.bug_expl);
    CHECK(s.count(Label::Bug, Intention::Suggestion) == e.bug_sugg);
    CHECK(s.count(Label::NonBug, Intention::Explanation) == e.non_expl);
    CHECK(s.count(Label::NonBug, Intention::Suggestion) == e.non_sugg);
    CHECK(validate(ds).valid());
  }
}

TEST_CASE("stratified_kfold: 50/50 into ten folds of 5/5") {
  const Dataset ds = balanced(50, 50);
  const auto plan = stratified_kfold(ds, 10, 7);
  for (std::size_t f = 0; f < 10; ++f) {
    const auto test = plan.test_indices(f);
    CHECK(test.size() == 10);
    const auto bugs = std::count_if(test.begin(), test.end(), [&](std::size_t i) { return ds[i].label == Label::Bug; });
    CHECK(bugs == 5);
  }
  CHECK(stratified_kfold(ds, 10, 7).assignments == plan.assignments);
}

TEST_CASE("stratified_kfold: invariants on an imbalanced set") {
  const Dataset ds = balanced(37, 16);
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto plan = stratified_kfold(ds, 10, seed);
    std::vector<std::size_t> seen;
    std::size_t lo = ds.size(), hi = 0;
    for (std::size_t f = 0; f < 10; ++f) {
      const auto test = plan.test_indices(f);
      const auto train = plan.train_indices(f);
      CHECK(test.size() + train.size() == ds.size());
      lo = std::min(lo, test.size());
      hi = std::max(hi, test.size());
      const double bugs = std::count_if(test.begin(), test.end(), [&](std::size_t i) { return ds[i].label == Label::Bug; });
      CHECK(std::abs(bugs - test.size() * 37.0 / 53.0) < 1.0 + 1e-9);
      seen.insert(seen.end(), test.begin(), test.end());
    }
    CHECK(hi - lo <= 1);
    std::sort(seen.begin(), seen.end());
    for (std::size_t i = 0; i < ds.size(); ++i) CHECK(seen[i] == i);
  }
}

TEST_CASE("stratified_kfold: errors") {
  CHECK_THROWS_AS(stratified_kfold(balanced(10, 1), 10, 1), InfeasibleError);
  CHECK_THROWS_AS(stratified_kfold(balanced(10, 10), 1, 1), InputError);
}

TEST_CASE("train_test_split: 8:2, stratified partition") {
  const Dataset ds = balanced(60, 40);
  const auto [train, test] = train_test_split(ds, 0.2, 3);
  CHECK(train.size() == 80);
  CHECK(test.size() == 20);
  CHECK(stats(test).bug_count == 12);
  std::set<std::string> all;
  for (const auto& id : ids(train)) all.insert(id);
  for (const auto& id : ids(test)) CHECK(all.insert(id).second);
  CHECK(all.size() == 100);
  CHECK_THROWS_AS(train_test_split(ds, 0.0, 3), InputError);
  CHECK_THROWS_AS(train_test_split(ds, 1.0, 3), InputError);
}

TEST_CASE("train_test_split: rounding of the test size") {
  const Dataset ds = balanced(7, 4);
  const auto [train, test] = train_test_split(ds, 0.2, 1);
  CHECK(test.size() == 2);  // round(2.2)
  CHECK(train.size() == 9);
  const auto again = train_test_split(ds, 0.2, 1);
  CHECK(ids(again.second) == ids(test));
}
