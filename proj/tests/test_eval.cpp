#include <doctest.h>

#include <algorithm>
#include <mutex>
#include <set>
#include <sstream>

#include "bugtriage/ablation.hpp"
#include "bugtriage/cross_validation.hpp"
#include "bugtriage/error.hpp"
#include "bugtriage/metrics.hpp"
#include "bugtriage/random.hpp"
#include "bugtriage/report.hpp"
#include "bugtriage/synth.hpp"
#include "support/paths.hpp"

using namespace bugtriage;
using doctest::Approx;

namespace {

constexpr Label B = Label::Bug;
constexpr Label N = Label::NonBug;

/// Predicts from the intention column (the last frequency column), which the
/// fixture makes identical to the label.
class IntentionStub final : public Classifier {
 public:
  ClassifierKind kind() const override { return ClassifierKind::Knn; }
  void fit(const LabeledMatrix& train) override {
    width_ = train.x.cols();
    column_ = train.x.frequency_columns - 1;
    for (std::size_t i = 0; i < train.y.size(); ++i) {
      if (train.y[i] == B) bug_value_ = train.x(i, column_);
    }
  }
  std::vector<Label> predict(const FeatureMatrix& rows) const override {
    std::vector<Label> out;
    for (std::size_t i = 0; i < rows.rows(); ++i) out.push_back(rows(i, column_) == bug_value_ ? B : N);
    return out;
  }
  std::size_t width() const override { return width_; }
  nlohmann::json to_json() const override { return {}; }

 private:
  std::size_t width_ = 0;
  std::size_t column_ = 0;
  double bug_value_ = 0.0;
};

class ConstantStub final : public Classifier {
 public:
  explicit ConstantStub(std::optional<Label> fixed = std::nullopt) : fixed_(fixed) {}
  ClassifierKind kind() const override { return ClassifierKind::Knn; }
  void fit(const LabeledMatrix& train) override {
    width_ = train.x.cols();
    if (fixed_) {
      label_ = *fixed_;
      return;
    }
    const auto bugs = std::count(train.y.begin(), train.y.end(), B);
    label_ = 2 * static_cast<std::size_t>(bugs) >= train.y.size() ? B : N;
  }
  std::vector<Label> predict(const FeatureMatrix& rows) const override {
    return std::vector<Label>(rows.rows(), label_);
  }
  std::size_t width() const override { return width_; }
  nlohmann::json to_json() const override { return {}; }

 private:
  std::optional<Label> fixed_;
  Label label_ = B;
  std::size_t width_ = 0;
};

/// Every third report is a non-bug, so the two intention values have
/// different document frequencies and stay distinct after scaling.
Dataset intention_is_label(std::size_t n) {
  Dataset ds;
  for (std::size_t i = 0; i < n; ++i) {
    BugReport r;
    r.id = "r" + std::to_string(i);
    r.product = i % 3 ? "core" : "ui";
    r.component = "general";
    r.reporter = "dev" + std::to_string(i % 5);
    r.severity = "normal";
    r.summary = i % 2 ? "crash when saving file" : "add option for dark theme";
    r.label = i % 3 ? B : N;
    r.intention = r.label == B ? Intention::Explanation : Intention::Suggestion;
    ds.reports.push_back(r);
  }
  return ds;
}

Embeddings embed(const Dataset& ds) {
  HashingEmbedder e(16);
  return embed_dataset(ds, e, StopwordList::bundled());
}

Metrics brute_metrics(const std::vector<Label>& t, const std::vector<Label>& p) {
  double tp = 0, tn = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    tp += t[i] == B && p[i] == B;
    tn += t[i] == N && p[i] == N;
    fp += t[i] == N && p[i] == B;
    fn += t[i] == B && p[i] == N;
  }
  Metrics m;
  m.accuracy = (tp + tn) / static_cast<double>(t.size());
  m.precision = tp + fp > 0 ? tp / (tp + fp) : 0.0;
  m.recall = tp + fn > 0 ? tp / (tp + fn) : 0.0;
  m.f_measure = tp > 0 ? 2 * tp / (2 * tp + fp + fn) : 0.0;
  return m;
}

}  // namespace

TEST_CASE("confusion counts") {
  const std::vector<Label> t{B, B, N, N}, p{B, N, B, N};
  CHECK(confusion(t, p) == ConfusionMatrix{1, 1, 1, 1});
  const auto same = confusion(t, t);
  CHECK(same.fp == 0);
  CHECK(same.fn == 0);
  CHECK(confusion(std::vector<Label>{}, std::vector<Label>{}) == ConfusionMatrix{});
  CHECK_THROWS_AS(confusion(t, std::vector<Label>{B}), InputError);
}

TEST_CASE("metric closed forms") {
  const Metrics m = metrics({9, 9, 1, 1});
  CHECK(m.accuracy == Approx(0.9));
  CHECK(m.precision == Approx(0.9));
  CHECK(m.recall == Approx(0.9));
  CHECK(m.f_measure == Approx(0.9));

  const Metrics z = metrics({0, 5, 0, 3});
  CHECK(z.precision == 0.0);
  CHECK(z.precision_undefined);
  CHECK(z.f_measure_undefined);

  const Metrics h = metrics({8, 0, 2, 4});
  CHECK(h.precision == Approx(0.8));
  CHECK(h.recall == Approx(2.0 / 3.0));
  CHECK(h.f_measure == Approx(0.7273).epsilon(1e-4));
  CHECK_FALSE(h.precision_undefined);

  CHECK_THROWS_AS(metrics(ConfusionMatrix{}), InputError);
}

TEST_CASE("metrics agree with pairwise recount on random labels") {
  Rng rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng.below(60);
    std::vector<Label> t(n), p(n);
    for (std::size_t i = 0; i < n; ++i) {
      t[i] = rng.below(2) ? B : N;
      p[i] = rng.below(2) ? B : N;
    }
    const Metrics got = metrics(confusion(t, p));
    const Metrics want = brute_metrics(t, p);
    CHECK(got.accuracy == want.accuracy);
    CHECK(got.precision == want.precision);
    CHECK(got.recall == want.recall);
    CHECK(got.f_measure == want.f_measure);
    if (got.precision + got.recall > 0) {
      CHECK(got.f_measure == doctest::Approx(2 * got.precision * got.recall / (got.precision + got.recall)));
      CHECK(got.f_measure >= std::min(got.precision, got.recall));
      CHECK(got.f_measure <= std::max(got.precision, got.recall));
    }
  }
}

TEST_CASE("mean of metrics") {
  const Metrics a = metrics({1, 1, 0, 0});
  const Metrics b = metrics({0, 2, 0, 0});
  const std::vector<Metrics> both{a, b};
  const Metrics m = mean(both);
  CHECK(m.accuracy == 1.0);
  CHECK(m.precision == 0.5);
  CHECK(m.precision_undefined);
  CHECK_THROWS_AS(mean(std::span<const Metrics>{}), InputError);
}

TEST_CASE("cross-validation with stub classifiers") {
  const Dataset ds = intention_is_label(45);
  const auto emb = embed(ds);
  CvOptions opt;
  opt.k = 5;

  const auto perfect = cross_validate(ds, emb, opt, [](std::uint64_t) {
    return std::make_unique<IntentionStub>();
  }, "perfect");
  CHECK(perfect.folds.size() == 5);
  CHECK(perfect.mean.accuracy == 1.0);
  CHECK(perfect.mean.precision == 1.0);
  CHECK(perfect.mean.recall == 1.0);
  CHECK(perfect.mean.f_measure == 1.0);

  Dataset balanced = ds;
  balanced.reports.resize(40);
  for (std::size_t i = 0; i < 40; ++i) balanced.reports[i].label = i % 2 ? B : N;
  const auto constant = cross_validate(balanced, embed(balanced), opt, [](std::uint64_t) {
    return std::make_unique<ConstantStub>(B);
  }, "bug");
  CHECK(constant.mean.accuracy == 0.5);
  CHECK(constant.mean.recall == 1.0);
}

TEST_CASE("constant majority predictor scores the majority fraction") {
  const Dataset ds = intention_is_label(30);  // 20 bugs of 30
  const auto emb = embed(ds);
  ConstantStub majority;
  const FoldResult r = evaluate_split(ds, emb, ds, emb, FeatureMode::Text, majority);
  CHECK(r.metrics.accuracy == 20.0 / 30.0);
}

TEST_CASE("cross-validation is deterministic and jobs-independent") {
  const Dataset ds = generate_synthetic(load_synth_spec(testing::test_data("small_spec.json")));
  const auto emb = embed(ds);
  ClassifierConfig rf;
  rf.rf.trees = 10;
  CvOptions opt;
  opt.k = 4;
  const auto a = cross_validate(ds, emb, opt, rf);
  const auto b = cross_validate(ds, emb, opt, rf);
  opt.jobs = 3;
  const auto c = cross_validate(ds, emb, opt, rf);
  for (const auto* other : {&b, &c}) {
    REQUIRE(other->folds.size() == a.folds.size());
    for (std::size_t f = 0; f < a.folds.size(); ++f) CHECK(other->folds[f].confusion == a.folds[f].confusion);
    CHECK(other->mean == a.mean);
  }
  CHECK(a.classifier == "RF");
  CHECK(a.seed == 42);
}

TEST_CASE("cross-validation never fits on the evaluated fold") {
  const Dataset ds = generate_synthetic(load_synth_spec(testing::test_data("small_spec.json")));
  const auto emb = embed(ds);
  std::mutex mu;
  std::map<std::size_t, std::map<FitStage, std::set<std::string>>> seen;
  CvOptions opt;
  opt.k = 5;
  opt.jobs = 2;
  opt.observer = [&](std::size_t fold, FitStage stage, std::span<const std::string> ids) {
    std::lock_guard lock(mu);
    seen[fold][stage].insert(ids.begin(), ids.end());
  };
  ClassifierConfig lr;
  lr.kind = ClassifierKind::LogisticRegression;
  cross_validate(ds, emb, opt, lr);

  REQUIRE(seen.size() == 5);
  std::set<std::string> evaluated;
  for (auto& [fold, stages] : seen) {
    const auto& test = stages[FitStage::Evaluate];
    CHECK_FALSE(test.empty());
    evaluated.insert(test.begin(), test.end());
    for (FitStage s : {FitStage::Tfidf, FitStage::MinMax, FitStage::Classifier}) {
      CAPTURE(to_string(s));
      CHECK(stages[s].size() + test.size() == ds.size());
      for (const auto& id : test) CHECK(stages[s].count(id) == 0);
    }
  }
  CHECK(evaluated.size() == ds.size());
}

TEST_CASE("ablation grid shape and report files") {
  const SynthSpec spec = load_synth_spec(testing::test_data("small_spec.json"));
  AblationOptions opt;
  ClassifierConfig rf;
  rf.rf.trees = 5;
  opt.classifiers = {rf};
  opt.k = 3;
  opt.seeds = {1, 2};
  HashingEmbedder e(16);
  const auto table = run_ablation({{"small", [&](std::uint64_t seed) {
                                      SynthSpec s = spec;
                                      s.seed = seed;
                                      return generate_synthetic(s);
                                    }}},
                                  opt, e, StopwordList::bundled());
  CHECK(table.runs.size() == 3 * 2);
  CHECK(table.modes.size() == 3);
  CHECK(table.classifiers == std::vector<ClassifierKind>{ClassifierKind::RandomForest});
  for (std::size_t m = 0; m < 3; ++m) {
    const double acc = table.accuracy(0, m, 0);
    CHECK(acc >= 0.0);
    CHECK(acc <= 1.0);
    const double expected = (table.runs[m].cv.mean.accuracy + table.runs[3 + m].cv.mean.accuracy) / 2;
    CHECK(acc == Approx(expected).epsilon(1e-15));
  }

  std::ostringstream csv;
  write_results_csv(csv, table);
  std::istringstream lines(csv.str());
  std::string line;
  std::size_t count = 0;
  while (std::getline(lines, line)) ++count;
  CHECK(count == 1 + 6 * 3);

  testing::TempDir dir;
  render_report(dir.file("report"), table);
  CHECK(testing::read_file(dir.file("report/results.csv")) == csv.str());
  CHECK(testing::read_file(dir.file("report/table.txt")).find("Text+Freq+Intention") != std::string::npos);
}

TEST_CASE("empty results give a header-only report") {
  const AblationTable empty;
  std::ostringstream csv, txt;
  write_results_csv(csv, empty);
  write_ablation_table(txt, empty);
  CHECK(csv.str() == "dataset,mode,classifier,seed,fold,tp,tn,fp,fn,accuracy,precision,recall,f_measure,undefined\n");
  CHECK(txt.str().find("==") == std::string::npos);
  testing::TempDir dir;
  CHECK_NOTHROW(render_report(dir.file("out"), empty));
  CHECK_THROWS_AS(render_report("/proc/no/such/dir", empty), Error);
}

TEST_CASE("one CV result renders one mean row") {
  CvResult r{"NB", FeatureMode::Text, 1, {{ConfusionMatrix{1, 1, 0, 0}, metrics({1, 1, 0, 0})}},
             metrics({1, 1, 0, 0})};
  std::ostringstream out;
  write_cv_table(out, r);
  CHECK(out.str().find("mean") != std::string::npos);
}
