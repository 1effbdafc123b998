#include <doctest.h>

#include <cmath>

#include "bugtriage/error.hpp"
#include "bugtriage/features.hpp"
#include "bugtriage/pipeline.hpp"

using namespace bugtriage;
using doctest::Approx;

namespace {

BugReport report(std::string id, std::string severity, Intention intention = Intention::Explanation) {
  BugReport r;
  r.id = std::move(id);
  r.product = "Firefox";
  r.component = "General";
  r.reporter = "alice";
  r.severity = std::move(severity);
  r.summary = "menu crashes on open";
  r.intention = intention;
  return r;
}

Dataset four_severities() {
  Dataset ds;
  ds.reports = {report("1", "enhancement"), report("2", "enhancement"), report("3", "blocker"),
                report("4", "blocker", Intention::Suggestion)};
  return ds;
}

}  // namespace

TEST_CASE("tfidf closed form") {
  CHECK(tfidf(1, 1, 4, 1) == Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(tfidf(1, 1, 4, 1) == Approx(0.6931).epsilon(1e-4));
  CHECK(tfidf(1, 1, 4, 3) == 0.0);
  CHECK(tfidf(1, 1, 4, 4) == Approx(-0.2231).epsilon(1e-3));
  CHECK(tfidf(2, 4, 10, 4) == Approx(0.5 * std::log(2.0)));
}

TEST_CASE("fit_tfidf counts and scores") {
  const auto model = fit_tfidf(four_severities());
  CHECK(model.documents() == 4);
  CHECK(model.document_frequency(FeatureField::Severity, "enhancement") == 2);
  CHECK(model.document_frequency(FeatureField::Severity, "minor") == 0);
  CHECK(tfidf_score(model, FeatureField::Severity, "minor") == Approx(std::log(4.0)));
  CHECK(tfidf_score(model, FeatureField::Product, "Firefox") == Approx(std::log(4.0 / 5.0)));
  CHECK(tfidf_score(model, FeatureField::Intention, "suggestion") == Approx(std::log(2.0)));
  CHECK(fit_tfidf(four_severities()) == model);
  CHECK_THROWS_AS(fit_tfidf(Dataset{}), InputError);
}

TEST_CASE("feature modes") {
  CHECK(frequency_fields(FeatureMode::Text).empty());
  CHECK(frequency_fields(FeatureMode::TextFreq) ==
        std::vector<FeatureField>{FeatureField::Product, FeatureField::Component,
                                  FeatureField::Reporter, FeatureField::Severity});
  CHECK(frequency_fields(FeatureMode::TextFreqIntention).size() == 5);
  CHECK(parse_feature_mode("text-freq_INTENTION") == FeatureMode::TextFreqIntention);
  CHECK(parse_feature_mode("Text+Freq") == FeatureMode::TextFreq);
  CHECK_FALSE(parse_feature_mode("freq").has_value());
  for (FeatureMode m : kAllModes) CHECK(parse_feature_mode(to_string(m)) == m);
}

TEST_CASE("build_features: widths, column order, determinism") {
  const Dataset ds = four_severities();
  const auto model = fit_tfidf(ds);
  HashingEmbedder embedder(64);
  const auto& sw = StopwordList::bundled();

  const auto text = build_features(ds, FeatureMode::Text, model, embedder, sw);
  CHECK(text.cols() == 64);
  CHECK(text.frequency_columns == 0);

  const auto full = build_features(ds, FeatureMode::TextFreqIntention, model, embedder, sw);
  CHECK(full.cols() == 5 + 64);
  CHECK(full.rows() == 4);
  CHECK(full.column_names[0] == "Tp");
  CHECK(full.column_names[3] == "Ts");
  CHECK(full.column_names[4] == "Ta");
  CHECK(full.column_names[5] == "V1");
  CHECK(full.row_ids == std::vector<std::string>{"1", "2", "3", "4"});
  CHECK(full(0, 3) == Approx(std::log(4.0 / 3.0)));
  // reports 1 and 2 agree on every field
  for (std::size_t c = 0; c < full.cols(); ++c) CHECK(full(0, c) == full(1, c));
  CHECK(build_features(ds, FeatureMode::TextFreqIntention, model, embedder, sw) == full);
}

TEST_CASE("build_features never reads labels") {
  Dataset a = four_severities();
  Dataset b = a;
  for (auto& r : b.reports) r.label = r.label == Label::Bug ? Label::NonBug : Label::Bug;
  HashingEmbedder embedder;
  const auto model = fit_tfidf(a);
  CHECK(build_features(a, FeatureMode::TextFreqIntention, model, embedder, StopwordList::bundled()) ==
        build_features(b, FeatureMode::TextFreqIntention, model, embedder, StopwordList::bundled()));
}

TEST_CASE("min-max normalization") {
  const auto train = FeatureMatrix::from_rows({{0.0, 3.0}, {5.0, 3.0}, {10.0, 3.0}});
  const auto params = fit_minmax(train);
  const auto scaled = apply_minmax(params, train);
  CHECK(scaled(0, 0) == 0.0);
  CHECK(scaled(1, 0) == 0.5);
  CHECK(scaled(2, 0) == 1.0);
  for (std::size_t r = 0; r < 3; ++r) CHECK(scaled(r, 1) == 0.0);

  const auto test = apply_minmax(params, FeatureMatrix::from_rows({{12.0, 7.0}, {-1.0, 3.0}}));
  CHECK(test(0, 0) == 1.0);
  CHECK(test(1, 0) == 0.0);
  CHECK(test(0, 1) == 0.0);
  CHECK_THROWS(apply_minmax(params, FeatureMatrix::from_rows({{1.0}})));
}

TEST_CASE("feature pipeline fits on training rows only") {
  Dataset train = four_severities();
  train.reports[2].severity = "enhancement";  // enhancement scores 0, blocker ln 2
  Dataset test;
  test.reports = {report("9", "minor")};
  HashingEmbedder embedder;
  const auto& sw = StopwordList::bundled();
  FeatureMatrix x;
  const auto p = fit_feature_pipeline(train, embed_dataset(train, embedder, sw), FeatureMode::TextFreq, &x);
  CHECK(p.tfidf.documents() == 4);
  for (double v : x.data()) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
  const auto t = p.transform(test, embed_dataset(test, embedder, sw));
  CHECK(t.rows() == 1);
  CHECK(t(0, 3) == 1.0);  // unseen severity has the largest score, clamped
}
