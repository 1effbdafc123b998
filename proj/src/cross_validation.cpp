#include "bugtriage/cross_validation.hpp"

#include "bugtriage/error.hpp"
#include "bugtriage/parallel.hpp"
#include "bugtriage/pipeline.hpp"
#include "bugtriage/random.hpp"

namespace bugtriage {

namespace {

Embeddings select(const Embeddings& all, const std::vector<std::size_t>& indices) {
  Embeddings out;
  out.reserve(indices.size());
  for (std::size_t i : indices) out.push_back(all[i]);
  return out;
}

std::vector<std::string> ids_of(const Dataset& ds) {
  std::vector<std::string> ids;
  ids.reserve(ds.size());
  for (const auto& r : ds.reports) ids.push_back(r.id);
  return ids;
}

FoldResult run_split(const Dataset& train, const Embeddings& train_embeddings, const Dataset& test,
                     const Embeddings& test_embeddings, FeatureMode mode, Classifier& classifier,
                     const FitObserver& observer, std::size_t fold) {
  if (observer) observer(fold, FitStage::Tfidf, ids_of(train));
  FeatureMatrix x;
  const FeaturePipeline features = fit_feature_pipeline(train, train_embeddings, mode, &x);
  if (observer) {
    observer(fold, FitStage::MinMax, x.row_ids);
    observer(fold, FitStage::Classifier, x.row_ids);
  }
  classifier.fit(labeled(std::move(x), train));

  const FeatureMatrix test_x = features.transform(test, test_embeddings);
  if (observer) observer(fold, FitStage::Evaluate, test_x.row_ids);
  const auto predicted = classifier.predict(test_x);
  std::vector<Label> truth;
  truth.reserve(test.size());
  for (const auto& r : test.reports) truth.push_back(r.label);

  FoldResult result;
  result.confusion = confusion(truth, predicted);
  result.metrics = metrics(result.confusion);
  return result;
}

}  // namespace

std::string_view to_string(FitStage stage) {
  switch (stage) {
    case FitStage::Tfidf: return "tfidf";
    case FitStage::MinMax: return "minmax";
    case FitStage::Classifier: return "classifier";
    case FitStage::Evaluate: return "evaluate";
  }
  return "?";
}

CvResult cross_validate(const Dataset& ds, const Embeddings& embeddings, const CvOptions& options,
                        const ClassifierFactory& factory, std::string classifier_name) {
  if (embeddings.size() != ds.size()) {
    throw Error("cross_validate: embedding count does not match dataset size");
  }
  const FoldPlan plan = stratified_kfold(ds, options.k, options.seed);

  CvResult result;
  result.classifier = std::move(classifier_name);
  result.mode = options.mode;
  result.seed = options.seed;
  result.folds.resize(options.k);
  parallel_for(options.k, options.jobs, [&](std::size_t fold) {
    const auto train_idx = plan.train_indices(fold);
    const auto test_idx = plan.test_indices(fold);
    auto classifier = factory(derive_seed(options.seed, fold));
    result.folds[fold] = run_split(ds.select(train_idx), select(embeddings, train_idx),
                                   ds.select(test_idx), select(embeddings, test_idx), options.mode,
                                   *classifier, options.observer, fold);
  });

  std::vector<Metrics> per_fold;
  for (const auto& f : result.folds) per_fold.push_back(f.metrics);
  result.mean = mean(per_fold);
  return result;
}

CvResult cross_validate(const Dataset& ds, const Embeddings& embeddings, const CvOptions& options,
                        const ClassifierConfig& config) {
  return cross_validate(
      ds, embeddings, options,
      [&config](std::uint64_t seed) {
        ClassifierConfig c = config;
        c.seed = seed;
        return make_classifier(c);
      },
      std::string(display_name(config.kind)));
}

FoldResult evaluate_split(const Dataset& train, const Embeddings& train_embeddings,
                          const Dataset& test, const Embeddings& test_embeddings, FeatureMode mode,
                          Classifier& classifier) {
  if (test.empty()) throw InputError("evaluate: empty test set");
  return run_split(train, train_embeddings, test, test_embeddings, mode, classifier, {}, 0);
}

}  // namespace bugtriage
