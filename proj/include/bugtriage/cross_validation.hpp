#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "bugtriage/classifier.hpp"
#include "bugtriage/features.hpp"
#include "bugtriage/metrics.hpp"

namespace bugtriage {

enum class FitStage { Tfidf, MinMax, Classifier, Evaluate };

std::string_view to_string(FitStage stage);

/// Sees the report ids reaching each fit call of a fold, and the ids the
/// fold is evaluated on (FitStage::Evaluate). May be called from worker
/// threads when jobs > 1.
using FitObserver =
    std::function<void(std::size_t fold, FitStage stage, std::span<const std::string> row_ids)>;

/// Builds an unfitted classifier for one fold from a per-fold seed.
using ClassifierFactory = std::function<std::unique_ptr<Classifier>(std::uint64_t seed)>;

struct CvOptions {
  FeatureMode mode = FeatureMode::TextFreqIntention;
  std::size_t k = 10;
  std::uint64_t seed = 42;
  std::size_t jobs = 1;
  FitObserver observer;
};

struct FoldResult {
  ConfusionMatrix confusion;
  Metrics metrics;
};

struct CvResult {
  std::string classifier;
  FeatureMode mode = FeatureMode::TextFreqIntention;
  std::uint64_t seed = 0;
  std::vector<FoldResult> folds;  // indexed by fold
  Metrics mean;                   // per-metric mean over folds
};

/// Stratified k-fold cross-validation. Folds come from
/// stratified_kfold(ds, k, seed); fold j's classifier is seeded with
/// derive_seed(seed, j). TF-IDF, min-max and the classifier are refitted on
/// each training split; `embeddings` (one per report) are not fitted and
/// are shared by all folds.
CvResult cross_validate(const Dataset& ds, const Embeddings& embeddings, const CvOptions& options,
                        const ClassifierFactory& factory, std::string classifier_name);
CvResult cross_validate(const Dataset& ds, const Embeddings& embeddings, const CvOptions& options,
                        const ClassifierConfig& config);

/// Evaluates one fitted split (train -> test) with the same feature stage.
FoldResult evaluate_split(const Dataset& train, const Embeddings& train_embeddings,
                          const Dataset& test, const Embeddings& test_embeddings, FeatureMode mode,
                          Classifier& classifier);

}  // namespace bugtriage
