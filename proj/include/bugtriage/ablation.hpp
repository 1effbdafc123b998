#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "bugtriage/classifier.hpp"
#include "bugtriage/cross_validation.hpp"
#include "bugtriage/embedding.hpp"
#include "bugtriage/features.hpp"
#include "bugtriage/preprocess.hpp"

namespace bugtriage {

/// A named corpus. `load(seed)` may ignore the seed (a fixed file) or
/// regenerate the data from it (a synthetic spec).
struct AblationInput {
  std::string name;
  std::function<Dataset(std::uint64_t seed)> load;
};

struct AblationOptions {
  std::vector<FeatureMode> modes{kAllModes.begin(), kAllModes.end()};
  std::vector<ClassifierConfig> classifiers;
  std::vector<std::uint64_t> seeds{42};
  std::size_t k = 10;
  std::size_t jobs = 1;
};

/// One cross-validation run of the grid.
struct AblationRun {
  std::size_t dataset = 0;
  std::size_t mode = 0;
  std::size_t classifier = 0;
  std::size_t seed = 0;
  CvResult cv;
};

struct AblationTable {
  std::vector<std::string> datasets;
  std::vector<FeatureMode> modes;
  std::vector<ClassifierKind> classifiers;
  std::vector<std::uint64_t> seeds;
  /// Ordered by (dataset, seed, mode, classifier).
  std::vector<AblationRun> runs;

  /// Mean over seeds of the per-run fold means.
  Metrics cell(std::size_t dataset, std::size_t mode, std::size_t classifier) const;
  double accuracy(std::size_t dataset, std::size_t mode, std::size_t classifier) const {
    return cell(dataset, mode, classifier).accuracy;
  }
};

/// Cross-validates every (dataset, seed, mode, classifier) cell. The seed
/// drives the dataset loader, the fold assignment and the classifiers.
/// Embeddings are computed once per (dataset, seed). Output does not depend
/// on `jobs`.
AblationTable run_ablation(const std::vector<AblationInput>& inputs, const AblationOptions& options,
                           Embedder& embedder, const StopwordList& stopwords);

}  // namespace bugtriage
