#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "bugtriage/classifier.hpp"
#include "bugtriage/corpus.hpp"
#include "bugtriage/embedding.hpp"
#include "bugtriage/features.hpp"

namespace bugtriage {

/// Fitted feature stage: TF-IDF tables and min-max parameters from one
/// training set.
struct FeaturePipeline {
  FeatureMode mode = FeatureMode::TextFreqIntention;
  TfidfModel tfidf;
  MinMaxParams minmax;

  /// build_features followed by apply_minmax.
  FeatureMatrix transform(const Dataset& ds, const Embeddings& embeddings) const;
};

/// Fits TF-IDF and min-max on `train` only; returns the normalized training
/// matrix through `train_matrix` when non-null.
FeaturePipeline fit_feature_pipeline(const Dataset& train, const Embeddings& train_embeddings,
                                     FeatureMode mode, FeatureMatrix* train_matrix = nullptr);

LabeledMatrix labeled(FeatureMatrix x, const Dataset& ds);

/// A trained end-to-end model as persisted by `train` and read by `predict`.
///
/// File format (JSON):
///   {"format": "bugtriage-model", "version": 1,
///    "mode": "Text+Freq+Intention",
///    "embedder": {"kind": "fallback"|"sidecar", "dim": N, "identity": "..."},
///    "stopwords": {"source": "...", "words": [...]},
///    "tfidf": {"documents": D, "tables": {"product": {value: Dw}, ...}},
///    "minmax": {"min": [...], "max": [...]},
///    "columns": ["Tp", ..., "V1", ...],
///    "classifier": {"kind": ..., "hyper": {...}, "params": {...}}}
struct Model {
  static constexpr int kVersion = 1;

  FeaturePipeline features;
  EmbedderSpec embedder;
  std::string embedder_identity;
  StopwordList stopwords;
  std::vector<std::string> columns;
  std::shared_ptr<const Classifier> classifier;
};

Model train_model(const Dataset& train, FeatureMode mode, const ClassifierConfig& config,
                  Embedder& embedder, const EmbedderSpec& spec, const StopwordList& stopwords);

struct Predictions {
  std::vector<Label> labels;
  std::optional<std::vector<double>> bug_probability;
};

/// Throws InputError when `embedder` differs from the one used in training.
Predictions predict(const Model& model, const Dataset& ds, Embedder& embedder);

nlohmann::json to_json(const Model& model);
/// Throws InputError on a foreign format tag, unknown version or malformed body.
Model model_from_json(const nlohmann::json& j);
void save_model(const std::string& path, const Model& model);
Model load_model(const std::string& path);

}  // namespace bugtriage
