#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "bugtriage/corpus.hpp"
#include "bugtriage/feature_matrix.hpp"

namespace bugtriage {

/// Feature rows with their labels (Bug = 1, NonBug = 0).
struct LabeledMatrix {
  FeatureMatrix x;
  std::vector<Label> y;
};

enum class ClassifierKind { Knn, NaiveBayes, LogisticRegression, Svm, RandomForest };

inline constexpr ClassifierKind kAllClassifiers[] = {
    ClassifierKind::Knn, ClassifierKind::NaiveBayes, ClassifierKind::LogisticRegression,
    ClassifierKind::Svm, ClassifierKind::RandomForest};

/// Short CLI name: knn, nb, lr, svm, rf.
std::string_view to_string(ClassifierKind kind);
/// Display name: K-NN, NB, LR, SVM, RF.
std::string_view display_name(ClassifierKind kind);
std::optional<ClassifierKind> parse_classifier_kind(std::string_view text);

struct KnnParams {
  std::size_t k = 5;
};

struct NbParams {
  double variance_floor = 1e-9;
};

struct SvmParams {
  double c = 1.0;              // hinge-loss weight; large C approaches the hard margin
  std::size_t max_epochs = 1000;
  double tolerance = 1e-3;     // projected-gradient gap
  double bias_feature = 1.0;   // constant appended to every row to learn b
};

struct LrParams {
  double step = 0.1;
  std::size_t max_iterations = 5000;
  double gradient_tolerance = 1e-6;
  double l2 = 1e-4;
  double threshold = 0.5;
};

struct TreeParams {
  std::size_t max_depth = 32;
  std::size_t min_samples_split = 2;
  std::size_t max_features = 0;  // features examined per split; 0 = all
};

struct RfParams {
  std::size_t trees = 100;
  bool bootstrap = true;
  std::size_t max_features = 0;  // 0 = ceil(sqrt(M))
  std::size_t max_depth = 32;
  std::size_t min_samples_split = 2;
  std::size_t jobs = 1;
};

struct ClassifierConfig {
  ClassifierKind kind = ClassifierKind::RandomForest;
  KnnParams knn;
  NbParams nb;
  SvmParams svm;
  LrParams lr;
  RfParams rf;
  std::uint64_t seed = 42;
};

nlohmann::json to_json(const ClassifierConfig& config);
ClassifierConfig classifier_config_from_json(const nlohmann::json& j);

/// Uniform fit/predict contract. fit never modifies its input; a fitted model
/// is immutable and predict may be called concurrently.
class Classifier {
 public:
  virtual ~Classifier() = default;

  virtual ClassifierKind kind() const = 0;
  /// Throws InputError on empty, single-class, ragged or non-finite data.
  virtual void fit(const LabeledMatrix& train) = 0;
  /// Throws InputError when the row width differs from the training width.
  virtual std::vector<Label> predict(const FeatureMatrix& rows) const = 0;
  /// Per-row P(Bug) for models that define one (LR: pi, NB: posterior).
  virtual std::optional<std::vector<double>> bug_probability(const FeatureMatrix&) const {
    return std::nullopt;
  }
  /// Feature width seen at fit time.
  virtual std::size_t width() const = 0;

  /// {"kind": ..., "hyper": {...}, "params": {...}}
  virtual nlohmann::json to_json() const = 0;
};

std::unique_ptr<Classifier> make_classifier(const ClassifierConfig& config);
std::unique_ptr<Classifier> classifier_from_json(const nlohmann::json& j);

namespace detail {
void check_training_data(const LabeledMatrix& train, std::string_view who);
void check_width(const FeatureMatrix& rows, std::size_t width, std::string_view who);
}  // namespace detail

}  // namespace bugtriage
