#include "bugtriage/classifier.hpp"

#include <cmath>

#include "bugtriage/error.hpp"
#include "bugtriage/knn.hpp"
#include "bugtriage/linear_svm.hpp"
#include "bugtriage/logistic_regression.hpp"
#include "bugtriage/naive_bayes.hpp"
#include "bugtriage/random_forest.hpp"

namespace bugtriage {

using nlohmann::json;

std::string_view to_string(ClassifierKind kind) {
  switch (kind) {
    case ClassifierKind::Knn: return "knn";
    case ClassifierKind::NaiveBayes: return "nb";
    case ClassifierKind::LogisticRegression: return "lr";
    case ClassifierKind::Svm: return "svm";
    case ClassifierKind::RandomForest: return "rf";
  }
  return "?";
}

std::string_view display_name(ClassifierKind kind) {
  switch (kind) {
    case ClassifierKind::Knn: return "K-NN";
    case ClassifierKind::NaiveBayes: return "NB";
    case ClassifierKind::LogisticRegression: return "LR";
    case ClassifierKind::Svm: return "SVM";
    case ClassifierKind::RandomForest: return "RF";
  }
  return "?";
}

std::optional<ClassifierKind> parse_classifier_kind(std::string_view text) {
  std::string key;
  for (char c : text) {
    if (c == '-') continue;
    key.push_back(static_cast<char>(c >= 'A' && c <= 'Z' ? c - 'A' + 'a' : c));
  }
  for (ClassifierKind k : kAllClassifiers) {
    if (key == to_string(k)) return k;
  }
  return std::nullopt;
}

json to_json(const ClassifierConfig& c) {
  return json{
      {"kind", to_string(c.kind)},
      {"seed", c.seed},
      {"knn", {{"k", c.knn.k}}},
      {"nb", {{"variance_floor", c.nb.variance_floor}}},
      {"svm",
       {{"c", c.svm.c},
        {"max_epochs", c.svm.max_epochs},
        {"tolerance", c.svm.tolerance},
        {"bias_feature", c.svm.bias_feature}}},
      {"lr",
       {{"step", c.lr.step},
        {"max_iterations", c.lr.max_iterations},
        {"gradient_tolerance", c.lr.gradient_tolerance},
        {"l2", c.lr.l2},
        {"threshold", c.lr.threshold}}},
      {"rf",
       {{"trees", c.rf.trees},
        {"bootstrap", c.rf.bootstrap},
        {"max_features", c.rf.max_features},
        {"max_depth", c.rf.max_depth},
        {"min_samples_split", c.rf.min_samples_split}}},
  };
}

ClassifierConfig classifier_config_from_json(const json& j) {
  ClassifierConfig c;
  auto kind = parse_classifier_kind(j.at("kind").get<std::string>());
  if (!kind) throw InputError("unknown classifier kind in config");
  c.kind = *kind;
  c.seed = j.value("seed", c.seed);
  if (j.contains("knn")) c.knn.k = j["knn"].value("k", c.knn.k);
  if (j.contains("nb")) c.nb.variance_floor = j["nb"].value("variance_floor", c.nb.variance_floor);
  if (j.contains("svm")) {
    const auto& s = j["svm"];
    c.svm.c = s.value("c", c.svm.c);
    c.svm.max_epochs = s.value("max_epochs", c.svm.max_epochs);
    c.svm.tolerance = s.value("tolerance", c.svm.tolerance);
    c.svm.bias_feature = s.value("bias_feature", c.svm.bias_feature);
  }
  if (j.contains("lr")) {
    const auto& s = j["lr"];
    c.lr.step = s.value("step", c.lr.step);
    c.lr.max_iterations = s.value("max_iterations", c.lr.max_iterations);
    c.lr.gradient_tolerance = s.value("gradient_tolerance", c.lr.gradient_tolerance);
    c.lr.l2 = s.value("l2", c.lr.l2);
    c.lr.threshold = s.value("threshold", c.lr.threshold);
  }
  if (j.contains("rf")) {
    const auto& s = j["rf"];
    c.rf.trees = s.value("trees", c.rf.trees);
    c.rf.bootstrap = s.value("bootstrap", c.rf.bootstrap);
    c.rf.max_features = s.value("max_features", c.rf.max_features);
    c.rf.max_depth = s.value("max_depth", c.rf.max_depth);
    c.rf.min_samples_split = s.value("min_samples_split", c.rf.min_samples_split);
  }
  return c;
}

std::unique_ptr<Classifier> make_classifier(const ClassifierConfig& config) {
  switch (config.kind) {
    case ClassifierKind::Knn:
      return std::make_unique<KnnClassifier>(config.knn);
    case ClassifierKind::NaiveBayes:
      return std::make_unique<GaussianNaiveBayes>(config.nb);
    case ClassifierKind::LogisticRegression:
      return std::make_unique<LogisticRegression>(config.lr);
    case ClassifierKind::Svm:
      return std::make_unique<LinearSvm>(config.svm, config.seed);
    case ClassifierKind::RandomForest:
      return std::make_unique<RandomForest>(config.rf, config.seed);
  }
  throw InputError("unknown classifier kind");
}

std::unique_ptr<Classifier> classifier_from_json(const json& j) {
  auto kind = parse_classifier_kind(j.at("kind").get<std::string>());
  if (!kind) throw InputError("model file names an unknown classifier");
  switch (*kind) {
    case ClassifierKind::Knn: return KnnClassifier::from_json(j);
    case ClassifierKind::NaiveBayes: return GaussianNaiveBayes::from_json(j);
    case ClassifierKind::LogisticRegression: return LogisticRegression::from_json(j);
    case ClassifierKind::Svm: return LinearSvm::from_json(j);
    case ClassifierKind::RandomForest: return RandomForest::from_json(j);
  }
  throw InputError("unknown classifier kind");
}

namespace detail {

void check_training_data(const LabeledMatrix& train, std::string_view who) {
  const std::string w(who);
  if (train.x.rows() != train.y.size()) throw InputError(w + ": row/label count mismatch");
  if (train.x.rows() == 0) throw InputError(w + ": empty training data");
  bool has_bug = false, has_nonbug = false;
  for (Label l : train.y) (l == Label::Bug ? has_bug : has_nonbug) = true;
  if (!(has_bug && has_nonbug)) throw InputError(w + ": single-class training data");
  for (double v : train.x.data()) {
    if (!std::isfinite(v)) throw InputError(w + ": non-finite feature value");
  }
}

void check_width(const FeatureMatrix& rows, std::size_t width, std::string_view who) {
  if (rows.rows() > 0 && rows.cols() != width) {
    throw InputError(std::string(who) + ": expected " + std::to_string(width) +
                     " features, got " + std::to_string(rows.cols()));
  }
}

}  // namespace detail

}  // namespace bugtriage
