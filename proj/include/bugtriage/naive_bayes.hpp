#pragma once

#include <array>

#include "bugtriage/classifier.hpp"

namespace bugtriage {

/// Gaussian naive Bayes: argmax over classes of
///   log p(class) + sum_k log N(x_k; mean[class][k], var[class][k]).
/// Variances are the per-class population variances raised to at least the
/// floor. Equal posteriors predict Bug.
class GaussianNaiveBayes final : public Classifier {
 public:
  struct ClassModel {
    double prior = 0.0;
    std::vector<double> mean;
    std::vector<double> variance;
  };

  explicit GaussianNaiveBayes(NbParams params = {}) : params_(params) {}

  ClassifierKind kind() const override { return ClassifierKind::NaiveBayes; }
  void fit(const LabeledMatrix& train) override;
  std::vector<Label> predict(const FeatureMatrix& rows) const override;
  std::optional<std::vector<double>> bug_probability(const FeatureMatrix& rows) const override;
  std::size_t width() const override { return classes_[0].mean.size(); }
  nlohmann::json to_json() const override;
  static std::unique_ptr<GaussianNaiveBayes> from_json(const nlohmann::json& j);

  /// Normalized posteriors {P(NonBug|x), P(Bug|x)} per row.
  std::vector<std::array<double, 2>> posteriors(const FeatureMatrix& rows) const;

  /// Installs hand-set parameters, indexed by Label (NonBug = 0, Bug = 1).
  void set_parameters(ClassModel nonbug, ClassModel bug);
  const ClassModel& class_model(Label label) const { return classes_[static_cast<int>(label)]; }

 private:
  std::array<double, 2> log_joint(std::span<const double> x) const;

  NbParams params_;
  std::array<ClassModel, 2> classes_;
};

}  // namespace bugtriage
