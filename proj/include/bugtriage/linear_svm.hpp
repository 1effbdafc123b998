#pragma once

#include <span>

#include "bugtriage/classifier.hpp"

namespace bugtriage {

/// Linear soft-margin SVM, f(x) = sgn(w.x + b) with sgn(0) = Bug.
///
/// Minimizes |w|^2 / 2 + C * sum_i max(0, 1 - y_i (w.x_i + b)) with the
/// dual coordinate descent method: each epoch visits the training rows in a
/// seeded random order and updates one multiplier alpha_i in [0, C] at a
/// time; w = sum_i alpha_i y_i x_i. The bias is learned as the weight of a
/// constant extra feature. Training stops once the projected-gradient gap
/// falls below the tolerance or max_epochs is reached.
class LinearSvm final : public Classifier {
 public:
  explicit LinearSvm(SvmParams params = {}, std::uint64_t seed = 42) : params_(params), seed_(seed) {}

  ClassifierKind kind() const override { return ClassifierKind::Svm; }
  void fit(const LabeledMatrix& train) override;
  std::vector<Label> predict(const FeatureMatrix& rows) const override;
  std::size_t width() const override { return weights_.size(); }
  nlohmann::json to_json() const override;
  static std::unique_ptr<LinearSvm> from_json(const nlohmann::json& j);

  /// w.x + b
  double decision(std::span<const double> x) const;
  const std::vector<double>& weights() const noexcept { return weights_; }
  double bias() const noexcept { return bias_; }
  std::size_t epochs() const noexcept { return epochs_; }

 private:
  SvmParams params_;
  std::uint64_t seed_;
  std::vector<double> weights_;
  double bias_ = 0.0;
  std::size_t epochs_ = 0;
};

}  // namespace bugtriage
