#pragma once

#include <span>

#include "bugtriage/classifier.hpp"

namespace bugtriage {

/// Mean negative log-likelihood plus (l2 / 2) * |w|^2, where coeffs[0] is the
/// intercept (not penalized) and coeffs[1..] the feature weights. An empty
/// batch contributes nothing but the penalty.
double lr_loss(std::span<const double> coeffs, const LabeledMatrix& batch, double l2);
/// Analytic gradient of lr_loss.
std::vector<double> lr_gradient(std::span<const double> coeffs, const LabeledMatrix& batch,
                                double l2);

/// pi(x) = e^(Y0 + Y.x) / (1 + e^(Y0 + Y.x)); Bug when pi >= threshold.
/// Trained by full-batch gradient descent on lr_loss.
class LogisticRegression final : public Classifier {
 public:
  explicit LogisticRegression(LrParams params = {}) : params_(params) {}

  ClassifierKind kind() const override { return ClassifierKind::LogisticRegression; }
  void fit(const LabeledMatrix& train) override;
  std::vector<Label> predict(const FeatureMatrix& rows) const override;
  std::optional<std::vector<double>> bug_probability(const FeatureMatrix& rows) const override;
  std::size_t width() const override { return coeffs_.empty() ? 0 : coeffs_.size() - 1; }
  nlohmann::json to_json() const override;
  static std::unique_ptr<LogisticRegression> from_json(const nlohmann::json& j);

  double probability(std::span<const double> x) const;
  const std::vector<double>& coefficients() const noexcept { return coeffs_; }
  void set_coefficients(std::vector<double> coeffs) { coeffs_ = std::move(coeffs); }
  std::size_t iterations() const noexcept { return iterations_; }

 private:
  LrParams params_;
  std::vector<double> coeffs_;
  std::size_t iterations_ = 0;
};

}  // namespace bugtriage
