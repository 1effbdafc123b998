#include "bugtriage/logistic_regression.hpp"

#include <cmath>

#include "bugtriage/error.hpp"

namespace bugtriage {

using nlohmann::json;

namespace {

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + e^z) without overflow
double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

double linear(std::span<const double> coeffs, std::span<const double> x) {
  // four partial sums so the loop vectorizes without -ffast-math
  const double* w = coeffs.data() + 1;
  double acc[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t c = 0;
  for (; c + 4 <= x.size(); c += 4) {
    for (std::size_t k = 0; k < 4; ++k) acc[k] += w[c + k] * x[c + k];
  }
  for (; c < x.size(); ++c) acc[0] += w[c] * x[c];
  return coeffs[0] + ((acc[0] + acc[1]) + (acc[2] + acc[3]));
}

void check_coeffs(std::span<const double> coeffs, const LabeledMatrix& batch) {
  if (coeffs.size() != batch.x.cols() + 1) throw InputError("logistic regression: coefficient count mismatch");
  if (batch.x.rows() != batch.y.size()) throw InputError("logistic regression: row/label count mismatch");
}

}  // namespace

double lr_loss(std::span<const double> coeffs, const LabeledMatrix& batch, double l2) {
  check_coeffs(coeffs, batch);
  double loss = 0.0;
  const std::size_t n = batch.x.rows();
  for (std::size_t r = 0; r < n; ++r) {
    const double z = linear(coeffs, batch.x.row(r));
    loss += softplus(z) - (batch.y[r] == Label::Bug ? z : 0.0);
  }
  if (n > 0) loss /= static_cast<double>(n);
  double penalty = 0.0;
  for (std::size_t c = 1; c < coeffs.size(); ++c) penalty += coeffs[c] * coeffs[c];
  return loss + 0.5 * l2 * penalty;
}

namespace {

// Gradient into `grad`, with `residual` as scratch. Rows are taken four at a
// time so each coefficient load serves four dot products and each gradient
// store absorbs four rows.
void gradient_into(std::span<const double> coeffs, const LabeledMatrix& batch, double l2,
                   std::vector<double>& grad, std::vector<double>& residual) {
  const std::size_t n = batch.x.rows(), d = batch.x.cols();
  const double* w = coeffs.data() + 1;
  const double* x = batch.x.data().data();
  residual.resize(n);
  std::size_t r = 0;
  for (; r + 4 <= n; r += 4) {
    const double *x0 = x + r * d, *x1 = x0 + d, *x2 = x1 + d, *x3 = x2 + d;
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    for (std::size_t c = 0; c < d; ++c) {
      s0 += w[c] * x0[c];
      s1 += w[c] * x1[c];
      s2 += w[c] * x2[c];
      s3 += w[c] * x3[c];
    }
    const double s[4] = {s0, s1, s2, s3};
    for (std::size_t k = 0; k < 4; ++k) {
      residual[r + k] = sigmoid(coeffs[0] + s[k]) - (batch.y[r + k] == Label::Bug ? 1.0 : 0.0);
    }
  }
  for (; r < n; ++r) {
    residual[r] = sigmoid(linear(coeffs, batch.x.row(r))) - (batch.y[r] == Label::Bug ? 1.0 : 0.0);
  }

  grad.assign(coeffs.size(), 0.0);
  double* g = grad.data() + 1;
  for (r = 0; r + 4 <= n; r += 4) {
    const double *x0 = x + r * d, *x1 = x0 + d, *x2 = x1 + d, *x3 = x2 + d;
    const double a = residual[r], b = residual[r + 1], c2 = residual[r + 2], e = residual[r + 3];
    grad[0] += (a + b) + (c2 + e);
    for (std::size_t c = 0; c < d; ++c) g[c] += (a * x0[c] + b * x1[c]) + (c2 * x2[c] + e * x3[c]);
  }
  for (; r < n; ++r) {
    const double* xr = x + r * d;
    grad[0] += residual[r];
    for (std::size_t c = 0; c < d; ++c) g[c] += residual[r] * xr[c];
  }
  if (n > 0) {
    for (double& v : grad) v /= static_cast<double>(n);
  }
  for (std::size_t c = 1; c < coeffs.size(); ++c) grad[c] += l2 * coeffs[c];
}

}  // namespace

std::vector<double> lr_gradient(std::span<const double> coeffs, const LabeledMatrix& batch,
                                double l2) {
  check_coeffs(coeffs, batch);
  std::vector<double> grad, residual;
  gradient_into(coeffs, batch, l2, grad, residual);
  return grad;
}

void LogisticRegression::fit(const LabeledMatrix& train) {
  detail::check_training_data(train, "logistic regression");
  if (!(params_.threshold > 0.0 && params_.threshold < 1.0)) {
    throw InputError("logistic regression: threshold must lie in (0, 1)");
  }
  coeffs_.assign(train.x.cols() + 1, 0.0);
  iterations_ = 0;
  std::vector<double> grad, residual;
  while (iterations_ < params_.max_iterations) {
    gradient_into(coeffs_, train, params_.l2, grad, residual);
    double norm2 = 0.0;
    for (double g : grad) norm2 += g * g;
    if (std::sqrt(norm2) < params_.gradient_tolerance) break;
    for (std::size_t c = 0; c < coeffs_.size(); ++c) coeffs_[c] -= params_.step * grad[c];
    ++iterations_;
  }
}

double LogisticRegression::probability(std::span<const double> x) const {
  return sigmoid(linear(coeffs_, x));
}

std::vector<Label> LogisticRegression::predict(const FeatureMatrix& rows) const {
  detail::check_width(rows, width(), "logistic regression");
  std::vector<Label> out;
  out.reserve(rows.rows());
  for (std::size_t r = 0; r < rows.rows(); ++r) {
    out.push_back(probability(rows.row(r)) >= params_.threshold ? Label::Bug : Label::NonBug);
  }
  return out;
}

std::optional<std::vector<double>> LogisticRegression::bug_probability(const FeatureMatrix& rows) const {
  detail::check_width(rows, width(), "logistic regression");
  std::vector<double> out;
  for (std::size_t r = 0; r < rows.rows(); ++r) out.push_back(probability(rows.row(r)));
  return out;
}

json LogisticRegression::to_json() const {
  return json{{"kind", "lr"},
              {"hyper",
               {{"step", params_.step},
                {"max_iterations", params_.max_iterations},
                {"gradient_tolerance", params_.gradient_tolerance},
                {"l2", params_.l2},
                {"threshold", params_.threshold}}},
              {"params", {{"coefficients", coeffs_}}}};
}

std::unique_ptr<LogisticRegression> LogisticRegression::from_json(const json& j) {
  const auto& h = j.at("hyper");
  LrParams p;
  p.step = h.at("step").get<double>();
  p.max_iterations = h.at("max_iterations").get<std::size_t>();
  p.gradient_tolerance = h.at("gradient_tolerance").get<double>();
  p.l2 = h.at("l2").get<double>();
  p.threshold = h.at("threshold").get<double>();
  auto model = std::make_unique<LogisticRegression>(p);
  model->coeffs_ = j.at("params").at("coefficients").get<std::vector<double>>();
  return model;
}

}  // namespace bugtriage
