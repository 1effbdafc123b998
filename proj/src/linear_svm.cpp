#include "bugtriage/linear_svm.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "bugtriage/error.hpp"
#include "bugtriage/random.hpp"

namespace bugtriage {

using nlohmann::json;

void LinearSvm::fit(const LabeledMatrix& train) {
  detail::check_training_data(train, "svm");
  if (!(params_.c > 0.0)) throw InputError("svm: C must be positive");
  const std::size_t n = train.x.rows();
  const std::size_t d = train.x.cols();
  const double bias_x = params_.bias_feature;

  std::vector<double> w(d, 0.0);
  double wb = 0.0;  // weight of the constant bias feature
  std::vector<double> alpha(n, 0.0);
  std::vector<double> diag(n, 0.0);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = train.y[i] == Label::Bug ? 1.0 : -1.0;
    auto x = train.x.row(i);
    diag[i] = std::inner_product(x.begin(), x.end(), x.begin(), bias_x * bias_x);
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed_);
  epochs_ = 0;
  while (epochs_ < params_.max_epochs) {
    rng.shuffle(std::span<std::size_t>(order));
    double pg_max = -std::numeric_limits<double>::infinity();
    double pg_min = std::numeric_limits<double>::infinity();
    for (std::size_t i : order) {
      if (diag[i] <= 0.0) continue;
      auto x = train.x.row(i);
      const double margin = std::inner_product(x.begin(), x.end(), w.begin(), wb * bias_x);
      const double g = y[i] * margin - 1.0;
      double pg = g;
      if (alpha[i] <= 0.0) {
        pg = std::min(g, 0.0);
      } else if (alpha[i] >= params_.c) {
        pg = std::max(g, 0.0);
      }
      pg_max = std::max(pg_max, pg);
      pg_min = std::min(pg_min, pg);
      if (pg != 0.0) {
        const double old = alpha[i];
        alpha[i] = std::clamp(old - g / diag[i], 0.0, params_.c);
        const double step = (alpha[i] - old) * y[i];
        for (std::size_t c = 0; c < d; ++c) w[c] += step * x[c];
        wb += step * bias_x;
      }
    }
    ++epochs_;
    if (pg_max - pg_min < params_.tolerance) break;
  }
  weights_ = std::move(w);
  bias_ = wb * bias_x;
}

double LinearSvm::decision(std::span<const double> x) const {
  return std::inner_product(x.begin(), x.end(), weights_.begin(), bias_);
}

std::vector<Label> LinearSvm::predict(const FeatureMatrix& rows) const {
  detail::check_width(rows, width(), "svm");
  std::vector<Label> out;
  out.reserve(rows.rows());
  for (std::size_t r = 0; r < rows.rows(); ++r) {
    out.push_back(decision(rows.row(r)) >= 0.0 ? Label::Bug : Label::NonBug);
  }
  return out;
}

json LinearSvm::to_json() const {
  return json{{"kind", "svm"},
              {"hyper",
               {{"c", params_.c},
                {"max_epochs", params_.max_epochs},
                {"tolerance", params_.tolerance},
                {"bias_feature", params_.bias_feature},
                {"seed", seed_}}},
              {"params", {{"weights", weights_}, {"bias", bias_}}}};
}

std::unique_ptr<LinearSvm> LinearSvm::from_json(const json& j) {
  const auto& h = j.at("hyper");
  SvmParams p;
  p.c = h.at("c").get<double>();
  p.max_epochs = h.at("max_epochs").get<std::size_t>();
  p.tolerance = h.at("tolerance").get<double>();
  p.bias_feature = h.at("bias_feature").get<double>();
  auto model = std::make_unique<LinearSvm>(p, h.at("seed").get<std::uint64_t>());
  model->weights_ = j.at("params").at("weights").get<std::vector<double>>();
  model->bias_ = j.at("params").at("bias").get<double>();
  return model;
}

}  // namespace bugtriage
