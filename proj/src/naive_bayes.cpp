#include "bugtriage/naive_bayes.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "bugtriage/error.hpp"

namespace bugtriage {

using nlohmann::json;

void GaussianNaiveBayes::fit(const LabeledMatrix& train) {
  detail::check_training_data(train, "naive bayes");
  const std::size_t d = train.x.cols();
  std::array<std::size_t, 2> counts{};
  for (auto& cm : classes_) {
    cm.mean.assign(d, 0.0);
    cm.variance.assign(d, 0.0);
  }
  for (std::size_t r = 0; r < train.x.rows(); ++r) {
    auto& cm = classes_[static_cast<int>(train.y[r])];
    ++counts[static_cast<int>(train.y[r])];
    auto row = train.x.row(r);
    for (std::size_t c = 0; c < d; ++c) cm.mean[c] += row[c];
  }
  for (int k = 0; k < 2; ++k) {
    for (double& m : classes_[k].mean) m /= static_cast<double>(counts[k]);
  }
  for (std::size_t r = 0; r < train.x.rows(); ++r) {
    auto& cm = classes_[static_cast<int>(train.y[r])];
    auto row = train.x.row(r);
    for (std::size_t c = 0; c < d; ++c) {
      const double diff = row[c] - cm.mean[c];
      cm.variance[c] += diff * diff;
    }
  }
  const double n = static_cast<double>(train.x.rows());
  for (int k = 0; k < 2; ++k) {
    classes_[k].prior = static_cast<double>(counts[k]) / n;
    for (double& v : classes_[k].variance) {
      v = std::max(v / static_cast<double>(counts[k]), params_.variance_floor);
    }
  }
}

void GaussianNaiveBayes::set_parameters(ClassModel nonbug, ClassModel bug) {
  if (nonbug.mean.size() != bug.mean.size() || nonbug.variance.size() != nonbug.mean.size() ||
      bug.variance.size() != bug.mean.size()) {
    throw InputError("naive bayes: parameter widths differ");
  }
  classes_ = {std::move(nonbug), std::move(bug)};
}

std::array<double, 2> GaussianNaiveBayes::log_joint(std::span<const double> x) const {
  std::array<double, 2> out{};
  for (int k = 0; k < 2; ++k) {
    const auto& cm = classes_[k];
    double s = std::log(cm.prior);
    for (std::size_t c = 0; c < x.size(); ++c) {
      const double diff = x[c] - cm.mean[c];
      s += -0.5 * std::log(2.0 * std::numbers::pi * cm.variance[c]) -
           diff * diff / (2.0 * cm.variance[c]);
    }
    out[k] = s;
  }
  return out;
}

std::vector<std::array<double, 2>> GaussianNaiveBayes::posteriors(const FeatureMatrix& rows) const {
  detail::check_width(rows, width(), "naive bayes");
  std::vector<std::array<double, 2>> out;
  out.reserve(rows.rows());
  for (std::size_t r = 0; r < rows.rows(); ++r) {
    const auto lj = log_joint(rows.row(r));
    const double top = std::max(lj[0], lj[1]);
    const double e0 = std::exp(lj[0] - top);
    const double e1 = std::exp(lj[1] - top);
    out.push_back({e0 / (e0 + e1), e1 / (e0 + e1)});
  }
  return out;
}

std::vector<Label> GaussianNaiveBayes::predict(const FeatureMatrix& rows) const {
  detail::check_width(rows, width(), "naive bayes");
  std::vector<Label> out;
  out.reserve(rows.rows());
  for (std::size_t r = 0; r < rows.rows(); ++r) {
    const auto lj = log_joint(rows.row(r));
    out.push_back(lj[1] >= lj[0] ? Label::Bug : Label::NonBug);
  }
  return out;
}

std::optional<std::vector<double>> GaussianNaiveBayes::bug_probability(
    const FeatureMatrix& rows) const {
  std::vector<double> p;
  for (const auto& post : posteriors(rows)) p.push_back(post[1]);
  return p;
}

json GaussianNaiveBayes::to_json() const {
  json classes = json::array();
  for (const auto& cm : classes_) {
    classes.push_back({{"prior", cm.prior}, {"mean", cm.mean}, {"variance", cm.variance}});
  }
  return json{{"kind", "nb"},
              {"hyper", {{"variance_floor", params_.variance_floor}}},
              {"params", {{"classes", classes}}}};
}

std::unique_ptr<GaussianNaiveBayes> GaussianNaiveBayes::from_json(const json& j) {
  NbParams p;
  p.variance_floor = j.at("hyper").at("variance_floor").get<double>();
  auto model = std::make_unique<GaussianNaiveBayes>(p);
  const auto& classes = j.at("params").at("classes");
  std::array<ClassModel, 2> cms;
  for (int k = 0; k < 2; ++k) {
    cms[k].prior = classes.at(k).at("prior").get<double>();
    cms[k].mean = classes.at(k).at("mean").get<std::vector<double>>();
    cms[k].variance = classes.at(k).at("variance").get<std::vector<double>>();
  }
  model->set_parameters(std::move(cms[0]), std::move(cms[1]));
  return model;
}

}  // namespace bugtriage
