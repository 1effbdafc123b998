#include "bugtriage/knn.hpp"

#include <algorithm>

#include "bugtriage/error.hpp"

namespace bugtriage {

using nlohmann::json;

Label knn_vote(std::span<const Label> by_distance) {
  if (by_distance.empty()) throw InputError("knn_vote: no neighbors");
  std::size_t bug = 0;
  for (Label l : by_distance) bug += l == Label::Bug ? 1 : 0;
  const std::size_t nonbug = by_distance.size() - bug;
  if (bug != nonbug) return bug > nonbug ? Label::Bug : Label::NonBug;
  return by_distance.front();
}

void KnnClassifier::fit(const LabeledMatrix& train) {
  detail::check_training_data(train, "knn");
  if (params_.k == 0) throw InputError("knn: k must be at least 1");
  if (params_.k > train.x.rows()) {
    throw InputError("knn: k=" + std::to_string(params_.k) + " exceeds training size " +
                     std::to_string(train.x.rows()));
  }
  train_ = train;
}

std::vector<Neighbor> KnnClassifier::neighbors(std::span<const double> query) const {
  const std::size_t n = train_.x.rows();
  std::vector<Neighbor> all(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto row = train_.x.row(i);
    double d2 = 0.0;
    for (std::size_t c = 0; c < row.size(); ++c) {
      const double diff = row[c] - query[c];
      d2 += diff * diff;
    }
    all[i] = {i, d2, train_.y[i]};
  }
  const std::size_t k = std::min(params_.k, n);
  auto closer = [](const Neighbor& a, const Neighbor& b) {
    return a.distance2 < b.distance2 || (a.distance2 == b.distance2 && a.index < b.index);
  };
  std::partial_sort(all.begin(), all.begin() + k, all.end(), closer);
  all.resize(k);
  return all;
}

std::vector<Label> KnnClassifier::predict(const FeatureMatrix& rows) const {
  detail::check_width(rows, width(), "knn");
  std::vector<Label> out;
  out.reserve(rows.rows());
  std::vector<Label> labels;
  for (std::size_t r = 0; r < rows.rows(); ++r) {
    labels.clear();
    for (const auto& nb : neighbors(rows.row(r))) labels.push_back(nb.label);
    out.push_back(knn_vote(labels));
  }
  return out;
}

json KnnClassifier::to_json() const {
  json rows = json::array();
  for (std::size_t r = 0; r < train_.x.rows(); ++r) {
    auto row = train_.x.row(r);
    rows.push_back(std::vector<double>(row.begin(), row.end()));
  }
  std::vector<int> labels;
  for (Label l : train_.y) labels.push_back(static_cast<int>(l));
  return json{{"kind", "knn"},
              {"hyper", {{"k", params_.k}}},
              {"params", {{"rows", rows}, {"labels", labels}}}};
}

std::unique_ptr<KnnClassifier> KnnClassifier::from_json(const json& j) {
  KnnParams p;
  p.k = j.at("hyper").at("k").get<std::size_t>();
  auto model = std::make_unique<KnnClassifier>(p);
  model->train_.x = FeatureMatrix::from_rows(
      j.at("params").at("rows").get<std::vector<std::vector<double>>>());
  for (int l : j.at("params").at("labels").get<std::vector<int>>()) {
    model->train_.y.push_back(l ? Label::Bug : Label::NonBug);
  }
  return model;
}

}  // namespace bugtriage
