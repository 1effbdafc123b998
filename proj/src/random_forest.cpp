#include "bugtriage/random_forest.hpp"

#include <cmath>
#include <numeric>

#include "bugtriage/error.hpp"
#include "bugtriage/parallel.hpp"
#include "bugtriage/random.hpp"

namespace bugtriage {

using nlohmann::json;

void RandomForest::fit(const LabeledMatrix& train) {
  detail::check_training_data(train, "random forest");
  if (params_.trees == 0) throw InputError("random forest: need at least one tree");
  const std::size_t n = train.x.rows();
  width_ = train.x.cols();
  const std::size_t mtry =
      params_.max_features == 0
          ? static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(width_))))
          : std::min(params_.max_features, width_);
  const TreeParams tree_params{params_.max_depth, params_.min_samples_split, mtry};

  const FeatureRanks ranks = FeatureRanks::build(train.x);
  trees_.assign(params_.trees, DecisionTree());
  parallel_for(params_.trees, params_.jobs, [&](std::size_t t) {
    std::vector<std::size_t> sample(n);
    if (params_.bootstrap) {
      Rng rng(derive_seed(seed_, t));
      for (auto& s : sample) s = rng.below(n);
    } else {
      std::iota(sample.begin(), sample.end(), 0);
    }
    DecisionTree tree(tree_params, seed_ + t);
    tree.fit(train, sample, ranks);
    trees_[t] = std::move(tree);
  });
}

std::vector<std::vector<Label>> RandomForest::tree_votes(const FeatureMatrix& rows) const {
  detail::check_width(rows, width_, "random forest");
  std::vector<std::vector<Label>> votes(rows.rows());
  for (std::size_t r = 0; r < rows.rows(); ++r) {
    votes[r].reserve(trees_.size());
    for (const auto& tree : trees_) votes[r].push_back(tree.predict_row(rows.row(r)));
  }
  return votes;
}

std::vector<Label> RandomForest::predict(const FeatureMatrix& rows) const {
  std::vector<Label> out;
  for (const auto& v : tree_votes(rows)) {
    std::size_t bug = 0;
    for (Label l : v) bug += l == Label::Bug ? 1 : 0;
    out.push_back(2 * bug >= v.size() ? Label::Bug : Label::NonBug);
  }
  return out;
}

std::optional<std::vector<double>> RandomForest::bug_probability(const FeatureMatrix& rows) const {
  std::vector<double> out;
  for (const auto& v : tree_votes(rows)) {
    std::size_t bug = 0;
    for (Label l : v) bug += l == Label::Bug ? 1 : 0;
    out.push_back(static_cast<double>(bug) / static_cast<double>(v.size()));
  }
  return out;
}

json RandomForest::to_json() const {
  json trees = json::array();
  for (const auto& t : trees_) trees.push_back(t.to_json());
  return json{{"kind", "rf"},
              {"hyper",
               {{"trees", params_.trees},
                {"bootstrap", params_.bootstrap},
                {"max_features", params_.max_features},
                {"max_depth", params_.max_depth},
                {"min_samples_split", params_.min_samples_split},
                {"seed", seed_}}},
              {"params", {{"width", width_}, {"trees", trees}}}};
}

std::unique_ptr<RandomForest> RandomForest::from_json(const json& j) {
  const auto& h = j.at("hyper");
  RfParams p;
  p.trees = h.at("trees").get<std::size_t>();
  p.bootstrap = h.at("bootstrap").get<bool>();
  p.max_features = h.at("max_features").get<std::size_t>();
  p.max_depth = h.at("max_depth").get<std::size_t>();
  p.min_samples_split = h.at("min_samples_split").get<std::size_t>();
  auto model = std::make_unique<RandomForest>(p, h.at("seed").get<std::uint64_t>());
  model->width_ = j.at("params").at("width").get<std::size_t>();
  for (const auto& t : j.at("params").at("trees")) model->trees_.push_back(DecisionTree::from_json(t));
  if (model->trees_.empty()) throw InputError("random forest: model has no trees");
  return model;
}

}  // namespace bugtriage
