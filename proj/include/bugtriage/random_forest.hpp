#pragma once

#include <cstdint>
#include <span>

#include "bugtriage/classifier.hpp"

namespace bugtriage {

/// Rank of every training value among the distinct values of its column.
/// Built once per training matrix and shared by the trees of a forest.
struct FeatureRanks {
  std::size_t rows = 0;
  std::vector<std::uint32_t> rank;          // [feature * rows + row]
  std::vector<std::vector<double>> values;  // per feature, distinct values ascending

  static FeatureRanks build(const FeatureMatrix& x);
};

/// CART tree on Gini impurity. At each node the features are visited in a
/// seeded random order; the best threshold (midpoint between consecutive
/// distinct values, x <= t goes left) over the first `max_features`
/// non-constant features is taken. A node becomes a leaf when pure, at
/// max_depth, below min_samples_split, or when no feature varies. Leaves
/// predict their majority label, Bug on ties.
class DecisionTree {
 public:
  struct Node {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    Label label = Label::NonBug;
  };

  DecisionTree(TreeParams params = {}, std::uint64_t seed = 42) : params_(params), seed_(seed) {}

  void fit(const LabeledMatrix& train);
  /// Grows the tree on the given training rows; repeats are allowed (bootstrap).
  void fit(const LabeledMatrix& train, std::span<const std::size_t> sample);
  /// Same, reusing ranks built from train.x.
  void fit(const LabeledMatrix& train, std::span<const std::size_t> sample, const FeatureRanks& ranks);

  Label predict_row(std::span<const double> x) const;
  std::vector<Label> predict(const FeatureMatrix& rows) const;

  const std::vector<Node>& nodes() const noexcept { return nodes_; }
  std::size_t width() const noexcept { return width_; }
  std::size_t depth() const;

  nlohmann::json to_json() const;
  static DecisionTree from_json(const nlohmann::json& j);

  friend bool operator==(const DecisionTree& a, const DecisionTree& b);

 private:
  TreeParams params_;
  std::uint64_t seed_;
  std::size_t width_ = 0;
  std::vector<Node> nodes_;
};

bool operator==(const DecisionTree::Node& a, const DecisionTree::Node& b);

/// Bagged decision trees with majority voting; ties predict Bug.
///
/// Tree i is a DecisionTree seeded with `seed + i`; its bootstrap sample (n
/// draws with replacement) comes from an independent stream derived from
/// (seed, i). Results do not depend on `jobs`.
class RandomForest final : public Classifier {
 public:
  explicit RandomForest(RfParams params = {}, std::uint64_t seed = 42) : params_(params), seed_(seed) {}

  ClassifierKind kind() const override { return ClassifierKind::RandomForest; }
  void fit(const LabeledMatrix& train) override;
  std::vector<Label> predict(const FeatureMatrix& rows) const override;
  std::optional<std::vector<double>> bug_probability(const FeatureMatrix& rows) const override;
  std::size_t width() const override { return width_; }
  nlohmann::json to_json() const override;
  static std::unique_ptr<RandomForest> from_json(const nlohmann::json& j);

  /// votes[row][tree]
  std::vector<std::vector<Label>> tree_votes(const FeatureMatrix& rows) const;
  const std::vector<DecisionTree>& trees() const noexcept { return trees_; }

 private:
  RfParams params_;
  std::uint64_t seed_;
  std::size_t width_ = 0;
  std::vector<DecisionTree> trees_;
};

}  // namespace bugtriage
