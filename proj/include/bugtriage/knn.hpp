#pragma once

#include <span>

#include "bugtriage/classifier.hpp"

namespace bugtriage {

struct Neighbor {
  std::size_t index;  // training row
  double distance2;   // squared Euclidean distance
  Label label;
};

/// Majority label; on a tie the label of the nearest neighbor wins.
/// `by_distance` must be ordered nearest first. Throws InputError when empty.
Label knn_vote(std::span<const Label> by_distance);

/// k-nearest-neighbor classifier with Euclidean distance. Equal distances are
/// ordered by training row index.
class KnnClassifier final : public Classifier {
 public:
  explicit KnnClassifier(KnnParams params = {}) : params_(params) {}

  ClassifierKind kind() const override { return ClassifierKind::Knn; }
  void fit(const LabeledMatrix& train) override;
  std::vector<Label> predict(const FeatureMatrix& rows) const override;
  std::size_t width() const override { return train_.x.cols(); }
  nlohmann::json to_json() const override;
  static std::unique_ptr<KnnClassifier> from_json(const nlohmann::json& j);

  /// The k nearest training rows, nearest first.
  std::vector<Neighbor> neighbors(std::span<const double> query) const;
  const LabeledMatrix& training_data() const noexcept { return train_; }

 private:
  KnnParams params_;
  LabeledMatrix train_;
};

}  // namespace bugtriage
