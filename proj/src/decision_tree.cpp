#include <algorithm>
#include <numeric>

#include "bugtriage/error.hpp"
#include "bugtriage/random.hpp"
#include "bugtriage/random_forest.hpp"

namespace bugtriage {

using nlohmann::json;

namespace {

struct Split {
  int feature = -1;
  double threshold = 0.0;
  double impurity = 0.0;  // weighted Gini times node size
};

// n * Gini for a node with `bug` positives out of `n`.
double scaled_gini(double bug, double n) {
  if (n <= 0.0) return 0.0;
  const double nonbug = n - bug;
  return n - (bug * bug + nonbug * nonbug) / n;
}

class TreeBuilder {
 public:
  TreeBuilder(const LabeledMatrix& train, const FeatureRanks& ranks, const TreeParams& params,
              std::uint64_t seed, std::vector<DecisionTree::Node>& nodes)
      : train_(train), ranks_(ranks), params_(params), rng_(seed), nodes_(nodes) {
    order_.resize(train.x.cols());
    std::size_t widest = 0;
    for (const auto& v : ranks.values) widest = std::max(widest, v.size());
    count_.assign(widest, 0);
    bug_count_.assign(widest, 0);
  }

  int build(std::vector<std::size_t> idx, std::size_t depth) {
    std::size_t bug = 0;
    for (std::size_t i : idx) bug += train_.y[i] == Label::Bug ? 1 : 0;
    const std::size_t n = idx.size();

    const int self = static_cast<int>(nodes_.size());
    nodes_.push_back({});
    nodes_[self].label = 2 * bug >= n ? Label::Bug : Label::NonBug;
    if (bug == 0 || bug == n || depth >= params_.max_depth || n < params_.min_samples_split) {
      return self;
    }

    const Split split = best_split(idx, bug);
    if (split.feature < 0) return self;

    std::vector<std::size_t> left, right;
    for (std::size_t i : idx) {
      (train_.x(i, split.feature) <= split.threshold ? left : right).push_back(i);
    }
    idx.clear();
    idx.shrink_to_fit();
    nodes_[self].feature = split.feature;
    nodes_[self].threshold = split.threshold;
    const int l = build(std::move(left), depth + 1);
    const int r = build(std::move(right), depth + 1);
    nodes_[self].left = l;
    nodes_[self].right = r;
    return self;
  }

 private:
  // Offers the boundary after rank `a` (next present rank `b`) with `left_n`
  // rows and `left_bug` bugs on the left.
  void offer(Split& best, bool& found, std::size_t f, std::uint32_t a, std::uint32_t b, double left_n,
             double left_bug, double n, double bug_total) const {
    const double total = scaled_gini(left_bug, left_n) + scaled_gini(bug_total - left_bug, n - left_n);
    if (found && !(total < best.impurity)) return;
    found = true;
    best.feature = static_cast<int>(f);
    best.impurity = total;
    const double lo = ranks_.values[f][a], hi = ranks_.values[f][b];
    double mid = lo + (hi - lo) / 2.0;
    if (!(mid < hi)) mid = lo;
    best.threshold = mid;
  }

  Split best_split(const std::vector<std::size_t>& idx, std::size_t bug_total) {
    const std::size_t d = train_.x.cols();
    std::iota(order_.begin(), order_.end(), 0);
    rng_.shuffle(std::span<std::size_t>(order_));
    const std::size_t budget = params_.max_features == 0 ? d : std::min(params_.max_features, d);

    const double n = static_cast<double>(idx.size());
    const double bugs = static_cast<double>(bug_total);
    Split best;
    best.impurity = scaled_gini(bugs, n);
    bool found = false;
    std::size_t evaluated = 0;
    for (std::size_t f : order_) {
      if (evaluated == budget) break;
      const std::uint32_t* rank = ranks_.rank.data() + f * ranks_.rows;
      std::uint32_t lo = rank[idx[0]], hi = lo;
      for (std::size_t i : idx) {
        lo = std::min(lo, rank[i]);
        hi = std::max(hi, rank[i]);
      }
      if (lo == hi) continue;  // constant in this node
      ++evaluated;

      if (hi - lo <= 4 * idx.size()) {
        // counting pass over the rank range
        for (std::size_t i : idx) {
          ++count_[rank[i]];
          bug_count_[rank[i]] += train_.y[i] == Label::Bug ? 1 : 0;
        }
        double left_n = 0.0, left_bug = 0.0;
        std::uint32_t prev = lo;
        left_n += count_[lo];
        left_bug += bug_count_[lo];
        for (std::uint32_t r = lo + 1; r <= hi; ++r) {
          if (count_[r] == 0) continue;
          offer(best, found, f, prev, r, left_n, left_bug, n, bugs);
          left_n += count_[r];
          left_bug += bug_count_[r];
          prev = r;
        }
        for (std::size_t i : idx) count_[rank[i]] = bug_count_[rank[i]] = 0;
      } else {
        // sparse range: sort (rank, label) packed into one key
        keys_.resize(idx.size());
        for (std::size_t k = 0; k < idx.size(); ++k) {
          keys_[k] = (static_cast<std::uint64_t>(rank[idx[k]]) << 1) | (train_.y[idx[k]] == Label::Bug ? 1u : 0u);
        }
        std::sort(keys_.begin(), keys_.end());
        double left_bug = 0.0;
        for (std::size_t k = 0; k + 1 < keys_.size(); ++k) {
          left_bug += static_cast<double>(keys_[k] & 1u);
          const auto a = static_cast<std::uint32_t>(keys_[k] >> 1), b = static_cast<std::uint32_t>(keys_[k + 1] >> 1);
          if (a == b) continue;
          offer(best, found, f, a, b, static_cast<double>(k + 1), left_bug, n, bugs);
        }
      }
    }
    return best;
  }

  const LabeledMatrix& train_;
  const FeatureRanks& ranks_;
  const TreeParams& params_;
  Rng rng_;
  std::vector<DecisionTree::Node>& nodes_;
  std::vector<std::size_t> order_;
  std::vector<std::uint32_t> count_;
  std::vector<std::uint32_t> bug_count_;
  std::vector<std::uint64_t> keys_;
};

}  // namespace

void DecisionTree::fit(const LabeledMatrix& train) {
  std::vector<std::size_t> all(train.x.rows());
  std::iota(all.begin(), all.end(), 0);
  fit(train, all);
}

FeatureRanks FeatureRanks::build(const FeatureMatrix& x) {
  FeatureRanks out;
  out.rows = x.rows();
  out.rank.resize(x.rows() * x.cols());
  out.values.resize(x.cols());
  std::vector<double> column(x.rows());
  for (std::size_t f = 0; f < x.cols(); ++f) {
    for (std::size_t r = 0; r < x.rows(); ++r) column[r] = x(r, f);
    auto& distinct = out.values[f];
    distinct = column;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    for (std::size_t r = 0; r < x.rows(); ++r) {
      out.rank[f * x.rows() + r] = static_cast<std::uint32_t>(
          std::lower_bound(distinct.begin(), distinct.end(), column[r]) - distinct.begin());
    }
  }
  return out;
}

void DecisionTree::fit(const LabeledMatrix& train, std::span<const std::size_t> sample) {
  detail::check_training_data(train, "decision tree");
  fit(train, sample, FeatureRanks::build(train.x));
}

void DecisionTree::fit(const LabeledMatrix& train, std::span<const std::size_t> sample,
                       const FeatureRanks& ranks) {
  detail::check_training_data(train, "decision tree");
  if (sample.empty()) throw InputError("decision tree: empty sample");
  if (ranks.rows != train.x.rows() || ranks.values.size() != train.x.cols()) {
    throw InputError("decision tree: ranks were built from a different matrix");
  }
  width_ = train.x.cols();
  nodes_.clear();
  TreeBuilder builder(train, ranks, params_, seed_, nodes_);
  builder.build(std::vector<std::size_t>(sample.begin(), sample.end()), 0);
}

Label DecisionTree::predict_row(std::span<const double> x) const {
  int node = 0;
  while (nodes_[node].feature >= 0) {
    node = x[nodes_[node].feature] <= nodes_[node].threshold ? nodes_[node].left : nodes_[node].right;
  }
  return nodes_[node].label;
}

std::vector<Label> DecisionTree::predict(const FeatureMatrix& rows) const {
  detail::check_width(rows, width_, "decision tree");
  std::vector<Label> out;
  out.reserve(rows.rows());
  for (std::size_t r = 0; r < rows.rows(); ++r) out.push_back(predict_row(rows.row(r)));
  return out;
}

std::size_t DecisionTree::depth() const {
  if (nodes_.empty()) return 0;
  std::vector<std::pair<int, std::size_t>> stack{{0, 0}};
  std::size_t deepest = 0;
  while (!stack.empty()) {
    auto [node, d] = stack.back();
    stack.pop_back();
    deepest = std::max(deepest, d);
    if (nodes_[node].feature >= 0) {
      stack.push_back({nodes_[node].left, d + 1});
      stack.push_back({nodes_[node].right, d + 1});
    }
  }
  return deepest;
}

json DecisionTree::to_json() const {
  std::vector<int> feature, left, right, label;
  std::vector<double> threshold;
  for (const auto& n : nodes_) {
    feature.push_back(n.feature);
    threshold.push_back(n.threshold);
    left.push_back(n.left);
    right.push_back(n.right);
    label.push_back(static_cast<int>(n.label));
  }
  return json{{"width", width_},     {"feature", feature}, {"threshold", threshold},
              {"left", left},        {"right", right},     {"label", label}};
}

DecisionTree DecisionTree::from_json(const json& j) {
  DecisionTree tree;
  tree.width_ = j.at("width").get<std::size_t>();
  const auto feature = j.at("feature").get<std::vector<int>>();
  const auto threshold = j.at("threshold").get<std::vector<double>>();
  const auto left = j.at("left").get<std::vector<int>>();
  const auto right = j.at("right").get<std::vector<int>>();
  const auto label = j.at("label").get<std::vector<int>>();
  const std::size_t n = feature.size();
  if (threshold.size() != n || left.size() != n || right.size() != n || label.size() != n || n == 0) {
    throw InputError("decision tree: malformed node arrays");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (feature[i] >= 0 && (left[i] <= 0 || right[i] <= 0 || static_cast<std::size_t>(left[i]) >= n ||
                            static_cast<std::size_t>(right[i]) >= n ||
                            static_cast<std::size_t>(feature[i]) >= tree.width_)) {
      throw InputError("decision tree: node references out of range");
    }
    tree.nodes_.push_back({feature[i], threshold[i], left[i], right[i],
                           label[i] ? Label::Bug : Label::NonBug});
  }
  return tree;
}

bool operator==(const DecisionTree::Node& a, const DecisionTree::Node& b) {
  return a.feature == b.feature && a.threshold == b.threshold && a.left == b.left &&
         a.right == b.right && a.label == b.label;
}

bool operator==(const DecisionTree& a, const DecisionTree& b) {
  return a.width_ == b.width_ && a.nodes_ == b.nodes_;
}

}  // namespace bugtriage
