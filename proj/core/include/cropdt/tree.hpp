#pragma once

// Binary threshold decision trees over numeric attributes, and three ways of
// growing them:
//
//   GainRatio     C4.5-style: gain-ratio split choice among attributes whose
//                 info gain reaches the mean positive gain, then pessimistic
//                 subtree-replacement pruning.
//   RandomSubset  RandomTree-style: best info gain over k attributes drawn per
//                 node, no pruning.
//   ReducedError  REPTree-style: info-gain tree grown on part of the data,
//                 pruned bottom-up against the held-out rest.
//
// Splits send value <= threshold left and value > threshold right. During
// training an instance with a missing value is sent down both branches with
// its weight divided in proportion to the known branch weights. At prediction
// time it follows the heavier branch (left on ties).
//
// Ties are broken by lowest attribute index, then smallest threshold.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cropdt/dataset.hpp"

namespace cropdt {

enum class Algorithm : std::uint8_t { GainRatio, RandomSubset, ReducedError };

std::string_view to_string(Algorithm algorithm);
/// Accepts gainratio/randomsubset/reducederror and the j48/randomtree/reptree aliases.
std::optional<Algorithm> parse_algorithm(std::string_view text);

struct TrainParams {
  Algorithm algorithm = Algorithm::GainRatio;
  /// Minimum known weight per branch. Unset: 1 for RandomSubset, else 2.
  std::optional<int> min_leaf;
  /// GainRatio pruning confidence, in (0, 1).
  double confidence = 0.25;
  /// GainRatio only: skip pruning.
  bool unpruned = false;
  /// RandomSubset attributes per node. Unset: max(1, ceil(log2(attributes)) + 1).
  std::optional<int> k;
  /// ReducedError: one fold of this many is held out for pruning.
  int prune_folds = 3;
  std::uint64_t seed = 1;

  int effective_min_leaf() const;
  int effective_k(std::size_t attribute_count) const;
  /// Throws ContractError when a value is out of range for `attribute_count`.
  void validate(std::size_t attribute_count) const;

  friend bool operator==(const TrainParams&, const TrainParams&) = default;
};

struct TreeNode {
  static constexpr int kNone = -1;

  int attribute = kNone;  // kNone for leaves
  double threshold = 0.0;
  int left = kNone;
  int right = kNone;
  /// Training weight below each branch; decides missing-value routing.
  double left_weight = 0.0;
  double right_weight = 0.0;
  /// Training class weights reaching this node.
  std::vector<double> distribution;
  std::size_t predicted = 0;

  bool is_leaf() const { return attribute == kNone; }
  double weight() const;
  /// Training weight not of the predicted class.
  double errors() const;

  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

struct Prediction {
  std::size_t predicted = 0;
  std::vector<double> distribution;  // sums to 1
};

/// Immutable tree stored as a preorder node array; node 0 is the root.
class DecisionTree {
 public:
  /// Validates structure, recomputes branch weights from the leaves and
  /// renumbers nodes into preorder. Throws ContractError on a malformed tree.
  DecisionTree(std::vector<TreeNode> nodes, std::size_t class_count);

  static DecisionTree leaf(std::vector<double> distribution);

  const TreeNode& root() const { return nodes_.front(); }
  const TreeNode& node(std::size_t i) const { return nodes_.at(i); }
  std::span<const TreeNode> nodes() const { return nodes_; }
  std::size_t class_count() const { return class_count_; }
  std::size_t size() const { return nodes_.size(); }
  std::size_t leaf_count() const;
  std::size_t depth() const;

  /// Index of the leaf `features` reaches.
  std::size_t route(std::span<const std::optional<double>> features) const;
  Prediction predict(std::span<const std::optional<double>> features) const;

  friend bool operator==(const DecisionTree&, const DecisionTree&) = default;

 private:
  std::vector<TreeNode> nodes_;
  std::size_t class_count_ = 0;
};

std::size_t tree_size(const DecisionTree& tree);
Prediction predict(const DecisionTree& tree, std::span<const std::optional<double>> features);

/// Index of the largest entry; ties go to the lowest index.
std::size_t argmax(std::span<const double> values);

/// Shannon entropy in bits. Throws ContractError when every count is zero.
double entropy(std::span<const double> counts);

/// Midpoints between consecutive distinct known values of one attribute.
std::vector<double> split_candidates(const Dataset& dataset, std::size_t attribute);

struct SplitScore {
  double gain = 0.0;
  double split_info = 0.0;
  /// Unset when split_info is zero.
  std::optional<double> ratio;
};

/// Scores a threshold over the whole dataset. Unset when the known values do
/// not fall on both sides of the threshold.
std::optional<SplitScore> score_split(const Dataset& dataset, std::size_t attribute,
                                      double threshold);
std::optional<double> info_gain(const Dataset& dataset, std::size_t attribute, double threshold);
std::optional<double> gain_ratio(const Dataset& dataset, std::size_t attribute, double threshold);

/// Upper-confidence estimate of extra errors at a leaf of weight `n` with `e`
/// observed errors (binomial bound with normal approximation for e >= 1).
double pessimistic_extra_errors(double n, double e, double confidence);

// Building blocks of train(), exposed for testing.

/// Grows a tree on `rows` of `dataset` using `params`' algorithm selection
/// rule, without any pruning.
DecisionTree grow_tree(const Dataset& dataset, const std::vector<std::size_t>& rows,
                       const TrainParams& params);

/// Subtree replacement using pessimistic error estimates.
DecisionTree prune_pessimistic(const DecisionTree& tree, double confidence);

/// Replaces every subtree whose weighted error on `holdout` rows is at least
/// the error of a leaf at that node.
DecisionTree prune_reduced_error(const DecisionTree& tree, const Dataset& dataset,
                                 const std::vector<std::size_t>& holdout);

/// Weighted misclassifications of `tree` on `rows`.
double weighted_errors(const DecisionTree& tree, const Dataset& dataset,
                       const std::vector<std::size_t>& rows);

struct GrowPruneSplit {
  std::vector<std::size_t> grow;
  std::vector<std::size_t> prune;  // empty when there are too few instances
};

/// ReducedError data split: shuffle with `seed`, every `folds`-th row is held out.
GrowPruneSplit reduced_error_partition(std::size_t n, int folds, std::uint64_t seed);

/// Throws ContractError on an empty dataset or invalid parameters.
DecisionTree train(const Dataset& dataset, const TrainParams& params);

}  // namespace cropdt
