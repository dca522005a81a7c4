#include "cropdt/tree.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <span>

#include <boost/math/distributions/normal.hpp>
#include <fmt/format.h>

#include "cropdt/error.hpp"
#include "cropdt/random.hpp"

namespace cropdt {

namespace {

// Scores closer than this are treated as equal.
constexpr double kTieEps = 1e-10;
// Slack when comparing fractional branch weights with min_leaf.
constexpr double kWeightEps = 1e-9;
// C4.5 keeps the subtree unless the leaf estimate is worse by more than this.
constexpr double kPruneSlack = 0.1;

using Distribution = std::vector<double>;

double sum(std::span<const double> v) { return std::accumulate(v.begin(), v.end(), 0.0); }

/// Entropy that tolerates an all-zero vector (returns 0).
double entropy_or_zero(std::span<const double> counts) {
  const double total = sum(counts);
  if (!(total > 0.0)) return 0.0;
  double h = 0.0;
  for (double c : counts) {
    if (c > 0.0) {
      const double p = c / total;
      h -= p * std::log2(p);
    }
  }
  return h;
}

/// Gain and split info of a binary split. `left`/`right` hold the known
/// instances, `missing` the ones without a value, which are divided between
/// the branches in proportion to the known weights.
SplitScore score_partition(std::span<const double> left, std::span<const double> right,
                           std::span<const double> missing) {
  const double lw = sum(left);
  const double rw = sum(right);
  const double f_left = lw / (lw + rw);
  const double f_right = rw / (lw + rw);

  const std::size_t classes = left.size();
  Distribution parent(classes);
  Distribution child_left(classes);
  Distribution child_right(classes);
  for (std::size_t c = 0; c < classes; ++c) {
    parent[c] = left[c] + right[c] + missing[c];
    child_left[c] = left[c] + f_left * missing[c];
    child_right[c] = right[c] + f_right * missing[c];
  }
  const double total = sum(parent);
  const double wl = sum(child_left);
  const double wr = sum(child_right);

  SplitScore out;
  out.gain = entropy_or_zero(parent) - (wl / total) * entropy_or_zero(child_left) -
             (wr / total) * entropy_or_zero(child_right);
  out.gain = std::max(out.gain, 0.0);
  const std::array<double, 2> branches = {wl, wr};
  out.split_info = entropy_or_zero(branches);
  if (out.split_info > 0.0) out.ratio = out.gain / out.split_info;
  return out;
}

double midpoint(double lo, double hi) {
  const double mid = lo + (hi - lo) / 2.0;
  // Keep lo <= mid < hi even for adjacent doubles.
  return mid < hi ? mid : lo;
}

struct WeightedRow {
  std::size_t index;
  double weight;
};

struct Candidate {
  std::size_t attribute = 0;
  double threshold = 0.0;
  SplitScore score;
};

bool is_pure(const Distribution& dist) {
  return std::count_if(dist.begin(), dist.end(), [](double w) { return w > 0.0; }) <= 1;
}

class Grower {
 public:
  Grower(const Dataset& data, const TrainParams& params)
      : data_(data),
        params_(params),
        min_leaf_(params.effective_min_leaf()),
        classes_(data.class_count()) {}

  std::vector<TreeNode> run(const std::vector<std::size_t>& rows) {
    std::vector<WeightedRow> weighted;
    weighted.reserve(rows.size());
    for (std::size_t r : rows) weighted.push_back({r, data_.instances[r].weight});
    grow(weighted, params_.seed);
    return std::move(nodes_);
  }

 private:
  Distribution class_weights(const std::vector<WeightedRow>& rows) const {
    Distribution dist(classes_, 0.0);
    for (const auto& r : rows) dist[data_.instances[r.index].label] += r.weight;
    return dist;
  }

  /// Best threshold of one attribute by info gain; smallest threshold on ties.
  std::optional<Candidate> best_threshold(const std::vector<WeightedRow>& rows,
                                          std::size_t attribute) const {
    struct Known {
      double value;
      std::size_t label;
      double weight;
    };
    std::vector<Known> known;
    Distribution missing(classes_, 0.0);
    for (const auto& r : rows) {
      const auto& inst = data_.instances[r.index];
      if (const auto& v = inst.features[attribute]) {
        known.push_back({*v, inst.label, r.weight});
      } else {
        missing[inst.label] += r.weight;
      }
    }
    if (known.size() < 2) return std::nullopt;
    std::stable_sort(known.begin(), known.end(),
                     [](const Known& a, const Known& b) { return a.value < b.value; });

    // Row i of `suffix` (classes_ wide) holds the class weights of known[i..].
    std::vector<double> suffix((known.size() + 1) * classes_, 0.0);
    for (std::size_t i = known.size(); i-- > 0;) {
      std::copy_n(suffix.begin() + static_cast<std::ptrdiff_t>((i + 1) * classes_), classes_,
                  suffix.begin() + static_cast<std::ptrdiff_t>(i * classes_));
      suffix[i * classes_ + known[i].label] += known[i].weight;
    }

    std::optional<Candidate> best;
    Distribution left(classes_, 0.0);
    for (std::size_t i = 0; i + 1 < known.size(); ++i) {
      left[known[i].label] += known[i].weight;
      if (!(known[i].value < known[i + 1].value)) continue;
      const std::span<const double> right(suffix.data() + (i + 1) * classes_, classes_);
      if (sum(left) + kWeightEps < min_leaf_ || sum(right) + kWeightEps < min_leaf_) continue;
      const SplitScore score = score_partition(left, right, missing);
      if (!best || score.gain > best->score.gain + kTieEps) {
        best = Candidate{attribute, midpoint(known[i].value, known[i + 1].value), score};
      }
    }
    return best;
  }

  // Impure nodes whose candidates all have zero gain (XOR-like layouts) still
  // split, on the first candidate in tie-break order.

  std::optional<Candidate> choose_gain_ratio(const std::vector<WeightedRow>& rows) const {
    std::vector<Candidate> per_attribute;
    std::optional<Candidate> fallback;
    for (std::size_t a = 0; a < data_.attribute_count(); ++a) {
      const auto c = best_threshold(rows, a);
      if (!c) continue;
      if (!fallback) fallback = c;
      if (c->score.gain > kTieEps) per_attribute.push_back(*c);
    }
    if (per_attribute.empty()) return fallback;
    double mean_gain = 0.0;
    for (const auto& c : per_attribute) mean_gain += c.score.gain;
    mean_gain /= static_cast<double>(per_attribute.size());

    std::optional<Candidate> best;
    for (const auto& c : per_attribute) {
      if (c.score.gain + kTieEps < mean_gain || !c.score.ratio) continue;
      if (!best || *c.score.ratio > *best->score.ratio + kTieEps) best = c;
    }
    return best;
  }

  std::optional<Candidate> choose_info_gain(const std::vector<WeightedRow>& rows,
                                            std::span<const std::size_t> attributes) const {
    std::optional<Candidate> best;
    for (std::size_t a : attributes) {
      const auto c = best_threshold(rows, a);
      if (!c) continue;
      const bool better = !best || c->score.gain > best->score.gain + kTieEps ||
                          (c->score.gain > best->score.gain - kTieEps && a < best->attribute);
      if (better) best = c;
    }
    return best;
  }

  std::optional<Candidate> choose_random_subset(const std::vector<WeightedRow>& rows,
                                                std::uint64_t key) const {
    std::vector<std::size_t> order(data_.attribute_count());
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(key);
    rng.shuffle(std::span<std::size_t>(order));
    // Draw k attributes; while none of them has positive gain, draw one more.
    const auto k = static_cast<std::size_t>(params_.effective_k(order.size()));
    std::optional<Candidate> best;
    for (std::size_t considered = k; considered <= order.size(); ++considered) {
      best = choose_info_gain(rows, std::span(order).first(considered));
      if (best && best->score.gain > kTieEps) break;
    }
    return best;
  }

  std::optional<Candidate> choose(const std::vector<WeightedRow>& rows, std::uint64_t key) const {
    switch (params_.algorithm) {
      case Algorithm::GainRatio: return choose_gain_ratio(rows);
      case Algorithm::RandomSubset: return choose_random_subset(rows, key);
      case Algorithm::ReducedError: {
        std::vector<std::size_t> all(data_.attribute_count());
        std::iota(all.begin(), all.end(), std::size_t{0});
        return choose_info_gain(rows, all);
      }
    }
    return std::nullopt;
  }

  int grow(const std::vector<WeightedRow>& rows, std::uint64_t key) {
    const int id = static_cast<int>(nodes_.size());
    TreeNode node;
    node.distribution = class_weights(rows);
    node.predicted = argmax(node.distribution);
    nodes_.push_back(node);

    if (is_pure(node.distribution) || sum(node.distribution) < 2.0 * min_leaf_) return id;
    const auto split = choose(rows, key);
    if (!split) return id;

    // Divide rows; a missing value goes both ways with proportional weight.
    std::vector<WeightedRow> left;
    std::vector<WeightedRow> right;
    std::vector<WeightedRow> missing;
    double lw = 0.0;
    double rw = 0.0;
    for (const auto& r : rows) {
      const auto& v = data_.instances[r.index].features[split->attribute];
      if (!v) {
        missing.push_back(r);
      } else if (*v <= split->threshold) {
        left.push_back(r);
        lw += r.weight;
      } else {
        right.push_back(r);
        rw += r.weight;
      }
    }
    for (const auto& r : missing) {
      left.push_back({r.index, r.weight * lw / (lw + rw)});
      right.push_back({r.index, r.weight * rw / (lw + rw)});
    }

    const int l = grow(left, derive_seed(key, 1));
    const int r = grow(right, derive_seed(key, 2));
    auto& parent = nodes_[static_cast<std::size_t>(id)];
    parent.attribute = static_cast<int>(split->attribute);
    parent.threshold = split->threshold;
    parent.left = l;
    parent.right = r;
    return id;
  }

  const Dataset& data_;
  const TrainParams& params_;
  int min_leaf_;
  std::size_t classes_;
  std::vector<TreeNode> nodes_;
};

void collapse(TreeNode& node) {
  node.attribute = TreeNode::kNone;
  node.threshold = 0.0;
  node.left = TreeNode::kNone;
  node.right = TreeNode::kNone;
  node.left_weight = 0.0;
  node.right_weight = 0.0;
}

}  // namespace

std::string_view to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::GainRatio: return "gainratio";
    case Algorithm::RandomSubset: return "randomsubset";
    case Algorithm::ReducedError: return "reducederror";
  }
  return "?";
}

std::optional<Algorithm> parse_algorithm(std::string_view text) {
  if (text == "gainratio" || text == "j48") return Algorithm::GainRatio;
  if (text == "randomsubset" || text == "randomtree") return Algorithm::RandomSubset;
  if (text == "reducederror" || text == "reptree") return Algorithm::ReducedError;
  return std::nullopt;
}

int TrainParams::effective_min_leaf() const {
  if (min_leaf) return *min_leaf;
  return algorithm == Algorithm::RandomSubset ? 1 : 2;
}

int TrainParams::effective_k(std::size_t attribute_count) const {
  if (k) return *k;
  if (attribute_count <= 1) return 1;
  const int automatic = static_cast<int>(std::ceil(std::log2(static_cast<double>(attribute_count)))) + 1;
  return std::clamp(automatic, 1, static_cast<int>(attribute_count));
}

void TrainParams::validate(std::size_t attribute_count) const {
  if (min_leaf && *min_leaf < 1) throw ContractError("min_leaf must be >= 1");
  if (!(confidence > 0.0 && confidence < 1.0)) {
    throw ContractError("confidence factor must lie in (0, 1)");
  }
  if (prune_folds < 2) throw ContractError("prune_folds must be >= 2");
  if (k) {
    if (algorithm != Algorithm::RandomSubset) {
      throw ContractError("k applies to the randomsubset algorithm only");
    }
    if (*k < 1 || static_cast<std::size_t>(*k) > attribute_count) {
      throw ContractError(
          fmt::format("k = {} outside 1..{} attributes", *k, attribute_count));
    }
  }
  if (unpruned && algorithm != Algorithm::GainRatio) {
    throw ContractError("unpruned applies to the gainratio algorithm only");
  }
}

double TreeNode::weight() const { return sum(distribution); }

double TreeNode::errors() const {
  return distribution.empty() ? 0.0 : weight() - distribution[predicted];
}

DecisionTree::DecisionTree(std::vector<TreeNode> nodes, std::size_t class_count)
    : class_count_(class_count) {
  if (nodes.empty()) throw ContractError("tree has no nodes");
  if (class_count == 0) throw ContractError("tree has an empty class domain");

  // Copy reachable nodes into preorder, then fill weights bottom-up.
  std::vector<int> visiting(nodes.size(), 0);
  const std::function<int(std::size_t)> copy = [&](std::size_t i) -> int {
    if (i >= nodes.size()) throw ContractError(fmt::format("child index {} out of range", i));
    if (visiting[i]++) throw ContractError("tree nodes are shared or cyclic");
    const TreeNode& src = nodes[i];
    const int id = static_cast<int>(nodes_.size());
    nodes_.push_back(src);
    if (src.is_leaf()) {
      TreeNode& leaf = nodes_.back();
      if (leaf.distribution.size() != class_count) {
        throw ContractError("leaf distribution does not match the class domain");
      }
      for (double w : leaf.distribution) {
        if (!(w >= 0.0) || !std::isfinite(w)) throw ContractError("negative leaf weight");
      }
      if (!(leaf.weight() > 0.0)) throw ContractError("leaf without training weight");
      leaf.predicted = argmax(leaf.distribution);
      leaf.left = leaf.right = TreeNode::kNone;
      return id;
    }
    if (src.attribute < 0 || !std::isfinite(src.threshold) || src.left < 0 || src.right < 0) {
      throw ContractError("malformed internal node");
    }
    const int l = copy(static_cast<std::size_t>(src.left));
    const int r = copy(static_cast<std::size_t>(src.right));
    TreeNode& node = nodes_[static_cast<std::size_t>(id)];
    node.left = l;
    node.right = r;
    const TreeNode& ln = nodes_[static_cast<std::size_t>(l)];
    const TreeNode& rn = nodes_[static_cast<std::size_t>(r)];
    node.distribution.assign(class_count, 0.0);
    for (std::size_t c = 0; c < class_count; ++c) {
      node.distribution[c] = ln.distribution[c] + rn.distribution[c];
    }
    node.left_weight = ln.weight();
    node.right_weight = rn.weight();
    node.predicted = argmax(node.distribution);
    return id;
  };
  copy(0);
}

DecisionTree DecisionTree::leaf(std::vector<double> distribution) {
  const std::size_t classes = distribution.size();
  TreeNode node;
  node.distribution = std::move(distribution);
  return DecisionTree({std::move(node)}, classes);
}

std::size_t DecisionTree::leaf_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [](const TreeNode& n) { return n.is_leaf(); }));
}

std::size_t DecisionTree::depth() const {
  const std::function<std::size_t(std::size_t)> depth_of = [&](std::size_t i) -> std::size_t {
    const TreeNode& n = nodes_[i];
    if (n.is_leaf()) return 0;
    return 1 + std::max(depth_of(static_cast<std::size_t>(n.left)),
                        depth_of(static_cast<std::size_t>(n.right)));
  };
  return depth_of(0);
}

std::size_t DecisionTree::route(std::span<const std::optional<double>> features) const {
  std::size_t i = 0;
  while (!nodes_[i].is_leaf()) {
    const TreeNode& n = nodes_[i];
    const auto a = static_cast<std::size_t>(n.attribute);
    bool go_left = false;
    if (a < features.size() && features[a]) {
      go_left = *features[a] <= n.threshold;
    } else {
      go_left = n.left_weight >= n.right_weight;
    }
    i = static_cast<std::size_t>(go_left ? n.left : n.right);
  }
  return i;
}

Prediction DecisionTree::predict(std::span<const std::optional<double>> features) const {
  const TreeNode& leaf = nodes_[route(features)];
  Prediction out;
  const double total = leaf.weight();
  out.distribution.reserve(class_count_);
  for (double w : leaf.distribution) out.distribution.push_back(w / total);
  out.predicted = leaf.predicted;
  return out;
}

std::size_t tree_size(const DecisionTree& tree) { return tree.size(); }

Prediction predict(const DecisionTree& tree, std::span<const std::optional<double>> features) {
  return tree.predict(features);
}

std::size_t argmax(std::span<const double> values) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

double entropy(std::span<const double> counts) {
  for (double c : counts) {
    if (!(c >= 0.0)) throw ContractError("entropy of a negative count");
  }
  if (!(sum(counts) > 0.0)) throw ContractError("entropy of an all-zero distribution");
  return entropy_or_zero(counts);
}

std::vector<double> split_candidates(const Dataset& dataset, std::size_t attribute) {
  if (attribute >= dataset.attribute_count()) {
    throw ContractError(fmt::format("attribute {} out of range", attribute));
  }
  std::vector<double> values;
  for (const auto& inst : dataset.instances) {
    if (const auto& v = inst.features[attribute]) values.push_back(*v);
  }
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  std::vector<double> out;
  for (std::size_t i = 0; i + 1 < values.size(); ++i) {
    out.push_back(midpoint(values[i], values[i + 1]));
  }
  return out;
}

std::optional<SplitScore> score_split(const Dataset& dataset, std::size_t attribute,
                                      double threshold) {
  if (attribute >= dataset.attribute_count()) {
    throw ContractError(fmt::format("attribute {} out of range", attribute));
  }
  const std::size_t classes = dataset.class_count();
  Distribution left(classes, 0.0);
  Distribution right(classes, 0.0);
  Distribution missing(classes, 0.0);
  for (const auto& inst : dataset.instances) {
    const auto& v = inst.features[attribute];
    if (!v) {
      missing[inst.label] += inst.weight;
    } else if (*v <= threshold) {
      left[inst.label] += inst.weight;
    } else {
      right[inst.label] += inst.weight;
    }
  }
  if (!(sum(left) > 0.0) || !(sum(right) > 0.0)) return std::nullopt;
  return score_partition(left, right, missing);
}

std::optional<double> info_gain(const Dataset& dataset, std::size_t attribute, double threshold) {
  const auto s = score_split(dataset, attribute, threshold);
  if (!s) return std::nullopt;
  return s->gain;
}

std::optional<double> gain_ratio(const Dataset& dataset, std::size_t attribute, double threshold) {
  const auto s = score_split(dataset, attribute, threshold);
  if (!s) return std::nullopt;
  return s->ratio;
}

double pessimistic_extra_errors(double n, double e, double confidence) {
  if (!(n > 0.0)) return 0.0;
  if (e < 1.0) {
    const double base = n * (1.0 - std::pow(confidence, 1.0 / n));
    if (e == 0.0) return base;
    // Linear interpolation between e = 0 and e = 1.
    return base + e * (pessimistic_extra_errors(n, 1.0, confidence) - base);
  }
  if (e + 0.5 >= n) return std::max(n - e, 0.0);
  const double z = boost::math::quantile(boost::math::normal(), 1.0 - confidence);
  const double f = (e + 0.5) / n;
  const double upper =
      (f + z * z / (2.0 * n) + z * std::sqrt(f / n - f * f / n + z * z / (4.0 * n * n))) /
      (1.0 + z * z / n);
  return upper * n - e;
}

DecisionTree grow_tree(const Dataset& dataset, const std::vector<std::size_t>& rows,
                       const TrainParams& params) {
  if (rows.empty()) throw ContractError("cannot grow a tree on zero instances");
  Grower grower(dataset, params);
  return DecisionTree(grower.run(rows), dataset.class_count());
}

DecisionTree prune_pessimistic(const DecisionTree& tree, double confidence) {
  std::vector<TreeNode> nodes(tree.nodes().begin(), tree.nodes().end());
  const auto leaf_estimate = [&](const TreeNode& n) {
    return n.errors() + pessimistic_extra_errors(n.weight(), n.errors(), confidence);
  };
  const std::function<double(std::size_t)> prune = [&](std::size_t i) -> double {
    TreeNode& n = nodes[i];
    if (n.is_leaf()) return leaf_estimate(n);
    const double subtree = prune(static_cast<std::size_t>(n.left)) +
                           prune(static_cast<std::size_t>(n.right));
    const double as_leaf = leaf_estimate(nodes[i]);
    if (as_leaf <= subtree + kPruneSlack) {
      collapse(nodes[i]);
      return as_leaf;
    }
    return subtree;
  };
  prune(0);
  return DecisionTree(std::move(nodes), tree.class_count());
}

DecisionTree prune_reduced_error(const DecisionTree& tree, const Dataset& dataset,
                                 const std::vector<std::size_t>& holdout) {
  std::vector<TreeNode> nodes(tree.nodes().begin(), tree.nodes().end());
  // Weighted holdout errors each node would make as a leaf.
  std::vector<double> leaf_errors(nodes.size(), 0.0);
  for (std::size_t r : holdout) {
    const auto& inst = dataset.instances.at(r);
    std::size_t i = 0;
    while (true) {
      const TreeNode& n = nodes[i];
      if (n.predicted != inst.label) leaf_errors[i] += inst.weight;
      if (n.is_leaf()) break;
      const auto& v = inst.features[static_cast<std::size_t>(n.attribute)];
      const bool go_left = v ? *v <= n.threshold : n.left_weight >= n.right_weight;
      i = static_cast<std::size_t>(go_left ? n.left : n.right);
    }
  }
  const std::function<double(std::size_t)> prune = [&](std::size_t i) -> double {
    TreeNode& n = nodes[i];
    if (n.is_leaf()) return leaf_errors[i];
    const double subtree = prune(static_cast<std::size_t>(n.left)) +
                           prune(static_cast<std::size_t>(n.right));
    if (subtree >= leaf_errors[i]) {
      collapse(nodes[i]);
      return leaf_errors[i];
    }
    return subtree;
  };
  prune(0);
  return DecisionTree(std::move(nodes), tree.class_count());
}

double weighted_errors(const DecisionTree& tree, const Dataset& dataset,
                       const std::vector<std::size_t>& rows) {
  double errors = 0.0;
  for (std::size_t r : rows) {
    const auto& inst = dataset.instances.at(r);
    if (tree.predict(inst.features).predicted != inst.label) errors += inst.weight;
  }
  return errors;
}

GrowPruneSplit reduced_error_partition(std::size_t n, int folds, std::uint64_t seed) {
  GrowPruneSplit out;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (folds < 2 || n < static_cast<std::size_t>(folds)) {
    out.grow = std::move(order);
    return out;
  }
  Rng rng(seed);
  rng.shuffle(std::span<std::size_t>(order));
  for (std::size_t i = 0; i < n; ++i) {
    (i % static_cast<std::size_t>(folds) == 0 ? out.prune : out.grow).push_back(order[i]);
  }
  std::sort(out.grow.begin(), out.grow.end());
  std::sort(out.prune.begin(), out.prune.end());
  return out;
}

DecisionTree train(const Dataset& dataset, const TrainParams& params) {
  if (dataset.empty()) throw ContractError("cannot train on an empty dataset");
  if (dataset.class_count() == 0) throw ContractError("dataset has an empty class domain");
  params.validate(dataset.attribute_count());
  dataset.validate();

  std::vector<std::size_t> all(dataset.size());
  std::iota(all.begin(), all.end(), std::size_t{0});

  switch (params.algorithm) {
    case Algorithm::GainRatio: {
      DecisionTree tree = grow_tree(dataset, all, params);
      return params.unpruned ? tree : prune_pessimistic(tree, params.confidence);
    }
    case Algorithm::RandomSubset:
      return grow_tree(dataset, all, params);
    case Algorithm::ReducedError: {
      const auto split = reduced_error_partition(dataset.size(), params.prune_folds, params.seed);
      if (split.prune.empty()) return grow_tree(dataset, all, params);
      const DecisionTree grown = grow_tree(dataset, split.grow, params);
      return prune_reduced_error(grown, dataset, split.prune);
    }
  }
  throw ContractError("unknown algorithm");
}

}  // namespace cropdt
