#pragma once

// Text model files. A header of `key: value` lines is followed by a blank
// line, the tree body and a closing `end` line:
//
//   format: 1
//   algorithm: gainratio
//   attributes: jan,feb,...,dec
//   classes: A1,A2,...,E
//   params: min_leaf=auto confidence=0.25 unpruned=false k=auto prune_folds=3 seed=1
//   nodes: 3
//
//   jun <= 187.5: A1 (5/0) {A1=5}
//   jun > 187.5: C3 (5/0) {C3=5}
//   end
//
// An internal node prints a `<=` line and a `>` line; a child subtree follows
// its branch line indented by one more "|   ". A leaf is appended to its branch
// line as `: <class> (<weight>/<errors>) {<class>=<weight>,...}` listing the
// non-zero training weights; a root leaf is a line of its own. Numbers use the
// shortest decimal form that reads back to the same double.

#include <string>
#include <string_view>
#include <vector>

#include "cropdt/dataset.hpp"
#include "cropdt/error.hpp"
#include "cropdt/tree.hpp"

namespace cropdt {

struct Model {
  TrainParams params;
  std::vector<std::string> attribute_names;
  std::vector<std::string> class_names;
  DecisionTree tree;
};

/// Trains on `dataset` and keeps its domains alongside the tree.
Model fit_model(const Dataset& dataset, const TrainParams& params);

std::string save_model(const Model& model);

/// Throws DataError (with the line number) on any malformed or truncated input.
Model load_model(std::string_view text);

Model load_model_file(const std::string& path);

/// Just the tree body, as embedded in save_model().
std::string render_tree(const DecisionTree& tree, const std::vector<std::string>& attribute_names,
                        const std::vector<std::string>& class_names);

}  // namespace cropdt
