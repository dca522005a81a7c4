#include "cropdt/model_io.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <fmt/format.h>

#include "cropdt/csv.hpp"

namespace cropdt {

namespace {

constexpr std::string_view kIndent = "|   ";
constexpr int kFormatVersion = 1;

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    out.emplace_back(text.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string render_params(const TrainParams& p) {
  const auto opt = [](const std::optional<int>& v) {
    return v ? std::to_string(*v) : std::string("auto");
  };
  return fmt::format("min_leaf={} confidence={} unpruned={} k={} prune_folds={} seed={}",
                     opt(p.min_leaf), format_shortest(p.confidence), p.unpruned ? "true" : "false",
                     opt(p.k), p.prune_folds, p.seed);
}

std::string render_leaf(const TreeNode& leaf, const std::vector<std::string>& class_names) {
  std::vector<std::string> entries;
  for (std::size_t c = 0; c < leaf.distribution.size(); ++c) {
    if (leaf.distribution[c] > 0.0) {
      entries.push_back(fmt::format("{}={}", class_names[c], format_shortest(leaf.distribution[c])));
    }
  }
  return fmt::format(": {} ({}/{}) {{{}}}", class_names[leaf.predicted],
                     format_shortest(leaf.weight()), format_shortest(leaf.errors()),
                     fmt::join(entries, ","));
}

class ModelReader {
 public:
  explicit ModelReader(std::string_view text) {
    std::size_t start = 0;
    while (start < text.size()) {
      const auto end = text.find('\n', start);
      if (end == std::string_view::npos) {
        lines_.push_back(chomp(text.substr(start)));
        break;
      }
      lines_.push_back(chomp(text.substr(start, end - start)));
      start = end + 1;
    }
  }

  Model read() {
    // key -> (value, line index)
    std::map<std::string, std::pair<std::string, std::size_t>, std::less<>> header;
    while (pos_ < lines_.size() && !lines_[pos_].empty()) {
      const std::string_view line = lines_[pos_];
      const auto colon = line.find(": ");
      if (colon == std::string_view::npos) fail("expected 'key: value' header line");
      header.emplace(std::string(line.substr(0, colon)),
                     std::pair{std::string(line.substr(colon + 2)), pos_});
      ++pos_;
    }
    if (pos_ >= lines_.size()) fail("truncated model: header is not followed by a tree");
    ++pos_;  // blank separator
    const std::size_t body_start = pos_;

    // positions pos_ on the key's line so errors point at it
    const auto need = [&](std::string_view key) -> const std::string& {
      const auto it = header.find(key);
      if (it == header.end()) fail(fmt::format("header lacks '{}'", key));
      pos_ = it->second.second;
      return it->second.first;
    };
    if (parse_integer(need("format")) != kFormatVersion) {
      fail(fmt::format("unsupported model format '{}'", need("format")));
    }
    const auto algorithm = parse_algorithm(need("algorithm"));
    if (!algorithm) fail(fmt::format("unknown algorithm '{}'", need("algorithm")));
    attributes_ = split(need("attributes"), ',');
    classes_ = split(need("classes"), ',');
    const auto node_count = parse_integer(need("nodes"));
    if (!node_count || *node_count < 1) fail("bad node count");

    const TrainParams params = parse_params(need("params"), *algorithm);

    pos_ = body_start;
    if (pos_ < lines_.size() && lines_[pos_].starts_with(": ")) {
      nodes_.push_back(parse_leaf(lines_[pos_].substr(2)));
      ++pos_;
    } else {
      parse_internal(0);
    }
    if (pos_ >= lines_.size() || lines_[pos_] != "end") fail("truncated model: missing 'end'");
    ++pos_;
    for (; pos_ < lines_.size(); ++pos_) {
      if (!lines_[pos_].empty()) fail("unexpected text after 'end'");
    }
    if (static_cast<long long>(nodes_.size()) != *node_count) {
      pos_ = body_start;
      fail(fmt::format("header announces {} nodes, body has {}", *node_count, nodes_.size()));
    }
    try {
      params.validate(attributes_.size());
      return Model{params, attributes_, classes_, DecisionTree(std::move(nodes_), classes_.size())};
    } catch (const ContractError& e) {
      pos_ = body_start;
      fail(e.what());
    }
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw DataError(what, std::min(pos_, lines_.size() - (lines_.empty() ? 0 : 1)) + 1);
  }

  TrainParams parse_params(std::string_view text, Algorithm algorithm) const {
    TrainParams p;
    p.algorithm = algorithm;
    std::map<std::string, std::string, std::less<>> kv;
    for (const auto& token : split(text, ' ')) {
      const auto eq = token.find('=');
      if (eq == std::string::npos) fail(fmt::format("bad parameter '{}'", token));
      kv[token.substr(0, eq)] = token.substr(eq + 1);
    }
    const auto get = [&](std::string_view key) -> const std::string& {
      const auto it = kv.find(key);
      if (it == kv.end()) fail(fmt::format("params lack '{}'", key));
      return it->second;
    };
    const auto opt_int = [&](std::string_view key) -> std::optional<int> {
      const std::string& v = get(key);
      if (v == "auto") return std::nullopt;
      const auto n = parse_integer(v);
      if (!n) fail(fmt::format("bad value for '{}'", key));
      return static_cast<int>(*n);
    };
    p.min_leaf = opt_int("min_leaf");
    p.k = opt_int("k");
    const auto confidence = parse_double(get("confidence"));
    const auto folds = parse_integer(get("prune_folds"));
    const auto seed = parse_unsigned(get("seed"));
    if (!confidence || !folds || !seed) fail("bad numeric parameter");
    p.confidence = *confidence;
    p.prune_folds = static_cast<int>(*folds);
    p.seed = static_cast<std::uint64_t>(*seed);
    const std::string& unpruned = get("unpruned");
    if (unpruned != "true" && unpruned != "false") fail("bad value for 'unpruned'");
    p.unpruned = unpruned == "true";
    return p;
  }

  TreeNode parse_leaf(std::string_view text) const {
    // "<class> (<weight>/<errors>) {<class>=<w>,...}"
    const auto open = text.find(" (");
    const auto slash = text.find('/', open);
    const auto close = text.find(") {", slash);
    if (open == std::string_view::npos || slash == std::string_view::npos ||
        close == std::string_view::npos || !text.ends_with('}')) {
      fail("malformed leaf");
    }
    const std::string_view cls = text.substr(0, open);
    const std::string_view weight = text.substr(open + 2, slash - open - 2);
    const std::string_view errors = text.substr(slash + 1, close - slash - 1);
    const std::string_view entries = text.substr(close + 3, text.size() - close - 4);

    TreeNode leaf;
    leaf.distribution.assign(classes_.size(), 0.0);
    if (!entries.empty()) {
      for (const auto& entry : split(entries, ',')) {
        const auto eq = entry.find('=');
        if (eq == std::string::npos) fail("malformed leaf distribution");
        const auto c = std::find(classes_.begin(), classes_.end(), entry.substr(0, eq));
        const auto w = parse_double(std::string_view(entry).substr(eq + 1));
        if (c == classes_.end()) fail(fmt::format("unknown class in '{}'", entry));
        if (!w || !(*w > 0.0)) fail(fmt::format("bad class weight in '{}'", entry));
        leaf.distribution[static_cast<std::size_t>(c - classes_.begin())] = *w;
      }
    }
    if (!(leaf.weight() > 0.0)) fail("leaf without training weight");
    leaf.predicted = argmax(leaf.distribution);
    if (classes_[leaf.predicted] != cls) fail(fmt::format("leaf class '{}' is not the majority", cls));
    if (format_shortest(leaf.weight()) != weight || format_shortest(leaf.errors()) != errors) {
      fail("leaf weight/errors disagree with its distribution");
    }
    return leaf;
  }

  /// Strips `depth` indents; fails when the line is missing or mis-indented.
  std::string_view at_depth(std::size_t depth) const {
    if (pos_ >= lines_.size()) fail("truncated model: tree body ends early");
    std::string_view line = lines_[pos_];
    for (std::size_t d = 0; d < depth; ++d) {
      if (!line.starts_with(kIndent)) fail("unexpected indentation");
      line.remove_prefix(kIndent.size());
    }
    if (line.starts_with('|')) fail("unexpected indentation");
    return line;
  }

  struct Branch {
    int attribute;
    double threshold;
    std::string threshold_text;
    std::optional<TreeNode> leaf;
  };

  Branch parse_branch(std::string_view line, std::string_view op) const {
    std::string_view head = line;
    std::optional<TreeNode> leaf;
    if (const auto colon = line.find(": "); colon != std::string_view::npos) {
      head = line.substr(0, colon);
      leaf = parse_leaf(line.substr(colon + 2));
    }
    const auto parts = split(head, ' ');
    if (parts.size() != 3 || parts[1] != op) fail(fmt::format("expected '<attribute> {} <value>'", op));
    const auto a = std::find(attributes_.begin(), attributes_.end(), parts[0]);
    if (a == attributes_.end()) fail(fmt::format("unknown attribute '{}'", parts[0]));
    const auto t = parse_double(parts[2]);
    if (!t) fail(fmt::format("bad threshold '{}'", parts[2]));
    return {static_cast<int>(a - attributes_.begin()), *t, parts[2], std::move(leaf)};
  }

  int parse_internal(std::size_t depth) {
    const int id = static_cast<int>(nodes_.size());
    nodes_.emplace_back();

    const Branch left = parse_branch(at_depth(depth), "<=");
    ++pos_;
    int l = 0;
    if (left.leaf) {
      l = static_cast<int>(nodes_.size());
      nodes_.push_back(*left.leaf);
    } else {
      l = parse_internal(depth + 1);
    }

    const Branch right = parse_branch(at_depth(depth), ">");
    if (right.attribute != left.attribute || right.threshold_text != left.threshold_text) {
      fail("'>' branch does not match its '<=' branch");
    }
    ++pos_;
    int r = 0;
    if (right.leaf) {
      r = static_cast<int>(nodes_.size());
      nodes_.push_back(*right.leaf);
    } else {
      r = parse_internal(depth + 1);
    }

    TreeNode& node = nodes_[static_cast<std::size_t>(id)];
    node.attribute = left.attribute;
    node.threshold = left.threshold;
    node.left = l;
    node.right = r;
    return id;
  }

  std::vector<std::string_view> lines_;
  std::size_t pos_ = 0;
  std::vector<std::string> attributes_;
  std::vector<std::string> classes_;
  std::vector<TreeNode> nodes_;
};

}  // namespace

Model fit_model(const Dataset& dataset, const TrainParams& params) {
  return Model{params, dataset.attribute_names, dataset.class_names, train(dataset, params)};
}

std::string render_tree(const DecisionTree& tree, const std::vector<std::string>& attribute_names,
                        const std::vector<std::string>& class_names) {
  std::string out;
  if (tree.root().is_leaf()) {
    out += render_leaf(tree.root(), class_names);
    out += '\n';
    return out;
  }
  const std::function<void(std::size_t, std::size_t)> emit = [&](std::size_t i, std::size_t depth) {
    const TreeNode& n = tree.node(i);
    std::string prefix;
    for (std::size_t d = 0; d < depth; ++d) prefix += kIndent;
    const std::string& attr = attribute_names.at(static_cast<std::size_t>(n.attribute));
    const std::string threshold = format_shortest(n.threshold);
    for (const auto& [op, child] : {std::pair{"<=", n.left}, std::pair{">", n.right}}) {
      const TreeNode& c = tree.node(static_cast<std::size_t>(child));
      out += fmt::format("{}{} {} {}", prefix, attr, op, threshold);
      if (c.is_leaf()) {
        out += render_leaf(c, class_names);
        out += '\n';
      } else {
        out += '\n';
        emit(static_cast<std::size_t>(child), depth + 1);
      }
    }
  };
  emit(0, 0);
  return out;
}

std::string save_model(const Model& model) {
  if (model.tree.class_count() != model.class_names.size()) {
    throw ContractError("model class list does not match its tree");
  }
  for (const auto* names : {&model.attribute_names, &model.class_names}) {
    for (const auto& name : *names) {
      if (name.empty() || name.find_first_of(" ,:={}()/|\n") != std::string::npos) {
        throw ContractError(fmt::format("name '{}' cannot be written to a model file", name));
      }
    }
  }
  std::string out;
  out += fmt::format("format: {}\n", kFormatVersion);
  out += fmt::format("algorithm: {}\n", to_string(model.params.algorithm));
  out += fmt::format("attributes: {}\n", fmt::join(model.attribute_names, ","));
  out += fmt::format("classes: {}\n", fmt::join(model.class_names, ","));
  out += fmt::format("params: {}\n", render_params(model.params));
  out += fmt::format("nodes: {}\n\n", model.tree.size());
  out += render_tree(model.tree, model.attribute_names, model.class_names);
  out += "end\n";
  return out;
}

Model load_model(std::string_view text) { return ModelReader(text).read(); }

Model load_model_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(fmt::format("cannot open model '{}'", path));
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return load_model(buf.str());
  } catch (const DataError& e) {
    throw DataError(fmt::format("{}: {}", path, e.what()));
  }
}

}  // namespace cropdt
