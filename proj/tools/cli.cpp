#include "cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "cropdt/climate.hpp"
#include "cropdt/dataset.hpp"
#include "cropdt/error.hpp"
#include "cropdt/evaluation.hpp"
#include "cropdt/model_io.hpp"
#include "cropdt/report.hpp"
#include "cropdt/synthetic.hpp"
#include "cropdt/tree.hpp"

namespace cropdt::cli {

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Writes `content` to a sibling temp file and renames it over `path`, so a
/// failed command never leaves a partial output behind.
void write_atomically(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError(fmt::format("cannot write '{}'", path));
    out << content;
    out.flush();
    if (!out) {
      out.close();
      std::error_code ignored;
      fs::remove(tmp, ignored);
      throw DataError(fmt::format("cannot write '{}'", path));
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw DataError(fmt::format("cannot replace '{}'", path));
  }
}

void emit(const std::string& path, const std::string& content, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << content;
  } else {
    write_atomically(path, content);
  }
}

MissingPolicy policy_from(const std::string& text) {
  const auto policy = parse_missing_policy(text);
  if (!policy) throw UsageError(fmt::format("unknown missing policy '{}'", text));
  return *policy;
}

PatternTable patterns_from(const std::string& b3_pattern) {
  PatternTable table;
  if (!b3_pattern.empty()) {
    const auto pattern = parse_cropping_pattern(b3_pattern);
    if (!pattern) throw UsageError(fmt::format("unknown cropping pattern '{}'", b3_pattern));
    table.set(ClimateClass::B3, *pattern);
  }
  return table;
}

std::vector<StationYear> read_records(const std::string& path) {
  auto records = parse_rainfall_file(path);
  if (records.empty()) throw DataError(fmt::format("{}: no station rows", path));
  return records;
}

struct TrainOptions {
  std::string algorithm = "gainratio";
  std::optional<int> min_leaf;
  double confidence = 0.25;
  bool unpruned = false;
  std::optional<int> k;
  int prune_folds = 3;
  std::uint64_t seed = 1;
};

TrainParams params_from(const TrainOptions& o, const std::string& algorithm_name) {
  const auto algorithm = parse_algorithm(algorithm_name);
  if (!algorithm) throw UsageError(fmt::format("unknown algorithm '{}'", algorithm_name));
  TrainParams p;
  p.algorithm = *algorithm;
  p.min_leaf = o.min_leaf;
  p.confidence = o.confidence;
  p.unpruned = o.unpruned;
  p.k = o.k;
  p.prune_folds = o.prune_folds;
  p.seed = o.seed;
  try {
    p.validate(kMonths);
  } catch (const ContractError& e) {
    throw UsageError(e.what());
  }
  return p;
}

void add_train_flags(CLI::App* cmd, TrainOptions& o, bool with_algorithm) {
  if (with_algorithm) {
    cmd->add_option("--algorithm", o.algorithm,
                    "gainratio | randomsubset | reducederror (aliases j48, randomtree, reptree)")
        ->capture_default_str();
  }
  cmd->add_option("--min-leaf", o.min_leaf, "Minimum known weight per branch");
  cmd->add_option("--confidence", o.confidence, "Pruning confidence factor (gainratio)")
      ->capture_default_str();
  cmd->add_flag("--unpruned", o.unpruned, "Skip pessimistic pruning (gainratio)");
  cmd->add_option("--k", o.k, "Attributes drawn per node (randomsubset), default auto");
  cmd->add_option("--prune-folds", o.prune_folds, "Folds for the prune holdout (reducederror)")
      ->capture_default_str();
  cmd->add_option("--seed", o.seed, "Seed for every random choice")->capture_default_str();
}

int cmd_oldeman(const std::string& input, const std::string& output, const std::string& policy_text,
                const std::string& summary, const std::string& b3, std::ostream& out) {
  const MissingPolicy policy = policy_from(policy_text);
  const PatternTable patterns = patterns_from(b3);
  const auto records = read_records(input);
  const auto rows = label_rows(records, policy, patterns);

  std::ostringstream labels;
  write_label_rows(labels, rows);
  std::ostringstream counts;
  write_count_table(counts, count_by_type_region(label_dataset(records, policy)));

  if (!summary.empty()) write_atomically(summary, counts.str());
  emit(output, labels.str(), out);
  if (!output.empty() && output != "-") {
    out << fmt::format("labelled {} of {} stations\n", rows.size(), records.size());
    out << counts.str();
  }
  return kExitOk;
}

int cmd_train(const std::string& input, const std::string& output, const TrainOptions& options,
              const std::string& policy_text, bool print_tree, std::ostream& out) {
  const TrainParams params = params_from(options, options.algorithm);
  const MissingPolicy policy = policy_from(policy_text);
  const Dataset data = label_dataset(read_records(input), policy);
  const Model model = fit_model(data, params);
  const EvaluationReport fit = evaluate_holdout(model.tree, data);

  emit(output, save_model(model), out);
  out << fmt::format("algorithm: {}\n", to_string(params.algorithm));
  out << fmt::format("tree size: {}\n", tree_size(model.tree));
  out << fmt::format("training accuracy: {:.2f}% ({}/{})\n", fit.accuracy_pct,
                     fit.confusion.correct(), fit.confusion.total());
  if (print_tree) out << render_tree(model.tree, model.attribute_names, model.class_names);
  return kExitOk;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

int cmd_compare(const std::string& input, const std::string& test_path, const std::string& output,
                const std::string& algorithms, int folds, bool resubstitution,
                const TrainOptions& options, const std::string& policy_text, std::ostream& out) {
  if (folds < 2) throw UsageError("--cv needs at least 2 folds");
  std::vector<TrainParams> params;
  for (const auto& name : split_list(algorithms)) params.push_back(params_from(options, name));
  if (params.empty()) throw UsageError("no algorithms given");
  const MissingPolicy policy = policy_from(policy_text);

  const Dataset train_set = label_dataset(read_records(input), policy);
  if (!resubstitution && train_set.size() < static_cast<std::size_t>(folds)) {
    throw DataError(fmt::format("{} folds need at least as many stations, got {}", folds,
                                train_set.size()));
  }
  std::optional<Dataset> test_set;
  if (!test_path.empty()) test_set = label_dataset(read_records(test_path), policy);

  CompareOptions compare_options;
  compare_options.protocol = resubstitution ? Protocol::Resubstitution : Protocol::CrossValidation;
  compare_options.folds = static_cast<std::size_t>(folds);
  compare_options.seed = options.seed;
  std::ostringstream table;
  write_comparison(table, compare(params, train_set, test_set, compare_options));
  emit(output, table.str(), out);
  return kExitOk;
}

int cmd_recommend(const std::string& model_path, const std::string& input,
                  const std::string& output, bool complete_only, bool score,
                  const std::string& policy_text, const std::string& b3, std::ostream& out) {
  const MissingPolicy policy = policy_from(policy_text);
  const PatternTable patterns = patterns_from(b3);
  const Model model = load_model_file(model_path);
  check_pipeline_model(model);
  auto records = read_records(input);
  if (complete_only) std::erase_if(records, [](const StationYear& r) { return !r.complete(); });
  if (records.empty()) throw DataError("no complete stations to recommend for");

  const auto rows = recommend(model, records, false, patterns);
  std::ostringstream csv;
  write_recommendations(csv, rows);
  emit(output, csv.str(), out);

  const bool has_gold =
      score || std::any_of(records.begin(), records.end(), [](const auto& r) { return r.label.has_value(); });
  if (has_gold) {
    const EvaluationReport report = evaluate_holdout(model.tree, label_dataset(records, policy));
    out << fmt::format("holdout accuracy: {:.2f}% ({}/{})\n", report.accuracy_pct,
                       report.confusion.correct(), report.confusion.total());
  }
  return kExitOk;
}

int cmd_synth(const std::string& output, const SyntheticOptions& options, std::ostream& out) {
  std::ostringstream csv;
  write_rainfall(csv, synthetic_stations(options));
  emit(output, csv.str(), out);
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Oldeman climate labelling and decision-tree cropping-pattern recommendation"};
  app.name("cropdt");
  app.require_subcommand(1);

  std::string input;
  std::string output;
  std::string policy = "zero-fill";
  std::string b3;

  auto* oldeman = app.add_subcommand("oldeman", "Label stations with Oldeman climate types");
  std::string summary;
  oldeman->add_option("--input", input, "Rainfall CSV")->required();
  oldeman->add_option("--output", output, "Label CSV ('-' for stdout)")->required();
  oldeman->add_option("--missing-policy", policy, "zero-fill | skip | error")->capture_default_str();
  oldeman->add_option("--summary", summary, "Also write the climate-by-region counts here");
  oldeman->add_option("--b3-pattern", b3, "Cropping pattern text to use for B3");

  auto* train_cmd = app.add_subcommand("train", "Train and save a decision tree");
  TrainOptions train_options;
  bool print_tree = false;
  train_cmd->add_option("--input", input, "Rainfall CSV (optionally with climate_class)")->required();
  train_cmd->add_option("--output", output, "Model file")->required();
  train_cmd->add_option("--missing-policy", policy, "Labelling policy")->capture_default_str();
  train_cmd->add_flag("--print-tree", print_tree, "Print the tree after training");
  add_train_flags(train_cmd, train_options, true);

  auto* compare_cmd = app.add_subcommand("compare", "Compare learners on the five indicators");
  TrainOptions compare_options;
  std::string algorithms = "gainratio,randomsubset,reducederror";
  std::string test_path;
  int folds = 10;
  bool resubstitution = false;
  compare_cmd->add_option("--input", input, "Training rainfall CSV")->required();
  compare_cmd->add_option("--test", test_path, "Test rainfall CSV (adds two holdout tables)");
  compare_cmd->add_option("--output", output, "Comparison CSV (default stdout)");
  compare_cmd->add_option("--algorithms", algorithms, "Comma-separated list")->capture_default_str();
  compare_cmd->add_option("--cv", folds, "Cross-validation folds")->capture_default_str();
  compare_cmd->add_flag("--resubstitution", resubstitution, "Score on the training data instead");
  compare_cmd->add_option("--missing-policy", policy, "Labelling policy")->capture_default_str();
  add_train_flags(compare_cmd, compare_options, false);

  auto* recommend_cmd = app.add_subcommand("recommend", "Recommend cropping patterns with a model");
  std::string model_path;
  bool complete_only = false;
  bool score = false;
  recommend_cmd->add_option("--model", model_path, "Model file")->required();
  recommend_cmd->add_option("--input", input, "Rainfall CSV")->required();
  recommend_cmd->add_option("--output", output, "Recommendation CSV (default stdout)");
  recommend_cmd->add_flag("--complete-only", complete_only, "Drop stations with a missing month");
  recommend_cmd->add_flag("--score", score, "Score against Oldeman labels of the input");
  recommend_cmd->add_option("--missing-policy", policy, "Policy for --score labels")
      ->capture_default_str();
  recommend_cmd->add_option("--b3-pattern", b3, "Cropping pattern text to use for B3");

  auto* synth = app.add_subcommand("synth", "Write generated rainfall data");
  SyntheticOptions synth_options;
  synth->add_option("--output", output, "Rainfall CSV (default stdout)");
  synth->add_option("--stations", synth_options.stations)->capture_default_str();
  synth->add_option("--seed", synth_options.seed)->capture_default_str();
  synth->add_option("--year", synth_options.year)->capture_default_str();
  synth->add_option("--missing-rate", synth_options.missing_rate)->capture_default_str();
  synth->add_option("--empty-stations", synth_options.empty_stations)->capture_default_str();

  std::vector<std::string> argv_storage{"cropdt"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_storage) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*oldeman) return cmd_oldeman(input, output, policy, summary, b3, out);
    if (*train_cmd) return cmd_train(input, output, train_options, policy, print_tree, out);
    if (*compare_cmd) {
      return cmd_compare(input, test_path, output, algorithms, folds, resubstitution,
                         compare_options, policy, out);
    }
    if (*recommend_cmd) {
      return cmd_recommend(model_path, input, output, complete_only, score, policy, b3, out);
    }
    if (*synth) return cmd_synth(output, synth_options, out);
  } catch (const UsageError& e) {
    err << "cropdt: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DataError& e) {
    err << "cropdt: " << e.what() << '\n';
    return kExitData;
  } catch (const ContractError& e) {
    err << "cropdt: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace cropdt::cli
