#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cropdt/dataset.hpp"
#include "cropdt/tree.hpp"

namespace cropdt {

/// counts[actual][predicted] over a fixed class domain.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(std::size_t classes);

  void add(std::size_t actual, std::size_t predicted, std::uint64_t count = 1);

  std::size_t classes() const { return classes_; }
  std::uint64_t at(std::size_t actual, std::size_t predicted) const {
    return counts_.at(actual * classes_ + predicted);
  }
  std::uint64_t total() const;
  std::uint64_t correct() const;
  std::uint64_t row_total(std::size_t actual) const;
  std::uint64_t column_total(std::size_t predicted) const;
  bool diagonal() const;

  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;

 private:
  std::size_t classes_;
  std::vector<std::uint64_t> counts_;
};

/// 100 * correct / total. Throws ContractError on an empty matrix.
double accuracy(const ConfusionMatrix& confusion);

/// Cohen's kappa. Unset when chance agreement is 1 but observed agreement is
/// not (undefined); 1 when both are 1.
std::optional<double> kappa(const ConfusionMatrix& confusion);

struct ProbabilisticErrors {
  double mean_absolute = 0.0;
  double root_mean_squared = 0.0;
};

/// Errors of predicted distributions against one-hot actuals, averaged over
/// every (instance, class) cell.
ProbabilisticErrors probabilistic_errors(std::span<const Prediction> predictions,
                                         std::span<const std::size_t> actuals);

struct EvaluationReport {
  double accuracy_pct = 0.0;
  std::optional<double> kappa;
  double mean_absolute_error = 0.0;
  double root_mean_squared_error = 0.0;
  std::size_t tree_size = 0;
  ConfusionMatrix confusion{0};

  friend bool operator==(const EvaluationReport&, const EvaluationReport&) = default;
};

/// Builds a report from per-instance predictions.
EvaluationReport make_report(std::span<const Prediction> predictions,
                             std::span<const std::size_t> actuals, std::size_t classes,
                             std::size_t tree_size);

/// Stratified k-fold cross-validation. Folds run concurrently; the report
/// does not depend on scheduling. tree_size is taken from a model trained on
/// the whole dataset.
EvaluationReport cross_validate(const Dataset& dataset, const TrainParams& params, std::size_t k,
                                std::uint64_t seed);

/// Train and test on the same data.
EvaluationReport resubstitute(const Dataset& dataset, const TrainParams& params);

/// Throws ContractError when the tree's class domain differs from the test
/// set's, or the test set is empty.
EvaluationReport evaluate_holdout(const DecisionTree& model, const Dataset& test);

/// Test rows whose features are all present.
Dataset complete_subset(const Dataset& dataset);

inline constexpr std::size_t kIndicatorCount = 5;
extern const std::array<std::string_view, kIndicatorCount> kIndicatorNames;

/// One report per algorithm under a shared heading.
struct ComparisonTable {
  std::string title;
  std::vector<std::string> algorithms;
  std::vector<EvaluationReport> reports;
};

enum class Protocol : std::uint8_t { CrossValidation, Resubstitution };

struct CompareOptions {
  Protocol protocol = Protocol::CrossValidation;
  std::size_t folds = 10;
  std::uint64_t seed = 1;
};

/// Evaluates each algorithm on `train` (cross-validation or resubstitution).
/// With a test set, models trained on all of `train` are also scored on the
/// full test set and on its complete-feature subset, giving three tables.
std::vector<ComparisonTable> compare(const std::vector<TrainParams>& algorithms,
                                     const Dataset& train, const std::optional<Dataset>& test,
                                     const CompareOptions& options);

}  // namespace cropdt
