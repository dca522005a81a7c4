#include "cropdt/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numeric>

#include <fmt/format.h>

#include "cropdt/error.hpp"
#include "cropdt/random.hpp"

namespace cropdt {

const std::array<std::string_view, kIndicatorCount> kIndicatorNames = {
    "Classification Accuracy (%)", "Kappa", "Mean absolute error", "Root mean square error",
    "Number of tree"};

ConfusionMatrix::ConfusionMatrix(std::size_t classes)
    : classes_(classes), counts_(classes * classes, 0) {}

void ConfusionMatrix::add(std::size_t actual, std::size_t predicted, std::uint64_t count) {
  if (actual >= classes_ || predicted >= classes_) {
    throw ContractError(fmt::format("class index outside a domain of {}", classes_));
  }
  counts_[actual * classes_ + predicted] += count;
}

std::uint64_t ConfusionMatrix::total() const {
  return std::accumulate(counts_.begin(), counts_.end(), std::uint64_t{0});
}

std::uint64_t ConfusionMatrix::correct() const {
  std::uint64_t sum = 0;
  for (std::size_t c = 0; c < classes_; ++c) sum += at(c, c);
  return sum;
}

std::uint64_t ConfusionMatrix::row_total(std::size_t actual) const {
  std::uint64_t sum = 0;
  for (std::size_t p = 0; p < classes_; ++p) sum += at(actual, p);
  return sum;
}

std::uint64_t ConfusionMatrix::column_total(std::size_t predicted) const {
  std::uint64_t sum = 0;
  for (std::size_t a = 0; a < classes_; ++a) sum += at(a, predicted);
  return sum;
}

bool ConfusionMatrix::diagonal() const { return correct() == total(); }

double accuracy(const ConfusionMatrix& confusion) {
  const auto total = confusion.total();
  if (total == 0) throw ContractError("accuracy of an empty confusion matrix");
  return 100.0 * static_cast<double>(confusion.correct()) / static_cast<double>(total);
}

std::optional<double> kappa(const ConfusionMatrix& confusion) {
  const auto total = static_cast<double>(confusion.total());
  if (total == 0) throw ContractError("kappa of an empty confusion matrix");
  const double observed = static_cast<double>(confusion.correct()) / total;
  double chance = 0.0;
  for (std::size_t c = 0; c < confusion.classes(); ++c) {
    chance += static_cast<double>(confusion.row_total(c)) *
              static_cast<double>(confusion.column_total(c));
  }
  chance /= total * total;
  if (chance >= 1.0) {
    if (confusion.diagonal()) return 1.0;
    return std::nullopt;
  }
  if (confusion.diagonal()) return 1.0;
  return (observed - chance) / (1.0 - chance);
}

ProbabilisticErrors probabilistic_errors(std::span<const Prediction> predictions,
                                         std::span<const std::size_t> actuals) {
  if (predictions.size() != actuals.size()) {
    throw ContractError(fmt::format("{} predictions for {} actual labels", predictions.size(),
                                    actuals.size()));
  }
  if (predictions.empty()) throw ContractError("no predictions to score");
  const std::size_t classes = predictions.front().distribution.size();
  double abs_sum = 0.0;
  double sq_sum = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const auto& dist = predictions[i].distribution;
    if (dist.size() != classes || actuals[i] >= classes) {
      throw ContractError("prediction does not match the class domain");
    }
    for (std::size_t c = 0; c < classes; ++c) {
      const double diff = dist[c] - (c == actuals[i] ? 1.0 : 0.0);
      abs_sum += std::abs(diff);
      sq_sum += diff * diff;
    }
  }
  const double cells = static_cast<double>(predictions.size() * classes);
  return {abs_sum / cells, std::sqrt(sq_sum / cells)};
}

EvaluationReport make_report(std::span<const Prediction> predictions,
                             std::span<const std::size_t> actuals, std::size_t classes,
                             std::size_t tree_size) {
  EvaluationReport report;
  report.confusion = ConfusionMatrix(classes);
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    report.confusion.add(actuals[i], predictions[i].predicted);
  }
  report.accuracy_pct = accuracy(report.confusion);
  report.kappa = kappa(report.confusion);
  const auto errors = probabilistic_errors(predictions, actuals);
  report.mean_absolute_error = errors.mean_absolute;
  report.root_mean_squared_error = errors.root_mean_squared;
  report.tree_size = tree_size;
  return report;
}

EvaluationReport cross_validate(const Dataset& dataset, const TrainParams& params, std::size_t k,
                                std::uint64_t seed) {
  params.validate(dataset.attribute_count());
  const auto folds = stratified_folds(dataset, k, seed);

  std::vector<Prediction> predictions(dataset.size());
  std::vector<std::future<void>> jobs;
  jobs.reserve(folds.size());
  for (std::size_t f = 0; f < folds.size(); ++f) {
    jobs.push_back(std::async(std::launch::async, [&, f] {
      std::vector<std::size_t> train_rows;
      std::vector<bool> held_out(dataset.size(), false);
      for (std::size_t r : folds[f]) held_out[r] = true;
      for (std::size_t r = 0; r < dataset.size(); ++r) {
        if (!held_out[r]) train_rows.push_back(r);
      }
      TrainParams fold_params = params;
      fold_params.seed = derive_seed(params.seed, f + 1);
      const DecisionTree model = train(dataset.subset(train_rows), fold_params);
      // Each fold writes only its own rows.
      for (std::size_t r : folds[f]) predictions[r] = model.predict(dataset.instances[r].features);
    }));
  }
  for (auto& job : jobs) job.get();

  std::vector<std::size_t> actuals;
  actuals.reserve(dataset.size());
  for (const auto& inst : dataset.instances) actuals.push_back(inst.label);
  const std::size_t size = tree_size(train(dataset, params));
  return make_report(predictions, actuals, dataset.class_count(), size);
}

EvaluationReport resubstitute(const Dataset& dataset, const TrainParams& params) {
  return evaluate_holdout(train(dataset, params), dataset);
}

EvaluationReport evaluate_holdout(const DecisionTree& model, const Dataset& test) {
  if (model.class_count() != test.class_count()) {
    throw ContractError(fmt::format("model has {} classes, test set has {}", model.class_count(),
                                    test.class_count()));
  }
  if (test.empty()) throw ContractError("empty test set");
  std::vector<Prediction> predictions;
  std::vector<std::size_t> actuals;
  predictions.reserve(test.size());
  actuals.reserve(test.size());
  for (const auto& inst : test.instances) {
    predictions.push_back(model.predict(inst.features));
    actuals.push_back(inst.label);
  }
  return make_report(predictions, actuals, test.class_count(), tree_size(model));
}

Dataset complete_subset(const Dataset& dataset) {
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const auto& f = dataset.instances[i].features;
    if (std::all_of(f.begin(), f.end(), [](const auto& v) { return v.has_value(); })) {
      rows.push_back(i);
    }
  }
  return dataset.subset(rows);
}

std::vector<ComparisonTable> compare(const std::vector<TrainParams>& algorithms,
                                     const Dataset& train_set, const std::optional<Dataset>& test,
                                     const CompareOptions& options) {
  if (algorithms.empty()) throw ContractError("no algorithms to compare");
  if (test && test->class_names != train_set.class_names) {
    throw ContractError("training and test class domains differ");
  }

  ComparisonTable on_train;
  on_train.title = options.protocol == Protocol::CrossValidation
                       ? fmt::format("cross-validation ({} folds, seed {})", options.folds,
                                     options.seed)
                       : std::string("resubstitution");
  for (const auto& params : algorithms) {
    on_train.algorithms.emplace_back(to_string(params.algorithm));
    on_train.reports.push_back(options.protocol == Protocol::CrossValidation
                                   ? cross_validate(train_set, params, options.folds, options.seed)
                                   : resubstitute(train_set, params));
  }
  std::vector<ComparisonTable> tables{std::move(on_train)};
  if (!test) return tables;

  const Dataset complete = complete_subset(*test);
  ComparisonTable all_rows{fmt::format("test: all stations ({})", test->size()), {}, {}};
  ComparisonTable complete_rows{fmt::format("test: complete stations ({})", complete.size()), {},
                                {}};
  for (const auto& params : algorithms) {
    const DecisionTree model = train(train_set, params);
    all_rows.algorithms.emplace_back(to_string(params.algorithm));
    all_rows.reports.push_back(evaluate_holdout(model, *test));
    if (!complete.empty()) {
      complete_rows.algorithms.emplace_back(to_string(params.algorithm));
      complete_rows.reports.push_back(evaluate_holdout(model, complete));
    }
  }
  tables.push_back(std::move(all_rows));
  if (!complete.empty()) tables.push_back(std::move(complete_rows));
  return tables;
}

}  // namespace cropdt
