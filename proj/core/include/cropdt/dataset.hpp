#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cropdt/climate.hpp"

namespace cropdt {

/// One station's monthly rainfall for one year, as read from a rainfall file.
struct StationYear {
  std::string station;
  std::string region;
  int year = 0;
  MonthlyRainfall rainfall{};
  /// Gold label from an optional trailing `climate_class` column.
  std::optional<ClimateClass> label;
  /// 1-based source line, 0 when not read from a file.
  std::size_t line = 0;

  bool complete() const;

  friend bool operator==(const StationYear& a, const StationYear& b) {
    return a.station == b.station && a.region == b.region && a.year == b.year &&
           a.rainfall == b.rainfall && a.label == b.label;
  }
};

using Features = std::vector<std::optional<double>>;

struct LabeledInstance {
  Features features;
  std::size_t label = 0;  // index into Dataset::class_names
  double weight = 1.0;
  std::string provenance;
  std::string region;
};

/// Attribute and class domains plus the labeled instances. The learners work
/// on any attribute count; the rainfall pipeline always uses the 12 months
/// and the 14 Oldeman classes.
struct Dataset {
  std::vector<std::string> attribute_names;
  std::vector<std::string> class_names;
  std::vector<LabeledInstance> instances;

  std::size_t size() const { return instances.size(); }
  bool empty() const { return instances.empty(); }
  std::size_t attribute_count() const { return attribute_names.size(); }
  std::size_t class_count() const { return class_names.size(); }

  /// Copy of the domains with the selected instances, in the given order.
  Dataset subset(const std::vector<std::size_t>& rows) const;
  /// Throws ContractError on labels outside the class domain, feature vectors
  /// of the wrong width, or non-positive weights.
  void validate() const;
};

std::vector<std::string> month_attribute_names();
std::vector<std::string> oldeman_class_names();

/// Parses the comma-separated rainfall grammar:
///   station,region,year,jan,...,dec[,climate_class]
/// `#` lines are comments, blank lines are ignored, empty cells are missing.
/// Throws DataError with the offending line number.
std::vector<StationYear> parse_rainfall(std::istream& in);
std::vector<StationYear> parse_rainfall_file(const std::string& path);

/// Inverse of parse_rainfall. Emits the climate_class column only when some
/// record carries a label.
void write_rainfall(std::ostream& out, const std::vector<StationYear>& records);

/// Oldeman-labels every record (a gold label on the record wins). Features
/// keep their missing months; only the label sees the policy. Records refused
/// under SkipStation are dropped. Throws DataError on an empty input or when
/// nothing survives.
Dataset label_dataset(const std::vector<StationYear>& records, MissingPolicy policy);

/// Feature-only view of a station-year for prediction.
Features to_features(const MonthlyRainfall& rainfall);

/// k disjoint, sorted index sets covering the dataset. Classes are shuffled
/// independently and dealt round-robin, so per-class counts across folds
/// differ by at most one. Throws ContractError when k < 2 or k > size.
std::vector<std::vector<std::size_t>> stratified_folds(const Dataset& dataset, std::size_t k,
                                                       std::uint64_t seed);

/// Climate type x region counts. Regions appear in first-seen order.
struct CountTable {
  std::vector<std::string> class_names;
  std::vector<std::string> regions;
  std::vector<std::vector<std::size_t>> counts;  // [class][region]

  std::size_t at(std::string_view cls, std::string_view region) const;
  std::size_t row_total(std::size_t cls) const;
  std::size_t column_total(std::size_t region) const;
  std::size_t total() const;
};

CountTable count_by_type_region(const Dataset& dataset);

}  // namespace cropdt
