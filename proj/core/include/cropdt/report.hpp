#pragma once

// CSV reports: Oldeman labels, climate-by-region counts, algorithm
// comparisons and cropping-pattern recommendations.

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cropdt/climate.hpp"
#include "cropdt/dataset.hpp"
#include "cropdt/evaluation.hpp"
#include "cropdt/model_io.hpp"

namespace cropdt {

struct LabelRow {
  std::string station;
  std::string region;
  int year = 0;
  ClimateType climate;
  CroppingPattern pattern;
};

/// Oldeman type and pattern per record; records refused by the policy are left out.
std::vector<LabelRow> label_rows(const std::vector<StationYear>& records, MissingPolicy policy,
                                 const PatternTable& patterns = {});

/// `station,region,year,climate_class,cropping_pattern`, the pattern always quoted.
void write_label_rows(std::ostream& out, const std::vector<LabelRow>& rows);

/// `climate_type,<region>...,total` with one row per class and a total row.
void write_count_table(std::ostream& out, const CountTable& table);

/// Each table as a `# <title>` line, an `indicator,<algorithm>...` header and
/// the five indicator rows; tables are separated by a blank line.
void write_comparison(std::ostream& out, const std::vector<ComparisonTable>& tables);

struct ParsedComparison {
  std::string title;
  std::vector<std::string> algorithms;
  std::vector<std::string> indicators;
  std::vector<std::vector<std::string>> cells;  // [indicator][algorithm]
};

/// Reads write_comparison() output back. Throws DataError on a bad shape.
std::vector<ParsedComparison> parse_comparison(std::istream& in);

struct RecommendationRow {
  std::string station;
  std::string region;
  int year = 0;
  ClimateClass climate = ClimateClass::A1;
  CroppingPattern pattern = CroppingPattern::OneCgprt;
  bool complete = true;
};

/// Throws DataError unless the model uses the 12 month attributes and the
/// 14 Oldeman classes.
void check_pipeline_model(const Model& model);

/// Predicted climate class and pattern per station. With `complete_only`
/// stations with a missing month are dropped.
std::vector<RecommendationRow> recommend(const Model& model,
                                         const std::vector<StationYear>& records,
                                         bool complete_only, const PatternTable& patterns = {});

/// `station,region,year,climate_class,cropping_pattern,data`, where data is
/// `complete` or `incomplete`.
void write_recommendations(std::ostream& out, const std::vector<RecommendationRow>& rows);

}  // namespace cropdt
