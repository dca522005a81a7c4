#include "cropdt/report.hpp"

#include <istream>
#include <ostream>

#include <fmt/format.h>

#include "cropdt/csv.hpp"
#include "cropdt/error.hpp"

namespace cropdt {

namespace {

std::string indicator_cell(const EvaluationReport& r, std::size_t indicator) {
  switch (indicator) {
    case 0: return fmt::format("{:.2f}", r.accuracy_pct);
    case 1: return r.kappa ? fmt::format("{:.4f}", *r.kappa) : std::string("undefined");
    case 2: return fmt::format("{:.4f}", r.mean_absolute_error);
    case 3: return fmt::format("{:.4f}", r.root_mean_squared_error);
    default: return std::to_string(r.tree_size);
  }
}

}  // namespace

std::vector<LabelRow> label_rows(const std::vector<StationYear>& records, MissingPolicy policy,
                                 const PatternTable& patterns) {
  std::vector<LabelRow> rows;
  for (const auto& rec : records) {
    std::optional<ClimateType> type;
    try {
      type = classify_oldeman(rec.rainfall, policy, rec.station);
    } catch (const DataError& e) {
      throw DataError(e.what(), rec.line);
    }
    if (!type) continue;
    rows.push_back({rec.station, rec.region, rec.year, *type, patterns.lookup(*type)});
  }
  return rows;
}

void write_label_rows(std::ostream& out, const std::vector<LabelRow>& rows) {
  out << "station,region,year,climate_class,cropping_pattern\n";
  for (const auto& r : rows) {
    out << csv_cell(r.station) << ',' << csv_cell(r.region) << ',' << r.year << ','
        << r.climate.to_string() << ',' << csv_quoted(display(r.pattern)) << '\n';
  }
}

void write_count_table(std::ostream& out, const CountTable& table) {
  out << "climate_type";
  for (const auto& region : table.regions) out << ',' << csv_cell(region);
  out << ",total\n";
  for (std::size_t c = 0; c < table.class_names.size(); ++c) {
    out << table.class_names[c];
    for (std::size_t r = 0; r < table.regions.size(); ++r) out << ',' << table.counts[c][r];
    out << ',' << table.row_total(c) << '\n';
  }
  out << "total";
  for (std::size_t r = 0; r < table.regions.size(); ++r) out << ',' << table.column_total(r);
  out << ',' << table.total() << '\n';
}

void write_comparison(std::ostream& out, const std::vector<ComparisonTable>& tables) {
  bool first = true;
  for (const auto& t : tables) {
    if (!first) out << '\n';
    first = false;
    out << "# " << t.title << '\n';
    out << "indicator";
    for (const auto& a : t.algorithms) out << ',' << csv_cell(a);
    out << '\n';
    for (std::size_t i = 0; i < kIndicatorCount; ++i) {
      out << csv_cell(kIndicatorNames[i]);
      for (const auto& r : t.reports) out << ',' << indicator_cell(r, i);
      out << '\n';
    }
  }
}

std::vector<ParsedComparison> parse_comparison(std::istream& in) {
  std::vector<ParsedComparison> tables;
  std::string raw;
  std::size_t line_no = 0;
  ParsedComparison* current = nullptr;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = chomp(raw);
    if (trim(line).empty()) {
      current = nullptr;
      continue;
    }
    if (line.starts_with("# ")) {
      tables.push_back({std::string(line.substr(2)), {}, {}, {}});
      current = nullptr;
      continue;
    }
    const auto cells = split_csv_line(line);
    if (!cells || cells->size() < 2) throw DataError("malformed comparison row", line_no);
    if (!current) {
      if (tables.empty() || !tables.back().algorithms.empty() || cells->front() != "indicator") {
        throw DataError("expected a '# title' line and an 'indicator,...' header", line_no);
      }
      current = &tables.back();
      current->algorithms.assign(cells->begin() + 1, cells->end());
      continue;
    }
    if (cells->size() != current->algorithms.size() + 1) {
      throw DataError("row width does not match the header", line_no);
    }
    current->indicators.push_back(cells->front());
    current->cells.emplace_back(cells->begin() + 1, cells->end());
  }
  for (const auto& t : tables) {
    if (t.indicators.size() != kIndicatorCount) {
      throw DataError(fmt::format("table '{}' has {} indicator rows", t.title, t.indicators.size()));
    }
    for (std::size_t i = 0; i < kIndicatorCount; ++i) {
      if (t.indicators[i] != kIndicatorNames[i]) {
        throw DataError(fmt::format("unexpected indicator '{}'", t.indicators[i]));
      }
    }
  }
  return tables;
}

void check_pipeline_model(const Model& model) {
  if (model.attribute_names != month_attribute_names()) {
    throw DataError("model attributes are not the twelve months jan..dec");
  }
  if (model.class_names != oldeman_class_names()) {
    throw DataError("model classes are not the Oldeman climate classes");
  }
}

std::vector<RecommendationRow> recommend(const Model& model,
                                         const std::vector<StationYear>& records,
                                         bool complete_only, const PatternTable& patterns) {
  check_pipeline_model(model);
  std::vector<RecommendationRow> rows;
  for (const auto& rec : records) {
    const bool complete = rec.complete();
    if (complete_only && !complete) continue;
    const auto features = to_features(rec.rainfall);
    const auto cls = static_cast<ClimateClass>(model.tree.predict(features).predicted);
    rows.push_back({rec.station, rec.region, rec.year, cls, patterns.lookup(cls), complete});
  }
  return rows;
}

void write_recommendations(std::ostream& out, const std::vector<RecommendationRow>& rows) {
  out << "station,region,year,climate_class,cropping_pattern,data\n";
  for (const auto& r : rows) {
    out << csv_cell(r.station) << ',' << csv_cell(r.region) << ',' << r.year << ','
        << class_name(r.climate) << ',' << csv_quoted(display(r.pattern)) << ','
        << (r.complete ? "complete" : "incomplete") << '\n';
  }
}

}  // namespace cropdt
