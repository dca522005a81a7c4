#include "cropdt/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <set>
#include <utility>

#include <fmt/format.h>

#include "cropdt/csv.hpp"
#include "cropdt/error.hpp"
#include "cropdt/random.hpp"

namespace cropdt {

namespace {

constexpr std::size_t kLeadingColumns = 3;  // station, region, year

std::vector<std::string> expected_header() {
  std::vector<std::string> header = {"station", "region", "year"};
  header.insert(header.end(), kMonthNames.begin(), kMonthNames.end());
  return header;
}

}  // namespace

bool StationYear::complete() const {
  return std::all_of(rainfall.begin(), rainfall.end(), [](const auto& v) { return v.has_value(); });
}

Dataset Dataset::subset(const std::vector<std::size_t>& rows) const {
  Dataset out;
  out.attribute_names = attribute_names;
  out.class_names = class_names;
  out.instances.reserve(rows.size());
  for (std::size_t r : rows) out.instances.push_back(instances.at(r));
  return out;
}

void Dataset::validate() const {
  for (std::size_t i = 0; i < instances.size(); ++i) {
    const auto& inst = instances[i];
    if (inst.label >= class_names.size()) {
      throw ContractError(fmt::format("instance {} has label {} outside a domain of {}", i,
                                      inst.label, class_names.size()));
    }
    if (inst.features.size() != attribute_names.size()) {
      throw ContractError(fmt::format("instance {} has {} features, expected {}", i,
                                      inst.features.size(), attribute_names.size()));
    }
    if (!(inst.weight > 0.0) || !std::isfinite(inst.weight)) {
      throw ContractError(fmt::format("instance {} has non-positive weight", i));
    }
  }
}

std::vector<std::string> month_attribute_names() {
  return {kMonthNames.begin(), kMonthNames.end()};
}

std::vector<std::string> oldeman_class_names() {
  std::vector<std::string> names;
  for (std::size_t c = 0; c < kClimateClassCount; ++c) {
    names.emplace_back(class_name(static_cast<ClimateClass>(c)));
  }
  return names;
}

std::vector<StationYear> parse_rainfall(std::istream& in) {
  const std::vector<std::string> header = expected_header();
  std::vector<StationYear> records;
  std::set<std::pair<std::string, int>> seen;
  bool have_header = false;
  bool with_labels = false;
  std::string raw;
  std::size_t line_no = 0;

  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = chomp(raw);
    if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.remove_prefix(3);
    if (trim(line).empty() || line.front() == '#') continue;

    auto cells = split_csv_line(line);
    if (!cells) throw DataError("unterminated quoted cell", line_no);

    if (!have_header) {
      std::vector<std::string> names;
      for (const auto& c : *cells) names.emplace_back(trim(c));
      with_labels = names.size() == header.size() + 1 && names.back() == "climate_class";
      if (with_labels) names.pop_back();
      if (names != header) {
        throw DataError(fmt::format("malformed header, expected '{}[,climate_class]'",
                                    fmt::join(header, ",")),
                        line_no);
      }
      have_header = true;
      continue;
    }

    const std::size_t width = header.size() + (with_labels ? 1 : 0);
    if (cells->size() != width) {
      throw DataError(fmt::format("expected {} cells, got {}", width, cells->size()), line_no);
    }

    StationYear rec;
    rec.line = line_no;
    rec.station = std::string(trim((*cells)[0]));
    rec.region = std::string(trim((*cells)[1]));
    if (rec.station.empty()) throw DataError("empty station name", line_no);
    const auto year = parse_integer((*cells)[2]);
    if (!year) throw DataError(fmt::format("non-numeric year '{}'", (*cells)[2]), line_no);
    rec.year = static_cast<int>(*year);

    for (std::size_t m = 0; m < kMonths; ++m) {
      const std::string& cell = (*cells)[kLeadingColumns + m];
      if (trim(cell).empty()) continue;
      const auto value = parse_double(cell);
      if (!value || !std::isfinite(*value)) {
        throw DataError(fmt::format("station '{}': non-numeric {} cell '{}'", rec.station,
                                    kMonthNames[m], cell),
                        line_no);
      }
      if (*value < 0.0) {
        throw DataError(fmt::format("station '{}': negative {} rainfall {}", rec.station,
                                    kMonthNames[m], cell),
                        line_no);
      }
      rec.rainfall[m] = *value;
    }

    if (with_labels) {
      const std::string_view cell = trim(cells->back());
      if (!cell.empty()) {
        rec.label = parse_climate_class(cell);
        if (!rec.label) {
          throw DataError(fmt::format("station '{}': unknown climate class '{}'", rec.station, cell),
                          line_no);
        }
      }
    }

    if (!seen.emplace(rec.station, rec.year).second) {
      throw DataError(fmt::format("duplicate station '{}' for year {}", rec.station, rec.year),
                      line_no);
    }
    records.push_back(std::move(rec));
  }
  if (!have_header) throw DataError("missing header", line_no == 0 ? 1 : line_no);
  return records;
}

std::vector<StationYear> parse_rainfall_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(fmt::format("cannot open '{}'", path));
  try {
    return parse_rainfall(in);
  } catch (const DataError& e) {
    throw DataError(fmt::format("{}: {}", path, e.what()));
  }
}

void write_rainfall(std::ostream& out, const std::vector<StationYear>& records) {
  const bool with_labels =
      std::any_of(records.begin(), records.end(), [](const auto& r) { return r.label.has_value(); });
  out << fmt::format("{}", fmt::join(expected_header(), ","));
  if (with_labels) out << ",climate_class";
  out << '\n';
  for (const auto& r : records) {
    out << csv_cell(r.station) << ',' << csv_cell(r.region) << ',' << r.year;
    for (const auto& v : r.rainfall) {
      out << ',';
      if (v) out << format_shortest(*v);
    }
    if (with_labels) {
      out << ',';
      if (r.label) out << class_name(*r.label);
    }
    out << '\n';
  }
}

Features to_features(const MonthlyRainfall& rainfall) {
  return Features(rainfall.begin(), rainfall.end());
}

Dataset label_dataset(const std::vector<StationYear>& records, MissingPolicy policy) {
  if (records.empty()) throw DataError("no station records to label");
  Dataset out;
  out.attribute_names = month_attribute_names();
  out.class_names = oldeman_class_names();
  out.instances.reserve(records.size());
  for (const auto& rec : records) {
    std::optional<ClimateClass> cls = rec.label;
    if (!cls) {
      try {
        const auto type = classify_oldeman(rec.rainfall, policy, rec.station);
        if (!type) continue;
        cls = to_class(*type);
      } catch (const DataError& e) {
        throw DataError(e.what(), rec.line);
      }
    }
    LabeledInstance inst;
    inst.features = to_features(rec.rainfall);
    inst.label = static_cast<std::size_t>(*cls);
    inst.provenance = fmt::format("{}/{}", rec.station, rec.year);
    inst.region = rec.region;
    out.instances.push_back(std::move(inst));
  }
  if (out.instances.empty()) {
    throw DataError(fmt::format("no station survived the '{}' missing-data policy",
                                to_string(policy)));
  }
  return out;
}

std::vector<std::vector<std::size_t>> stratified_folds(const Dataset& dataset, std::size_t k,
                                                       std::uint64_t seed) {
  if (k < 2 || k > dataset.size()) {
    throw ContractError(
        fmt::format("cannot make {} folds from {} instances", k, dataset.size()));
  }
  std::map<std::size_t, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    by_class[dataset.instances[i].label].push_back(i);
  }

  std::vector<std::vector<std::size_t>> folds(k);
  std::size_t next = 0;
  for (auto& [cls, rows] : by_class) {
    Rng rng(derive_seed(seed, cls));
    rng.shuffle(std::span<std::size_t>(rows));
    for (std::size_t r : rows) {
      folds[next].push_back(r);
      next = (next + 1) % k;
    }
  }
  for (auto& f : folds) std::sort(f.begin(), f.end());
  return folds;
}

std::size_t CountTable::at(std::string_view cls, std::string_view region) const {
  const auto c = std::find(class_names.begin(), class_names.end(), cls);
  const auto r = std::find(regions.begin(), regions.end(), region);
  if (c == class_names.end() || r == regions.end()) return 0;
  return counts[static_cast<std::size_t>(c - class_names.begin())]
               [static_cast<std::size_t>(r - regions.begin())];
}

std::size_t CountTable::row_total(std::size_t cls) const {
  return std::accumulate(counts.at(cls).begin(), counts.at(cls).end(), std::size_t{0});
}

std::size_t CountTable::column_total(std::size_t region) const {
  std::size_t sum = 0;
  for (const auto& row : counts) sum += row.at(region);
  return sum;
}

std::size_t CountTable::total() const {
  std::size_t sum = 0;
  for (std::size_t c = 0; c < counts.size(); ++c) sum += row_total(c);
  return sum;
}

CountTable count_by_type_region(const Dataset& dataset) {
  CountTable table;
  table.class_names = dataset.class_names;
  for (const auto& inst : dataset.instances) {
    if (std::find(table.regions.begin(), table.regions.end(), inst.region) == table.regions.end()) {
      table.regions.push_back(inst.region);
    }
  }
  table.counts.assign(table.class_names.size(), std::vector<std::size_t>(table.regions.size(), 0));
  for (const auto& inst : dataset.instances) {
    const auto r = static_cast<std::size_t>(
        std::find(table.regions.begin(), table.regions.end(), inst.region) - table.regions.begin());
    ++table.counts.at(inst.label)[r];
  }
  return table;
}

}  // namespace cropdt
