#pragma once

// Oldeman agro-climate typing and the climate-to-cropping-pattern table.
//
// A month is Wet at >= 200 mm, Dry below 100 mm, Moist in between. The climate
// letter comes from the longest run of consecutive wet months, the subtype
// digit from the longest run of consecutive dry months. Runs never wrap from
// December to January.

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace cropdt {

inline constexpr std::size_t kMonths = 12;

inline constexpr std::array<std::string_view, kMonths> kMonthNames = {
    "jan", "feb", "mar", "apr", "may", "jun", "jul", "aug", "sep", "oct", "nov", "dec"};

/// Twelve monthly rainfall totals in millimeters; an empty slot is a missing month.
using MonthlyRainfall = std::array<std::optional<double>, kMonths>;

inline constexpr double kWetThresholdMm = 200.0;
inline constexpr double kDryThresholdMm = 100.0;

enum class MonthCategory : std::uint8_t { Dry, Moist, Wet };

enum class MissingPolicy : std::uint8_t {
  ZeroFill,     // missing month counts as 0 mm, i.e. Dry
  SkipStation,  // station with any missing month gets no label
  Error,        // missing month is a data error
};

std::string_view to_string(MissingPolicy policy);
std::optional<MissingPolicy> parse_missing_policy(std::string_view text);

struct RunSummary {
  int longest_wet = 0;
  int longest_dry = 0;

  friend bool operator==(const RunSummary&, const RunSummary&) = default;
};

/// Letter A..E plus subtype 1..4.
class ClimateType {
 public:
  /// Throws ContractError for combinations outside A1-A2, B1-B3, C1-C4, D1-D4, E1-E4.
  ClimateType(char letter, int subtype);

  char letter() const noexcept { return letter_; }
  int subtype() const noexcept { return subtype_; }

  /// "B2"; E types keep their digit here.
  std::string to_string() const;
  /// Like to_string() but every E subtype renders as plain "E".
  std::string collapsed() const;

  friend auto operator<=>(const ClimateType&, const ClimateType&) = default;

 private:
  char letter_;
  int subtype_;
};

/// The fixed 14-entry class domain used for datasets and models. All E
/// subtypes share one class.
enum class ClimateClass : std::uint8_t { A1, A2, B1, B2, B3, C1, C2, C3, C4, D1, D2, D3, D4, E };

inline constexpr std::size_t kClimateClassCount = 14;

std::string_view class_name(ClimateClass cls);
/// Accepts the 14 class names plus "E1".."E4".
std::optional<ClimateClass> parse_climate_class(std::string_view text);
ClimateClass to_class(const ClimateType& type);
/// Representative type for a class; E maps to E1.
ClimateType representative_type(ClimateClass cls);

enum class CroppingPattern : std::uint8_t {
  ThreeShortPaddyOrTwoPaddyOneCgprt,
  TwoPaddyOneCgprt,
  OnePaddyTwoCgprt,
  OnePaddyOneCgprt,
  OnePaddyOrOneCgprt,
  OneCgprt,
};

inline constexpr std::size_t kCroppingPatternCount = 6;

std::string_view display(CroppingPattern pattern);
std::optional<CroppingPattern> parse_cropping_pattern(std::string_view text);

MonthCategory categorize_month(double rainfall_mm);

RunSummary run_summary(std::span<const MonthCategory> months);

/// Letter and subtype for a pair of run lengths. Requires wet + dry <= 12.
ClimateType climate_type_from_runs(const RunSummary& runs);

/// Returns nullopt only under MissingPolicy::SkipStation when a month is
/// missing. Throws DataError for negative or non-finite rainfall, and for a
/// missing month under MissingPolicy::Error; `station` names the record in
/// the message.
std::optional<ClimateType> classify_oldeman(const MonthlyRainfall& rainfall, MissingPolicy policy,
                                            std::string_view station = {});

/// Climate-to-pattern lookup. The default table follows the Oldeman
/// recommendations and fills the missing B3 row with the B2 pattern; any
/// class can be overridden.
class PatternTable {
 public:
  PatternTable();

  CroppingPattern lookup(ClimateClass cls) const { return table_[static_cast<std::size_t>(cls)]; }
  CroppingPattern lookup(const ClimateType& type) const { return lookup(to_class(type)); }

  void set(ClimateClass cls, CroppingPattern pattern) {
    table_[static_cast<std::size_t>(cls)] = pattern;
  }

 private:
  std::array<CroppingPattern, kClimateClassCount> table_;
};

CroppingPattern cropping_pattern(const ClimateType& type);
CroppingPattern cropping_pattern(ClimateClass cls);

}  // namespace cropdt
