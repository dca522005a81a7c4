#include "cropdt/climate.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <fmt/format.h>

#include "cropdt/error.hpp"

namespace cropdt {

namespace {

constexpr std::array<std::string_view, kClimateClassCount> kClassNames = {
    "A1", "A2", "B1", "B2", "B3", "C1", "C2", "C3", "C4", "D1", "D2", "D3", "D4", "E"};

constexpr std::array<std::string_view, kCroppingPatternCount> kPatternText = {
    "3 short-period PS or 2 PS + 1 PL",
    "2 PS + 1 PL",
    "1 PS + 2 PL",
    "1 PS + 1 PL",
    "1 PS or 1 PL",
    "1 PL",
};

int max_subtype(char letter) {
  switch (letter) {
    case 'A': return 2;
    case 'B': return 3;
    case 'C':
    case 'D':
    case 'E': return 4;
    default: return 0;
  }
}

}  // namespace

std::string_view to_string(MissingPolicy policy) {
  switch (policy) {
    case MissingPolicy::ZeroFill: return "zero-fill";
    case MissingPolicy::SkipStation: return "skip";
    case MissingPolicy::Error: return "error";
  }
  return "?";
}

std::optional<MissingPolicy> parse_missing_policy(std::string_view text) {
  if (text == "zero-fill") return MissingPolicy::ZeroFill;
  if (text == "skip") return MissingPolicy::SkipStation;
  if (text == "error") return MissingPolicy::Error;
  return std::nullopt;
}

ClimateType::ClimateType(char letter, int subtype) : letter_(letter), subtype_(subtype) {
  if (subtype < 1 || subtype > max_subtype(letter)) {
    throw ContractError(fmt::format("unreachable climate type {}{}", letter, subtype));
  }
}

std::string ClimateType::to_string() const { return fmt::format("{}{}", letter_, subtype_); }

std::string ClimateType::collapsed() const {
  return letter_ == 'E' ? std::string("E") : to_string();
}

std::string_view class_name(ClimateClass cls) { return kClassNames[static_cast<std::size_t>(cls)]; }

std::optional<ClimateClass> parse_climate_class(std::string_view text) {
  for (std::size_t i = 0; i < kClassNames.size(); ++i) {
    if (kClassNames[i] == text) return static_cast<ClimateClass>(i);
  }
  if (text.size() == 2 && text[0] == 'E' && text[1] >= '1' && text[1] <= '4') {
    return ClimateClass::E;
  }
  return std::nullopt;
}

ClimateClass to_class(const ClimateType& type) {
  if (type.letter() == 'E') return ClimateClass::E;
  // A1,A2 | B1..B3 | C1..C4 | D1..D4 are laid out contiguously.
  std::size_t offset = 0;
  switch (type.letter()) {
    case 'A': offset = 0; break;
    case 'B': offset = 2; break;
    case 'C': offset = 5; break;
    case 'D': offset = 9; break;
  }
  return static_cast<ClimateClass>(offset + static_cast<std::size_t>(type.subtype() - 1));
}

ClimateType representative_type(ClimateClass cls) {
  if (cls == ClimateClass::E) return ClimateType('E', 1);
  const std::string_view name = class_name(cls);
  return ClimateType(name[0], name[1] - '0');
}

std::string_view display(CroppingPattern pattern) {
  return kPatternText[static_cast<std::size_t>(pattern)];
}

std::optional<CroppingPattern> parse_cropping_pattern(std::string_view text) {
  for (std::size_t i = 0; i < kPatternText.size(); ++i) {
    if (kPatternText[i] == text) return static_cast<CroppingPattern>(i);
  }
  return std::nullopt;
}

MonthCategory categorize_month(double rainfall_mm) {
  if (!std::isfinite(rainfall_mm) || rainfall_mm < 0.0) {
    throw DataError(fmt::format("invalid rainfall value {}", rainfall_mm));
  }
  if (rainfall_mm >= kWetThresholdMm) return MonthCategory::Wet;
  if (rainfall_mm < kDryThresholdMm) return MonthCategory::Dry;
  return MonthCategory::Moist;
}

RunSummary run_summary(std::span<const MonthCategory> months) {
  if (months.size() != kMonths) {
    throw ContractError(fmt::format("run_summary needs {} months, got {}", kMonths, months.size()));
  }
  RunSummary out;
  int wet = 0;
  int dry = 0;
  for (MonthCategory m : months) {
    wet = m == MonthCategory::Wet ? wet + 1 : 0;
    dry = m == MonthCategory::Dry ? dry + 1 : 0;
    out.longest_wet = std::max(out.longest_wet, wet);
    out.longest_dry = std::max(out.longest_dry, dry);
  }
  return out;
}

ClimateType climate_type_from_runs(const RunSummary& runs) {
  const int wet = runs.longest_wet;
  const int dry = runs.longest_dry;
  if (wet < 0 || dry < 0 || wet + dry > static_cast<int>(kMonths)) {
    throw ContractError(fmt::format("impossible run lengths wet={} dry={}", wet, dry));
  }
  char letter = 'E';
  if (wet >= 9) {
    letter = 'A';
  } else if (wet >= 7) {
    letter = 'B';
  } else if (wet >= 5) {
    letter = 'C';
  } else if (wet >= 3) {
    letter = 'D';
  }
  int subtype = 4;
  if (dry <= 1) {
    subtype = 1;
  } else if (dry <= 3) {
    subtype = 2;
  } else if (dry <= 6) {
    subtype = 3;
  }
  return ClimateType(letter, subtype);
}

std::optional<ClimateType> classify_oldeman(const MonthlyRainfall& rainfall, MissingPolicy policy,
                                            std::string_view station) {
  const auto where = [&](std::size_t month) {
    return station.empty() ? fmt::format("month {}", kMonthNames[month])
                           : fmt::format("station '{}', month {}", station, kMonthNames[month]);
  };

  std::array<MonthCategory, kMonths> categories{};
  for (std::size_t m = 0; m < kMonths; ++m) {
    if (!rainfall[m]) {
      switch (policy) {
        case MissingPolicy::ZeroFill: categories[m] = MonthCategory::Dry; continue;
        case MissingPolicy::SkipStation: return std::nullopt;
        case MissingPolicy::Error: throw DataError(fmt::format("{}: missing rainfall", where(m)));
      }
    }
    const double mm = *rainfall[m];
    if (!std::isfinite(mm) || mm < 0.0) {
      throw DataError(fmt::format("{}: invalid rainfall value {}", where(m), mm));
    }
    categories[m] = categorize_month(mm);
  }
  return climate_type_from_runs(run_summary(categories));
}

PatternTable::PatternTable() {
  using P = CroppingPattern;
  using C = ClimateClass;
  const auto put = [this](C cls, P pattern) { set(cls, pattern); };
  put(C::A1, P::ThreeShortPaddyOrTwoPaddyOneCgprt);
  put(C::A2, P::ThreeShortPaddyOrTwoPaddyOneCgprt);
  put(C::B1, P::ThreeShortPaddyOrTwoPaddyOneCgprt);
  put(C::B2, P::TwoPaddyOneCgprt);
  put(C::B3, P::TwoPaddyOneCgprt);  // no published row; nearest is B2
  put(C::C1, P::OnePaddyTwoCgprt);
  put(C::C2, P::OnePaddyOneCgprt);
  put(C::C3, P::OnePaddyOneCgprt);
  put(C::C4, P::OnePaddyOneCgprt);
  put(C::D1, P::OnePaddyOneCgprt);
  put(C::D2, P::OnePaddyOrOneCgprt);
  put(C::D3, P::OnePaddyOrOneCgprt);
  put(C::D4, P::OnePaddyOrOneCgprt);
  put(C::E, P::OneCgprt);
}

CroppingPattern cropping_pattern(const ClimateType& type) { return PatternTable().lookup(type); }

CroppingPattern cropping_pattern(ClimateClass cls) { return PatternTable().lookup(cls); }

}  // namespace cropdt
