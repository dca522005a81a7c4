#include "cropdt/synthetic.hpp"

#include <cmath>

#include <fmt/format.h>

#include "cropdt/random.hpp"

namespace cropdt {

namespace {

std::array<MonthCategory, kMonths> pattern(std::string_view text) {
  std::array<MonthCategory, kMonths> out{};
  for (std::size_t m = 0; m < kMonths; ++m) {
    out[m] = text[m] == 'W' ? MonthCategory::Wet
             : text[m] == 'M' ? MonthCategory::Moist
                              : MonthCategory::Dry;
  }
  return out;
}

double draw(Rng& rng, MonthCategory category, std::size_t regime, std::size_t regimes) {
  // Each regime owns a narrow slice of the category band, so regimes differ
  // in every month, not only where their categories differ.
  double lo = 5.0;
  double hi = 95.0;
  if (category == MonthCategory::Wet) {
    lo = 210.0;
    hi = 450.0;
  } else if (category == MonthCategory::Moist) {
    lo = 110.0;
    hi = 190.0;
  }
  const double step = (hi - lo) / static_cast<double>(regimes);
  const double centre = lo + (static_cast<double>(regime) + 0.5) * step;
  const double value = centre + (rng.uniform() - 0.5) * 0.6 * step;
  // One decimal place, like gauge reports.
  return std::round(value * 10.0) / 10.0;
}

}  // namespace

const std::vector<Regime>& default_regimes() {
  static const std::vector<Regime> regimes = {
      {"A1", pattern("WWWWWWWWWWWW")}, {"A2", pattern("WWWWWWWWWWDD")},
      {"B2", pattern("MWWWWWWWDDDM")}, {"B3", pattern("WWWWWWWWDDDD")},
      {"C3", pattern("WWWWWMDDDDDM")}, {"C4", pattern("WWWWWDDDDDDD")},
      {"E4", pattern("DDDDDDDDDDDD")},
  };
  return regimes;
}

std::vector<StationYear> synthetic_stations(const SyntheticOptions& options,
                                            const std::vector<Regime>& regimes) {
  Rng rng(options.seed);
  std::vector<StationYear> out;
  out.reserve(options.stations);
  const std::size_t dki = (options.stations * 15 + 99) / 100;
  for (std::size_t i = 0; i < options.stations; ++i) {
    StationYear rec;
    rec.station = fmt::format("S{:03}", i + 1);
    rec.region = i < dki ? "DKI Jakarta" : "Banten";
    rec.year = options.year;
    const bool empty = i + options.empty_stations >= options.stations;
    const Regime& regime = regimes[i % regimes.size()];
    for (std::size_t m = 0; m < kMonths; ++m) {
      const double value = draw(rng, regime.months[m], i % regimes.size(), regimes.size());
      const bool blank = empty || (options.missing_rate > 0.0 && rng.uniform() < options.missing_rate);
      if (!blank) rec.rainfall[m] = value;
    }
    out.push_back(std::move(rec));
  }
  return out;
}

}  // namespace cropdt
