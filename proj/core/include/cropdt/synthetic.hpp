#pragma once

// Generated rainfall with well-separated regimes, for tests, benchmarks and
// demo data. Each regime is a fixed wet/moist/dry month pattern and owns a
// narrow slice of every category band, so all stations of a regime share one
// Oldeman type and regimes differ in every month.

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "cropdt/climate.hpp"
#include "cropdt/dataset.hpp"

namespace cropdt {

struct Regime {
  std::string name;
  std::array<MonthCategory, kMonths> months;
};

/// Seven regimes typed A1, A2, B2, B3, C3, C4 and E4.
const std::vector<Regime>& default_regimes();

struct SyntheticOptions {
  std::size_t stations = 75;
  std::uint64_t seed = 1;
  int year = 2013;
  /// Probability that any single month is blanked out.
  double missing_rate = 0.0;
  /// Number of stations with every month missing, placed last.
  std::size_t empty_stations = 0;
};

/// Stations cycle through the regimes; the first 15% are tagged
/// "DKI Jakarta", the rest "Banten".
std::vector<StationYear> synthetic_stations(const SyntheticOptions& options,
                                            const std::vector<Regime>& regimes = default_regimes());

}  // namespace cropdt
