#pragma once

// Synthetic-model preset fit to published per-region azimuth errors.
// Values come from scripts/fit_synthetic_model.py, which solves for the blur
// SD and flip probability of each region so that the closed-form expected
// circular and adjusted errors (12 deg bins) match the reference means.

#include <array>
#include <string_view>

#include "audioplace/confusion_model.hpp"

namespace audioplace {

struct RegionErrorReference {
  std::string_view name;
  double circular_mean_deg;
  double circular_sd_deg;
  double adjusted_mean_deg;
  double adjusted_sd_deg;
  double cone_effect_mean_deg;
  double cone_effect_sd_deg;
};

/// Reference localization errors by region of the true azimuth, plus "all".
inline constexpr std::array<RegionErrorReference, 5> kReferenceRegionErrors{{
    {"front", 57.83, 51.14, 27.03, 21.08, 30.79, 30.06},
    {"right", 32.60, 26.63, 19.37, 14.87, 13.23, 11.76},
    {"back", 62.88, 54.65, 28.40, 21.41, 34.48, 33.24},
    {"left", 28.37, 24.04, 16.97, 13.24, 11.40, 10.80},
    {"all", 42.45, 41.53, 22.00, 17.96, 20.45, 23.57},
}};

inline SyntheticModelParams calibrated_params(int bin_size_deg = 12) {
  SyntheticModelParams p;
  p.bin_size_deg = bin_size_deg;
  p.regions = standard_regions({34.8471, 28.8106, 36.8769, 24.6541},
                               {0.2783, 0.2815, 0.3175, 0.2400});
  return p;
}

inline ConfusionModel calibrated_model(int bin_size_deg = 12) {
  return synthesize_model(calibrated_params(bin_size_deg));
}

}  // namespace audioplace
