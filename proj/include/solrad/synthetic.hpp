#pragma once

/**
 * @file synthetic.hpp
 * @brief Synthetic corpus with known latent values: rasters whose digital
 * numbers invert the calibration chain for a chosen cloudiness trajectory,
 * hourly station data and daily ground records generated from the
 * Angstrom-Prescott relation.
 *
 * Per hour slot the first valid image is forced clear and the second fully
 * overcast (at the raw maximum reflectance), so the envelope built
 * downstream reproduces the generator's reflectance bounds.
 */

#include <array>
#include <chrono>
#include <cstdint>
#include <string>
#include <vector>

#include "solrad/angstrom.hpp"
#include "solrad/dataset.hpp"
#include "solrad/radiometry.hpp"

namespace solrad {

struct SynthSpec {
  double latitude{3.44779};
  double longitude{-76.51918};
  double utc_offset_hours{-5.0};
  std::chrono::year_month_day start{std::chrono::year{2012}, std::chrono::month{1},
                                    std::chrono::day{1}};
  int days{30};
  int images_per_day{13};
  int first_image_hour{6};
  int image_interval_minutes{60};
  std::array<double, 12> a{};
  std::array<double, 12> b{};
  /// Std-dev of additive noise on the clearness index H/H_ext.
  double noise_sigma{0.0};
  /// Std-dev of per-image cloudiness around the daily level.
  double cloud_jitter{0.1};
  bool clear_sky{false};
  double r_clear{0.08};
  double r_cloud_max{0.9};
  CalibrationConfig calibration{};
  int grid_size{5};
  double pixel_deg{0.04};
  /// Station rows removed at valid image hours.
  int orphan_images{0};
  /// Fraction of days whose sunshine value is null.
  double sunshine_missing_fraction{0.0};
  EnergyUnit unit{EnergyUnit::kWhPerM2};

  /// Defaults: a = 0.207, b = 0.419 for every month, k = 0.001, C = 1.
  static SynthSpec defaults();
  void validate() const;
};

struct GroundTruthRow {
  UtcInstant timestamp;
  double nc_true{};
  double h_true{};   // hourly station radiation before noise, W/m^2
  double rp_true{};  // target pixel reflectance before quantization
  int nd{};
  bool valid{};
};

struct DailyTruth {
  std::chrono::year_month_day date;
  double clear_fraction{};
  double h_true{};  // daily radiation before noise, in SynthSpec::unit
  double h_ext{};   // daily extraterrestrial, in SynthSpec::unit
};

struct SyntheticCorpus {
  std::vector<RasterGrid> rasters;
  std::vector<StationObservation> station;
  std::vector<GroundDay> ground;
  std::vector<GroundTruthRow> truth;
  std::vector<DailyTruth> daily_truth;
};

SyntheticCorpus generate_synthetic(const SynthSpec& spec, std::uint64_t seed);

/// `goes_YYYYMMDDTHHMMSSZ.hgrid`
std::string raster_file_name(UtcInstant t);

std::string ground_truth_csv(const SyntheticCorpus& corpus, double utc_offset_hours,
                             std::string_view metadata = {});
std::string daily_truth_csv(const SyntheticCorpus& corpus, std::string_view metadata = {});

}  // namespace solrad
