#pragma once

/**
 * @file radiometry.hpp
 * @brief Visible-channel rasters and their calibration to pixel reflectance.
 *
 * Calibration chain for one digital number `nd`:
 *   nominal    r_prev = k * (nd - space_count)
 *   corrected  r_post = C[month] * r_prev
 *   pixel      r_p    = r_post * r^2 / cos(zenith)
 *
 * Raster text format (`HGRID1`):
 *   HGRID1
 *   <rows> <cols>
 *   <x0> <dx> <rot_row> <y0> <rot_col> <dy>     (GDAL geotransform order)
 *   <YYYY-MM-DDTHH:MM:SSZ>
 *   <rows lines of cols space-separated integers in 0..1023>
 * x is longitude and y latitude, in degrees. Rotation terms must be 0.
 * Reals are written as the shortest round-trip decimal; every line ends
 * with '\n'.
 */

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "solrad/solar_geometry.hpp"

namespace solrad {

inline constexpr int kMaxDigitalNumber = 1023;

class RasterGrid {
 public:
  using GeoTransform = std::array<double, 6>;

  RasterGrid(int rows, int cols, const GeoTransform& geotransform, UtcInstant timestamp,
             std::vector<std::uint16_t> values);

  [[nodiscard]] int rows() const noexcept { return rows_; }
  [[nodiscard]] int cols() const noexcept { return cols_; }
  [[nodiscard]] const GeoTransform& geotransform() const noexcept { return gt_; }
  [[nodiscard]] UtcInstant timestamp() const noexcept { return timestamp_; }
  [[nodiscard]] const std::vector<std::uint16_t>& values() const noexcept { return values_; }
  [[nodiscard]] int at(int row, int col) const {
    return values_[static_cast<std::size_t>(row) * cols_ + col];
  }

  /// Inverse geotransform. Cells are half-open: the minimum edge of the
  /// pixel index range belongs to the grid, the maximum edge does not.
  /// Returns nullopt outside the extent.
  [[nodiscard]] std::optional<std::pair<int, int>> cell_of(double latitude,
                                                           double longitude) const;

 private:
  int rows_;
  int cols_;
  GeoTransform gt_;
  UtcInstant timestamp_;
  std::vector<std::uint16_t> values_;
};

RasterGrid parse_grid(std::string_view text);
std::string serialize_grid(const RasterGrid& grid);
RasterGrid load_grid(const std::string& path);
void save_grid(const RasterGrid& grid, const std::string& path);

/// Nearest-neighbour digital number at a geographic point. Throws
/// kOutOfBounds outside the grid extent.
int sample_digital_number(const RasterGrid& grid, double latitude, double longitude);

/// Mean over the 3x3 neighbourhood of the containing cell, clipped to the
/// grid.
double sample_window_mean(const RasterGrid& grid, double latitude, double longitude);

enum class SamplingMode { kNearest, kMean3x3 };

struct CalibrationConfig {
  double k{};
  std::array<double, 12> monthly_c{};
  int space_count{29};
  double zenith_cutoff_deg{85.0};

  /// Throws kDomain when k <= 0, any C <= 0, space_count < 0 or the cutoff
  /// is outside (0, 90].
  void validate() const;
};

struct ReflectanceSample {
  GeoTemporalPoint point;
  double nd{};
  double r_prev{};
  double r_post{};
  std::optional<double> r_p;
  double zenith_deg{};
  double earth_sun_distance_au{};
  bool valid{false};
};

double nominal_reflectance(double nd, const CalibrationConfig& config);

/// month is 1..12.
double corrected_reflectance(double r_prev, int month, const CalibrationConfig& config);

/// Throws kLowSun when zenith_deg >= cutoff.
double pixel_reflectance(double r_post, double earth_sun_distance_au, double zenith_deg,
                         double zenith_cutoff_deg = 85.0);

/// Samples the grid at the site and runs the calibration chain with the
/// solar geometry of the grid timestamp. Throws kOutOfBounds / kLowSun.
ReflectanceSample calibrate(const RasterGrid& grid, const Site& site,
                            const CalibrationConfig& config,
                            SamplingMode mode = SamplingMode::kNearest);

/// As calibrate(), but a low sun yields a sample with valid == false and no
/// r_p instead of throwing.
ReflectanceSample calibrate_flagged(const RasterGrid& grid, const Site& site,
                                    const CalibrationConfig& config,
                                    SamplingMode mode = SamplingMode::kNearest);

/// Digital number whose calibration lands closest to `target_rp` (used by the
/// synthetic generator). Not clamped: callers check the 10-bit range.
double digital_number_for_reflectance(double target_rp, int month, double earth_sun_distance_au,
                                      double zenith_deg, const CalibrationConfig& config);

}  // namespace solrad
