#pragma once

/**
 * @file dataset.hpp
 * @brief Station ingestion, the station/image join, feature regimes,
 * min-max scaling and seeded train/test splits.
 */

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "solrad/timeutil.hpp"

namespace solrad {

struct StationObservation {
  UtcInstant timestamp;
  std::optional<double> wind_speed;      // m/s
  std::optional<double> wind_direction;  // degrees, 0..360
  std::optional<double> temperature;     // deg C
  std::optional<double> rain;            // mm
  std::optional<double> humidity;        // %
  std::optional<double> solar_radiation; // W/m^2, target
};

/// Header names of each logical field. An empty name means the column is
/// not present and the field stays null.
struct StationSchema {
  std::string timestamp{"timestamp"};
  std::string wind_speed{"wind_speed"};
  std::string wind_direction{"wind_direction"};
  std::string temperature{"temperature"};
  std::string rain{"rain"};
  std::string humidity{"humidity"};
  std::string solar_radiation{"solar_radiation"};
};

struct RowIssue {
  std::size_t row{};   // 1-based data row (header excluded)
  std::size_t line{};  // 1-based physical line in the file
  std::string reason;
};

struct IngestReport {
  std::size_t accepted{};
  std::vector<RowIssue> rejected;
  std::vector<std::string> unknown_columns;

  [[nodiscard]] std::string summary() const;
};

struct StationLoad {
  std::vector<StationObservation> observations;
  IngestReport report;
};

/// Rows that break a field invariant, carry an unparseable timestamp or
/// repeat an earlier timestamp are rejected and itemized. A missing mapped
/// column in the header is fatal (kParse).
StationLoad parse_station_csv(std::string_view text, const StationSchema& schema = {});
StationLoad load_station_csv(const std::string& path, const StationSchema& schema = {});

/// Writes the default-schema CSV; timestamps are rendered at the offset.
std::string station_csv(std::span<const StationObservation> rows, double utc_offset_hours,
                        std::string_view metadata = {});

struct ImageFeatureRecord {
  UtcInstant timestamp;
  double r_p{};
  double n_c{};
  double h_ext{};       // W/m^2
  double day_length{};  // hours
  bool degenerate_slot{false};
};

/// `timestamp,r_p,n_c,h_ext,day_length,degenerate`
std::string features_csv(std::span<const ImageFeatureRecord> rows, double utc_offset_hours,
                         std::string_view metadata = {});
std::vector<ImageFeatureRecord> parse_features_csv(std::string_view text);

struct JoinedRecord {
  StationObservation station;
  ImageFeatureRecord image;
};

struct JoinResult {
  std::vector<JoinedRecord> records;
  std::size_t eliminated{};
};

/// Hour bucket in UTC: floor(timestamp / 1 h).
std::int64_t hour_key(UtcInstant t);

/// Inner join on the UTC (date, hour) bucket. Image records without a
/// station counterpart, or repeating an already matched bucket, count as
/// eliminated. Output is ordered by image timestamp.
JoinResult join_on_timestamp(std::span<const StationObservation> station,
                             std::span<const ImageFeatureRecord> images);

enum class Regime { kM1, kM2, kM3 };

Regime parse_regime(std::string_view text);
const char* to_string(Regime regime);

struct FeatureOptions {
  /// Replace raw wind direction by its sine and cosine.
  bool wind_direction_cyclic{false};
};

struct DesignMatrix {
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
  std::vector<std::string> columns;
  std::vector<UtcInstant> timestamps;
  std::size_t dropped_null_rows{};
};

/// M1: wind speed, wind direction, temperature, rain, humidity.
/// M2: reflectance, cloudiness, extraterrestrial irradiance, day length.
/// M3: union. Target is station solar radiation. Rows with a null among
/// the selected fields are dropped and counted. Throws kEmptyInput when no
/// row remains.
DesignMatrix select_features(std::span<const JoinedRecord> records, Regime regime,
                             const FeatureOptions& options = {});

struct ScalerParams {
  Eigen::VectorXd min;
  Eigen::VectorXd max;
};

ScalerParams fit_scaler(const Eigen::MatrixXd& train);
/// (x - min) / (max - min) per column; constant columns map to 0. No
/// clipping, so unseen data may leave [0, 1].
Eigen::MatrixXd apply_scaler(const ScalerParams& params, const Eigen::MatrixXd& x);
/// Inverse transform of one column (used for a scaled target).
double invert_scaled(const ScalerParams& params, Eigen::Index column, double value);

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Seeded shuffle, then the first round(n * test_fraction) indices go to
/// test. Throws kDomain unless 0 < test_fraction < 1.
SplitIndices split(std::size_t n, double test_fraction, std::uint64_t seed);

Eigen::MatrixXd take_rows(const Eigen::MatrixXd& x, std::span<const std::size_t> rows);
Eigen::VectorXd take_rows(const Eigen::VectorXd& y, std::span<const std::size_t> rows);

}  // namespace solrad
