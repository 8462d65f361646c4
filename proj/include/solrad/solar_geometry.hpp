#pragma once

/**
 * @file solar_geometry.hpp
 * @brief Astronomical quantities needed by the calibration and the features:
 * declination, equation of time, true solar time, zenith angle, Earth-Sun
 * distance, day length and extraterrestrial irradiance.
 *
 * Orbital terms use the Spencer Fourier series with the day angle
 * 2*pi*(d - 1)/365 (leap day 366 is evaluated with the same denominator).
 */

#include "solrad/timeutil.hpp"

namespace solrad {

/// Solar constant, W/m^2.
inline constexpr double kSolarConstant = 1367.0;

/**
 * @brief Fixed observation site. Latitude/longitude in degrees, east and
 * north positive; the UTC offset is the station's local clock offset.
 */
class Site {
 public:
  Site(double latitude_deg, double longitude_deg, double utc_offset_hours);

  [[nodiscard]] double latitude() const noexcept { return latitude_; }
  [[nodiscard]] double longitude() const noexcept { return longitude_; }
  [[nodiscard]] double utc_offset_hours() const noexcept { return utc_offset_; }

 private:
  double latitude_;
  double longitude_;
  double utc_offset_;
};

/**
 * @brief A site paired with a UTC instant; the anchor of every sample.
 */
struct GeoTemporalPoint {
  Site site;
  UtcInstant timestamp;

  /// Calendar date and clock hour at the site's local clock.
  [[nodiscard]] std::chrono::year_month_day local_date() const;
  [[nodiscard]] double local_clock_hour() const;
};

struct SolarGeometry {
  double declination_deg{};
  double equation_of_time_min{};
  double true_solar_time_h{};
  double hour_angle_deg{};
  double zenith_angle_deg{};
  double earth_sun_distance_au{};
  double day_length_h{};
  double extraterrestrial_wm2{};
  double extraterrestrial_daily_whm2{};
};

/// Declination in degrees. Throws kDomain outside 1..366.
double declination(int day_of_year);

/// Equation of time in minutes (apparent minus mean solar time).
double equation_of_time(int day_of_year);

/// Eccentricity correction factor E0 = (r0/r)^2.
double eccentricity_correction(int day_of_year);

/// Earth-Sun distance in AU, r = E0^(-1/2).
double earth_sun_distance(int day_of_year);

/// Local clock hour + 4 min/deg * (longitude - 15 * offset) + EoT, wrapped
/// into [0, 24).
double true_solar_time(const GeoTemporalPoint& point);

/// Same composition with the equation of time supplied by the caller.
double true_solar_time(double clock_hour, double longitude_deg, double utc_offset_hours,
                       double equation_of_time_min);

/// 15 degrees per hour from solar noon, negative in the morning.
double hour_angle(double true_solar_time_h);

/// cos(z) = sin(lat) sin(dec) + cos(lat) cos(dec) cos(w); result in [0, 180].
double zenith_angle(double latitude_deg, double declination_deg, double hour_angle_deg);

/// Astronomical day length N = (2/15) acos(-tan(lat) tan(dec)), hours.
/// The argument is clamped so polar day gives 24 and polar night 0.
double day_length(double latitude_deg, double declination_deg);

/// Daily extraterrestrial irradiation on a horizontal plane, Wh/m^2.
double extraterrestrial_daily(double latitude_deg, int day_of_year);

/// Instantaneous extraterrestrial irradiance on a horizontal plane, W/m^2,
/// evaluated at the record timestamp. Zero when the sun is at or below the
/// horizon.
double extraterrestrial_hourly(const GeoTemporalPoint& point);

/// Gsc * E0 * cos(zenith), floored at zero for zenith >= 90.
double extraterrestrial_irradiance(double eccentricity, double zenith_deg);

/// Full geometry bundle at the point's timestamp.
SolarGeometry compute_geometry(const GeoTemporalPoint& point);

}  // namespace solrad
