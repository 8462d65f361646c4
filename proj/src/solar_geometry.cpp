#include "solrad/solar_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "solrad/error.hpp"

namespace solrad {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kDeg = kPi / 180.0;

double day_angle(int day_of_year) {
  if (day_of_year < 1 || day_of_year > 366) {
    throw Error(ErrorCode::kDomain,
                "day of year must be in 1..366, got " + std::to_string(day_of_year));
  }
  return 2.0 * kPi * (day_of_year - 1) / 365.0;
}

double clamp_unit(double x) { return std::clamp(x, -1.0, 1.0); }

}  // namespace

Site::Site(double latitude_deg, double longitude_deg, double utc_offset_hours)
    : latitude_(latitude_deg), longitude_(longitude_deg), utc_offset_(utc_offset_hours) {
  if (!(latitude_deg >= -90.0 && latitude_deg <= 90.0)) {
    throw Error(ErrorCode::kDomain, "latitude outside [-90, 90]");
  }
  if (!(longitude_deg >= -180.0 && longitude_deg <= 180.0)) {
    throw Error(ErrorCode::kDomain, "longitude outside [-180, 180]");
  }
  if (!(utc_offset_hours >= -14.0 && utc_offset_hours <= 14.0)) {
    throw Error(ErrorCode::kDomain, "UTC offset outside [-14, 14] hours");
  }
}

std::chrono::year_month_day GeoTemporalPoint::local_date() const {
  const auto local = to_local_clock(timestamp, site.utc_offset_hours());
  return std::chrono::year_month_day{std::chrono::floor<std::chrono::days>(local)};
}

double GeoTemporalPoint::local_clock_hour() const {
  return clock_hour(to_local_clock(timestamp, site.utc_offset_hours()));
}

double declination(int day_of_year) {
  const double g = day_angle(day_of_year);
  const double rad = 0.006918 - 0.399912 * std::cos(g) + 0.070257 * std::sin(g) -
                     0.006758 * std::cos(2 * g) + 0.000907 * std::sin(2 * g) -
                     0.002697 * std::cos(3 * g) + 0.00148 * std::sin(3 * g);
  return rad / kDeg;
}

double equation_of_time(int day_of_year) {
  const double g = day_angle(day_of_year);
  return 229.18 * (0.000075 + 0.001868 * std::cos(g) - 0.032077 * std::sin(g) -
                   0.014615 * std::cos(2 * g) - 0.040849 * std::sin(2 * g));
}

double eccentricity_correction(int day_of_year) {
  const double g = day_angle(day_of_year);
  return 1.000110 + 0.034221 * std::cos(g) + 0.001280 * std::sin(g) +
         0.000719 * std::cos(2 * g) + 0.000077 * std::sin(2 * g);
}

double earth_sun_distance(int day_of_year) {
  return 1.0 / std::sqrt(eccentricity_correction(day_of_year));
}

double true_solar_time(double clock_hour, double longitude_deg, double utc_offset_hours,
                       double equation_of_time_min) {
  const double correction_min = 4.0 * (longitude_deg - 15.0 * utc_offset_hours) +
                                equation_of_time_min;
  double t = std::fmod(clock_hour + correction_min / 60.0, 24.0);
  if (t < 0.0) t += 24.0;
  // fmod of a tiny negative can round back up to exactly 24
  if (t >= 24.0) t -= 24.0;
  return t;
}

double true_solar_time(const GeoTemporalPoint& point) {
  const int doy = day_of_year(point.local_date());
  return true_solar_time(point.local_clock_hour(), point.site.longitude(),
                         point.site.utc_offset_hours(), equation_of_time(doy));
}

double hour_angle(double true_solar_time_h) { return 15.0 * (true_solar_time_h - 12.0); }

double zenith_angle(double latitude_deg, double declination_deg, double hour_angle_deg) {
  const double phi = latitude_deg * kDeg;
  const double dec = declination_deg * kDeg;
  const double w = hour_angle_deg * kDeg;
  const double c = std::sin(phi) * std::sin(dec) + std::cos(phi) * std::cos(dec) * std::cos(w);
  return std::acos(clamp_unit(c)) / kDeg;
}

double day_length(double latitude_deg, double declination_deg) {
  const double arg = -std::tan(latitude_deg * kDeg) * std::tan(declination_deg * kDeg);
  return (2.0 / 15.0) * std::acos(clamp_unit(arg)) / kDeg;
}

double extraterrestrial_daily(double latitude_deg, int day_of_year) {
  const double e0 = eccentricity_correction(day_of_year);
  const double phi = latitude_deg * kDeg;
  const double dec = declination(day_of_year) * kDeg;
  const double ws = std::acos(clamp_unit(-std::tan(phi) * std::tan(dec)));
  const double h = (24.0 / kPi) * kSolarConstant * e0 *
                   (std::cos(phi) * std::cos(dec) * std::sin(ws) +
                    ws * std::sin(phi) * std::sin(dec));
  return std::max(0.0, h);
}

double extraterrestrial_irradiance(double eccentricity, double zenith_deg) {
  if (zenith_deg >= 90.0) return 0.0;
  return std::max(0.0, kSolarConstant * eccentricity * std::cos(zenith_deg * kDeg));
}

double extraterrestrial_hourly(const GeoTemporalPoint& point) {
  return compute_geometry(point).extraterrestrial_wm2;
}

SolarGeometry compute_geometry(const GeoTemporalPoint& point) {
  const int doy = day_of_year(point.local_date());
  SolarGeometry g;
  g.declination_deg = declination(doy);
  g.equation_of_time_min = equation_of_time(doy);
  g.true_solar_time_h = true_solar_time(point.local_clock_hour(), point.site.longitude(),
                                        point.site.utc_offset_hours(), g.equation_of_time_min);
  g.hour_angle_deg = hour_angle(g.true_solar_time_h);
  g.zenith_angle_deg = zenith_angle(point.site.latitude(), g.declination_deg, g.hour_angle_deg);
  const double e0 = eccentricity_correction(doy);
  g.earth_sun_distance_au = 1.0 / std::sqrt(e0);
  g.day_length_h = day_length(point.site.latitude(), g.declination_deg);
  g.extraterrestrial_wm2 = extraterrestrial_irradiance(e0, g.zenith_angle_deg);
  g.extraterrestrial_daily_whm2 = extraterrestrial_daily(point.site.latitude(), doy);
  return g;
}

}  // namespace solrad
