#pragma once

/**
 * @file angstrom.hpp
 * @brief Monthly Angstrom-Prescott coefficients and the statistical
 * radiation estimate H = [a + b (1 - n_c)] H_ext.
 *
 * Coefficients are fitted with the classical sunshine regressor n/N
 * (y = H/H_ext = a + b n/N); estimation substitutes the clear fraction
 * 1 - n_c derived from imagery for n/N.
 */

#include <array>
#include <chrono>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "solrad/metrics.hpp"

namespace solrad {

/// Energy unit shared by measured daily radiation and H_ext.
enum class EnergyUnit { kWhPerM2, kKJPerM2, kMJPerM2 };

EnergyUnit parse_energy_unit(std::string_view text);
const char* to_string(EnergyUnit unit);
/// Converts a Wh/m^2 value into `unit`.
double from_wh_per_m2(double wh, EnergyUnit unit);

/// One row of the daily ground file `date,radiation,sunshine_hours`; an
/// empty sunshine cell is an explicit null.
struct GroundDay {
  std::chrono::year_month_day date;
  double radiation{};
  std::optional<double> sunshine_hours;
};

std::string ground_daily_csv(std::span<const GroundDay> days, std::string_view metadata = {});
std::vector<GroundDay> parse_ground_daily_csv(std::string_view text);

struct DailyGroundRecord {
  std::chrono::year_month_day date;
  double h_measured{};
  std::optional<double> sunshine_hours;
  double day_length_h{};
  double h_ext{};
};

enum class FitStatus { kFitted, kNoData, kDegenerate };

struct MonthlyFit {
  int month{};
  FitStatus status{FitStatus::kNoData};
  double a{};
  double b{};
  double r_squared{};
  int sample_count{};
  std::string message;
};

class MonthlyCoefficients {
 public:
  MonthlyCoefficients();

  [[nodiscard]] const MonthlyFit& month(int m) const;
  MonthlyFit& month(int m);
  [[nodiscard]] const std::array<MonthlyFit, 12>& rows() const noexcept { return rows_; }
  [[nodiscard]] int fitted_count() const;

  /// `month,a,b,r2,n`; unfitted months keep empty a/b/r2 cells.
  [[nodiscard]] std::string to_csv(std::string_view metadata = {}) const;
  static MonthlyCoefficients from_csv(std::string_view text);

 private:
  std::array<MonthlyFit, 12> rows_{};
};

/// OLS of y = a + b x on paired samples. Throws kDegenerateFit when x has
/// zero variance, kEmptyInput with fewer than two points.
struct LineFit {
  double intercept{};
  double slope{};
  double r_squared{};
};
LineFit fit_line(std::span<const double> x, std::span<const double> y);

/// Per-month OLS of H/H_ext on n/N. Records without sunshine are skipped.
/// Months with a degenerate regressor are marked kDegenerate; others fit.
MonthlyCoefficients fit_monthly(std::span<const DailyGroundRecord> records);

double estimate_radiation(double a, double b, double cloudiness, double h_ext);

struct StatisticalReport {
  SeriesMetrics metrics;
  std::string scatter_csv;
};

/// Scores estimates against observations and renders the daily scatter.
StatisticalReport evaluate_statistical_model(std::span<const PredictionPair> pairs,
                                             double utc_offset_hours = 0.0);

}  // namespace solrad
