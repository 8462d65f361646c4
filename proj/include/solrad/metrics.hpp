#pragma once

/**
 * @file metrics.hpp
 * @brief Evaluation metrics, rRMSE performance bands and the report grid.
 *
 * Conventions: `estimated` (y) is the model output, `observed` (x) the
 * station measurement.
 *   MBE   = mean(y - x)
 *   R^2   = 1 - sum((y - x)^2) / sum((x - mean(x))^2)   (may be negative)
 *   RMSE  = sqrt(mean((y - x)^2))
 *   rRMSE = RMSE / mean(x) * 100
 * Bands: [0,10) Excellent, [10,20] Good, (20,30] Fair, (30,inf) Poor.
 */

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "solrad/timeutil.hpp"

namespace solrad {

double mbe(std::span<const double> estimated, std::span<const double> observed);
double r2(std::span<const double> estimated, std::span<const double> observed);
double rmse(std::span<const double> estimated, std::span<const double> observed);
double rrmse(std::span<const double> estimated, std::span<const double> observed);

enum class Band { kExcellent, kGood, kFair, kPoor };

Band classify_rrmse(double rrmse_pct);
const char* to_string(Band band);

/// Metrics of one (regime, family) cell. Train/test values are both kept;
/// the band follows the test rRMSE.
struct MetricBlock {
  double mbe_train{}, mbe_test{};
  double r2_train{}, r2_test{};
  double rmse_train{}, rmse_test{};
  double rrmse_train{}, rrmse_test{};
  Band band{Band::kPoor};
};

/// Metrics of a single paired series (statistical model report).
struct SeriesMetrics {
  std::size_t n{};
  double mbe{};
  double r2{};
  double rmse{};
  double rrmse_pct{};
  Band band{Band::kPoor};
};

SeriesMetrics evaluate_series(std::span<const double> estimated, std::span<const double> observed);

struct PredictionPair {
  UtcInstant timestamp;
  double observed{};
  double estimated{};
};

/// Train/test prediction pairs for one cell of the report.
struct CellPredictions {
  std::string regime;
  std::string family;
  std::vector<PredictionPair> train;
  std::vector<PredictionPair> test;
};

MetricBlock compute_block(const CellPredictions& cell);

class EvaluationReport {
 public:
  /// Row order of the text table follows `regimes`, columns follow
  /// `families`; cells without predictions are reported as absent.
  EvaluationReport(std::vector<std::string> regimes, std::vector<std::string> families);

  void set(const std::string& regime, const std::string& family, MetricBlock block);
  void note(const std::string& regime, const std::string& family, std::string reason);

  [[nodiscard]] std::optional<MetricBlock> get(const std::string& regime,
                                               const std::string& family) const;
  [[nodiscard]] std::size_t block_count() const noexcept { return blocks_.size(); }

  /// `regime,family,metric,split,value,band`
  [[nodiscard]] std::string to_csv() const;
  /// Regimes x metrics rows, families as columns.
  [[nodiscard]] std::string to_text() const;

 private:
  std::vector<std::string> regimes_;
  std::vector<std::string> families_;
  std::map<std::pair<std::string, std::string>, MetricBlock> blocks_;
  std::map<std::pair<std::string, std::string>, std::string> notes_;
};

EvaluationReport build_report(std::span<const CellPredictions> cells,
                              std::vector<std::string> regimes,
                              std::vector<std::string> families);

/// Scatter CSV `timestamp,observed,estimated`.
std::string scatter_csv(std::span<const PredictionPair> pairs, double utc_offset_hours = 0.0);

}  // namespace solrad
