#pragma once

/**
 * @file config.hpp
 * @brief Declarative pipeline configuration.
 *
 * One `key = value` per line, `#` starts a comment line. Keys are dotted
 * (`site.latitude`, `space.mlp.alpha`); unknown keys and repeated keys are
 * errors. Overrides given on the command line replace file values before
 * validation. `seed`, the site and `calibration.k` are mandatory.
 *
 * Paths that are not set default to locations under `paths.output_dir`.
 */

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "solrad/angstrom.hpp"
#include "solrad/dataset.hpp"
#include "solrad/ml/cv.hpp"
#include "solrad/radiometry.hpp"
#include "solrad/synthetic.hpp"

namespace solrad::cli {

inline constexpr const char* kToolVersion = "0.1.0";

/// A report column: a model family plus whether boosting is regularized.
struct FamilyLabel {
  std::string label;  // linear, random_forest, gradient_boosting, xgboost, mlp
  ml::Family family;
  bool regularized{false};
};

FamilyLabel parse_family_label(std::string_view text);

struct PipelineConfig {
  std::uint64_t seed{};
  double latitude{};
  double longitude{};
  double utc_offset_hours{};

  std::string output_dir;
  std::string rasters_dir;
  std::string station_csv;
  std::string ground_csv;

  CalibrationConfig calibration;
  SamplingMode sampling{SamplingMode::kNearest};
  EnergyUnit ground_unit{EnergyUnit::kWhPerM2};
  StationSchema station_schema;

  std::vector<Regime> regimes{Regime::kM1, Regime::kM2, Regime::kM3};
  double test_fraction{0.2};
  FeatureOptions features;
  bool scale_features{true};
  /// Fit the feature scaler on every row instead of the training split.
  bool scaler_fit_all{false};
  /// Min-max scale the target too; predictions are mapped back before
  /// scoring.
  bool scale_target{false};

  std::vector<FamilyLabel> families;
  std::size_t candidates{20};
  unsigned threads{1};
  int cv_splits{5};
  int cv_repeats{3};
  /// space.<label>.<param> entries, already parsed.
  std::map<std::string, std::map<std::string, ml::Domain>> space_overrides;

  SynthSpec synth;

  /// CRC-32 of the canonical (sorted, overridden) key-value text.
  std::uint32_t hash{};
  std::map<std::string, std::string> raw;

  [[nodiscard]] Site site() const { return Site(latitude, longitude, utc_offset_hours); }
  /// `# solrad <version> config=<hash>` plus newline.
  [[nodiscard]] std::string metadata() const;
  /// Search space for a report column, defaults merged with overrides.
  [[nodiscard]] ml::SearchSpace space_for(const FamilyLabel& label) const;
};

using Overrides = std::vector<std::pair<std::string, std::string>>;

/// Throws kConfig with the offending key or line.
PipelineConfig parse_config(std::string_view text, const Overrides& overrides = {});
PipelineConfig load_config(const std::string& path, const Overrides& overrides = {});

/// Splits `key=value`; throws kConfig without '='.
std::pair<std::string, std::string> parse_override(std::string_view text);

}  // namespace solrad::cli
