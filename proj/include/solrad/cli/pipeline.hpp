#pragma once

/**
 * @file pipeline.hpp
 * @brief Pipeline stages. Each reads its inputs from files, writes its
 * artifacts under the output directory and returns the process exit code
 * (0 iff the stage's primary artifact was written).
 *
 * Files under paths.output_dir:
 *   reflectance.csv, calibrate_errors.txt      calibrate
 *   envelope.csv, features.csv                 features
 *   coefficients.csv                           fit-angstrom
 *   estimates.csv, statistical_report.txt      estimate
 *   join_report.txt, train_report.txt,
 *   models/<regime>_<label>.srm,
 *   search/<regime>_<label>.txt                train
 *   report.csv, report.txt,
 *   scatter/<regime>_<label>_<split>.csv       evaluate
 *   ground_truth.csv, daily_truth.csv          synth (plus the rasters,
 *                                              station and ground files)
 */

#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "solrad/cli/config.hpp"

namespace solrad::cli {

int cmd_synth(const PipelineConfig& cfg, std::ostream& log);
int cmd_calibrate(const PipelineConfig& cfg, std::ostream& log);
int cmd_features(const PipelineConfig& cfg, std::ostream& log);
int cmd_fit_angstrom(const PipelineConfig& cfg, std::ostream& log);
int cmd_estimate(const PipelineConfig& cfg, std::ostream& log);
int cmd_train(const PipelineConfig& cfg, std::ostream& log);
int cmd_evaluate(const PipelineConfig& cfg, std::ostream& log);

/// Runs a stage by its command name. Library errors are reported on `log`
/// and turned into exit code 1; an unknown name gives 2.
int run_command(std::string_view name, const PipelineConfig& cfg, std::ostream& log);

const std::vector<std::string>& command_names();

/// `timestamp,nd,r_prev,r_post,r_p,zenith,valid`; r_p is empty for invalid rows.
std::string reflectance_csv(std::span<const ReflectanceSample> samples, double utc_offset_hours,
                            std::string_view metadata = {});
std::vector<ReflectanceSample> parse_reflectance_csv(std::string_view text, const Site& site);

}  // namespace solrad::cli
