#pragma once

/**
 * @file model.hpp
 * @brief Family dispatch, prediction and the binary model container.
 *
 * Container layout, all integers little-endian:
 *   8 bytes  magic "SOLRADM\0"
 *   u32      format version (1)
 *   u64      payload length
 *   payload  spec text (u64 length + bytes), input width, then the
 *            family's parameters as u64 counts and IEEE-754 doubles
 *   u32      CRC-32 of everything before it
 */

#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "solrad/ml/linear.hpp"
#include "solrad/ml/mlp.hpp"
#include "solrad/ml/model_spec.hpp"
#include "solrad/ml/tree.hpp"

namespace solrad::ml {

struct Diagnostics {
  std::vector<double> loss_curve;  // mlp epochs or boosting stages
  int stopped_epoch{};
};

using ModelState = std::variant<LinearModel, ForestModel, BoostingModel, MlpNetwork>;

struct TrainedModel {
  ModelSpec spec;
  std::size_t input_width{};
  ModelState state;
  Diagnostics diagnostics;
};

ForestParams forest_params(const ModelSpec& spec);
BoostingParams boosting_params(const ModelSpec& spec);
MlpParams mlp_params(const ModelSpec& spec);

TrainedModel fit(const ModelSpec& spec, const Eigen::MatrixXd& x, const Eigen::VectorXd& y);

/// Width mismatch throws kShape; zero rows give an empty vector.
Eigen::VectorXd predict(const TrainedModel& model, const Eigen::MatrixXd& x);

constexpr std::uint32_t kModelFormatVersion = 1;

std::string serialize_model(const TrainedModel& model);
/// Rejects wrong magic, unknown version, truncation and checksum mismatch
/// with kParse.
TrainedModel deserialize_model(std::string_view bytes);

void save_model(const TrainedModel& model, const std::string& path);
TrainedModel load_model(const std::string& path);

}  // namespace solrad::ml
