#pragma once

/**
 * @file mlp.hpp
 * @brief Fully connected regression network trained by backpropagation.
 *
 * Objective over a batch of m rows:
 *   (1/2m) sum (yhat - y)^2 + (alpha/2m) sum ||W_l||_F^2
 * Biases are not penalized. Hidden layers share one activation; the output
 * layer is linear with a single unit.
 */

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "solrad/error.hpp"

namespace solrad::ml {

enum class Activation { kIdentity, kLogistic, kTanh, kRelu };
enum class Solver { kSgd, kAdam };
enum class Schedule { kConstant, kAdaptive, kInvScaling };

Activation parse_activation(std::string_view text);
Solver parse_solver(std::string_view text);
Schedule parse_schedule(std::string_view text);
const char* to_string(Activation a);

struct MlpNetwork {
  Activation activation{Activation::kRelu};
  /// weights[l] is fan_in x fan_out; the last layer has fan_out 1.
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;
  /// forward() returns output_offset + output_scale * (last layer); the
  /// trainer fits the layers to the standardized target.
  double output_offset{0.0};
  double output_scale{1.0};

  [[nodiscard]] std::size_t input_width() const {
    return weights.empty() ? 0 : static_cast<std::size_t>(weights.front().rows());
  }
  /// Total number of scalar parameters.
  [[nodiscard]] std::size_t parameter_count() const;
  friend bool operator==(const MlpNetwork&, const MlpNetwork&);
};

/// Glorot-uniform weights, zero biases.
MlpNetwork init_network(std::size_t inputs, const std::vector<int>& hidden, Activation activation,
                        std::uint64_t seed);

Eigen::VectorXd forward(const MlpNetwork& net, const Eigen::MatrixXd& x);

struct MlpGradient {
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;
};

/// Objective value on the raw last-layer output (the output affine map is
/// not applied); fills `grad` (same shapes as the network) when non-null.
double loss_and_gradient(const MlpNetwork& net, const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                         double alpha, MlpGradient* grad);

struct MlpParams {
  std::vector<int> hidden{100};
  Activation activation{Activation::kRelu};
  Solver solver{Solver::kAdam};
  Schedule schedule{Schedule::kConstant};
  double alpha{1e-4};
  double learning_rate_init{1e-3};
  double power_t{0.5};
  double momentum{0.9};
  int max_iter{200};
  /// Early-stopping patience in epochs.
  int n_iter_no_change{10};
  int batch_size{200};
  double validation_fraction{0.1};
  double tol{1e-4};
  std::uint64_t seed{0};
};

struct MlpModel {
  MlpNetwork network;
  /// Full-batch training objective after each epoch.
  std::vector<double> loss_curve;
  std::vector<double> validation_curve;
  int stopped_epoch{};
  int best_epoch{};
};

/// Raised when the objective becomes non-finite.
class DivergenceError : public Error {
 public:
  DivergenceError(int last_finite_epoch, const std::string& message)
      : Error(ErrorCode::kDivergence, message), last_finite_epoch_(last_finite_epoch) {}
  /// 0 when the initial network already diverged.
  [[nodiscard]] int last_finite_epoch() const noexcept { return last_finite_epoch_; }

 private:
  int last_finite_epoch_;
};

/// Minibatch training with a seeded validation hold-out for early stopping
/// (when it leaves at least one row on each side); the weights of the best
/// validation epoch are kept.
MlpModel fit_mlp(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const MlpParams& params);

}  // namespace solrad::ml
