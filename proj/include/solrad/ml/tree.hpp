#pragma once

/**
 * @file tree.hpp
 * @brief CART regression trees and the two ensembles built on them.
 *
 * A split on feature f at threshold t sends rows with x[f] <= t left.
 * Split score is the second-order gain
 *   sL^2/(nL+lambda) + sR^2/(nR+lambda) - s^2/(n+lambda)
 * which for lambda = 0 is the reduction in squared error. Leaves hold
 * s/(n+lambda). Ties go to the lowest feature index, then the lowest
 * threshold.
 */

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "solrad/random.hpp"

namespace solrad::ml {

struct TreeParams {
  int max_depth{0};  // 0 = unlimited
  int min_samples_leaf{1};
  double max_features{1.0};  // fraction of columns tried per node
  double reg_lambda{0.0};
  double min_split_gain{0.0};
};

struct TreeNode {
  int feature{-1};  // -1 marks a leaf
  double threshold{};
  int left{-1};
  int right{-1};
  double value{};

  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

class RegressionTree {
 public:
  RegressionTree() = default;
  explicit RegressionTree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {}

  [[nodiscard]] double predict_row(const Eigen::Ref<const Eigen::RowVectorXd>& row) const;
  [[nodiscard]] const std::vector<TreeNode>& nodes() const noexcept { return nodes_; }
  [[nodiscard]] int depth() const;

  friend bool operator==(const RegressionTree&, const RegressionTree&) = default;

 private:
  std::vector<TreeNode> nodes_;
};

/// Grows a tree on `rows` of (x, y); repeated row indices act as weights.
/// `rng` is only drawn from when max_features < 1.
RegressionTree fit_tree(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                        std::span<const std::size_t> rows, const TreeParams& params, Rng& rng);

struct ForestParams {
  TreeParams tree;
  int n_estimators{100};
  bool bootstrap{true};
  std::uint64_t seed{0};
};

struct ForestModel {
  std::vector<RegressionTree> trees;
};

/// Tree t is grown with its own stream derive_seed(seed, t).
/// min_samples_leaf > rows throws kDegenerateDesign.
ForestModel fit_random_forest(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                              const ForestParams& params);
Eigen::VectorXd predict_forest(const ForestModel& model, const Eigen::MatrixXd& x);

struct BoostingParams {
  TreeParams tree;
  int n_estimators{100};
  double learning_rate{0.1};
  std::uint64_t seed{0};
};

struct BoostingModel {
  double base{};
  double learning_rate{};
  std::vector<RegressionTree> stages;
  /// Training MSE after the base value and after each stage.
  std::vector<double> train_mse;
};

/// Stagewise squared-error boosting from the target mean. learning_rate <= 0
/// throws kDomain.
BoostingModel fit_gradient_boosting(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                    const BoostingParams& params);
Eigen::VectorXd predict_boosting(const BoostingModel& model, const Eigen::MatrixXd& x);

}  // namespace solrad::ml
