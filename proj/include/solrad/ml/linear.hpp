#pragma once

#include <Eigen/Dense>

namespace solrad::ml {

struct LinearModel {
  Eigen::VectorXd weights;
  double intercept{};
};

/// Ordinary least squares with intercept. Columns are centered and solved
/// by column-pivoted QR; a rank-deficient design throws kDegenerateDesign
/// unless `min_norm`, which returns the minimum-norm solution instead.
/// Needs rows >= columns + 1 and finite entries.
LinearModel fit_linear(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, bool min_norm = false);

Eigen::VectorXd predict_linear(const LinearModel& model, const Eigen::MatrixXd& x);

}  // namespace solrad::ml
