#include "solrad/ml/linear.hpp"

#include <string>

#include "solrad/error.hpp"

namespace solrad::ml {

LinearModel fit_linear(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, bool min_norm) {
  if (x.rows() != y.size()) throw Error(ErrorCode::kShape, "design rows and target length differ");
  if (x.rows() < x.cols() + 1) {
    throw Error(ErrorCode::kDegenerateDesign, "linear fit needs rows >= columns + 1 (have " +
                                                  std::to_string(x.rows()) + " x " +
                                                  std::to_string(x.cols()) + ")");
  }
  if (!x.allFinite() || !y.allFinite()) throw Error(ErrorCode::kDomain, "non-finite entry in design");

  const Eigen::RowVectorXd mean_x = x.colwise().mean();
  const double mean_y = y.mean();
  const Eigen::MatrixXd xc = x.rowwise() - mean_x;
  const Eigen::VectorXd yc = y.array() - mean_y;

  LinearModel model;
  if (x.cols() == 0) {
    model.weights = Eigen::VectorXd(0);
  } else if (min_norm) {
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(xc);
    model.weights = cod.solve(yc);
  } else {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(xc);
    if (qr.rank() < x.cols()) {
      throw Error(ErrorCode::kDegenerateDesign,
                  "design is rank deficient (rank " + std::to_string(qr.rank()) + " of " +
                      std::to_string(x.cols()) + " columns)");
    }
    model.weights = qr.solve(yc);
  }
  model.intercept = mean_y - mean_x.dot(model.weights);
  return model;
}

Eigen::VectorXd predict_linear(const LinearModel& model, const Eigen::MatrixXd& x) {
  Eigen::VectorXd out = x * model.weights;
  out.array() += model.intercept;
  return out;
}

}  // namespace solrad::ml
