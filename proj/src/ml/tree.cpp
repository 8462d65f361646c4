#include "solrad/ml/tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "solrad/error.hpp"

namespace solrad::ml {
namespace {

struct Split {
  int feature{-1};
  double threshold{};
  double gain{};
  std::size_t left_count{};
};

class TreeBuilder {
 public:
  TreeBuilder(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const TreeParams& params, Rng& rng)
      : x_(x), y_(y), params_(params), rng_(rng) {}

  std::vector<TreeNode> build(std::vector<std::size_t> rows) {
    grow(std::move(rows), 0);
    return std::move(nodes_);
  }

 private:
  int grow(std::vector<std::size_t> rows, int depth) {
    const auto n = rows.size();
    double sum = 0.0, sum_sq = 0.0;
    bool pure = true;
    for (auto r : rows) {
      sum += y_[static_cast<Eigen::Index>(r)];
      sum_sq += y_[static_cast<Eigen::Index>(r)] * y_[static_cast<Eigen::Index>(r)];
      pure = pure && y_[static_cast<Eigen::Index>(r)] == y_[static_cast<Eigen::Index>(rows.front())];
    }
    const double lambda = params_.reg_lambda;
    const int id = static_cast<int>(nodes_.size());
    nodes_.push_back(TreeNode{-1, 0.0, -1, -1, sum / (static_cast<double>(n) + lambda)});

    const auto msl = static_cast<std::size_t>(params_.min_samples_leaf);
    if (pure || n < 2 * msl || (params_.max_depth > 0 && depth >= params_.max_depth)) return id;

    const Split best = find_split(rows, sum, lambda, msl);
    if (best.feature < 0) return id;
    // zero-gain splits are kept unless a gain floor is set; they can expose
    // structure one level further down (XOR-like targets)
    const double tol = 1e-12 * (1.0 + sum_sq);
    if (0.5 * best.gain - params_.min_split_gain < -tol) return id;

    std::vector<std::size_t> left, right;
    left.reserve(best.left_count);
    right.reserve(n - best.left_count);
    for (auto r : rows) {
      (x_(static_cast<Eigen::Index>(r), best.feature) <= best.threshold ? left : right).push_back(r);
    }
    rows.clear();
    rows.shrink_to_fit();
    const int l = grow(std::move(left), depth + 1);
    const int rr = grow(std::move(right), depth + 1);
    auto& node = nodes_[static_cast<std::size_t>(id)];
    node.feature = best.feature;
    node.threshold = best.threshold;
    node.left = l;
    node.right = rr;
    return id;
  }

  std::vector<int> candidate_features() {
    const int p = static_cast<int>(x_.cols());
    std::vector<int> all(static_cast<std::size_t>(p));
    std::iota(all.begin(), all.end(), 0);
    if (params_.max_features >= 1.0) return all;
    const int k = std::clamp(static_cast<int>(std::lround(params_.max_features * p)), 1, p);
    for (int i = 0; i < k; ++i) {
      const auto j = static_cast<std::size_t>(i) + rng_.index(static_cast<std::uint64_t>(p - i));
      std::swap(all[static_cast<std::size_t>(i)], all[j]);
    }
    all.resize(static_cast<std::size_t>(k));
    std::sort(all.begin(), all.end());
    return all;
  }

  Split find_split(const std::vector<std::size_t>& rows, double sum, double lambda, std::size_t msl) {
    const auto n = rows.size();
    const double parent = sum * sum / (static_cast<double>(n) + lambda);
    Split best;
    bool found = false;
    std::vector<std::size_t> order(rows);
    for (int f : candidate_features()) {
      const auto col = x_.col(f);
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const double va = col[static_cast<Eigen::Index>(a)], vb = col[static_cast<Eigen::Index>(b)];
        return va < vb || (va == vb && a < b);
      });
      double left_sum = 0.0;
      for (std::size_t i = 1; i < n; ++i) {
        left_sum += y_[static_cast<Eigen::Index>(order[i - 1])];
        if (i < msl || n - i < msl) continue;
        const double lo = col[static_cast<Eigen::Index>(order[i - 1])];
        const double hi = col[static_cast<Eigen::Index>(order[i])];
        if (!(lo < hi)) continue;
        const double nl = static_cast<double>(i), nr = static_cast<double>(n - i);
        const double right_sum = sum - left_sum;
        const double gain =
            left_sum * left_sum / (nl + lambda) + right_sum * right_sum / (nr + lambda) - parent;
        if (!found || gain > best.gain) {
          found = true;
          double mid = lo + 0.5 * (hi - lo);
          if (!(mid < hi)) mid = lo;  // adjacent doubles
          best = Split{f, mid, gain, i};
        }
      }
    }
    return best;
  }

  const Eigen::MatrixXd& x_;
  const Eigen::VectorXd& y_;
  const TreeParams& params_;
  Rng& rng_;
  std::vector<TreeNode> nodes_;
};

void check_tree_params(const TreeParams& p, std::size_t rows) {
  if (p.min_samples_leaf < 1) throw Error(ErrorCode::kDomain, "min_samples_leaf must be >= 1");
  if (static_cast<std::size_t>(p.min_samples_leaf) > rows) {
    throw Error(ErrorCode::kDegenerateDesign,
                "min_samples_leaf " + std::to_string(p.min_samples_leaf) + " exceeds the " +
                    std::to_string(rows) + " training rows");
  }
  if (!(p.max_features > 0.0 && p.max_features <= 1.0)) {
    throw Error(ErrorCode::kDomain, "max_features must be in (0, 1]");
  }
  if (p.max_depth < 0) throw Error(ErrorCode::kDomain, "max_depth must be >= 0");
  if (!(p.reg_lambda >= 0.0) || !(p.min_split_gain >= 0.0)) {
    throw Error(ErrorCode::kDomain, "reg_lambda and min_split_gain must be >= 0");
  }
}

void check_xy(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  if (x.rows() != y.size()) throw Error(ErrorCode::kShape, "design rows and target length differ");
  if (x.rows() == 0) throw Error(ErrorCode::kEmptyInput, "no training rows");
  if (!x.allFinite() || !y.allFinite()) throw Error(ErrorCode::kDomain, "non-finite entry in design");
}

}  // namespace

double RegressionTree::predict_row(const Eigen::Ref<const Eigen::RowVectorXd>& row) const {
  std::size_t i = 0;
  while (nodes_[i].feature >= 0) {
    const auto& node = nodes_[i];
    i = static_cast<std::size_t>(row[node.feature] <= node.threshold ? node.left : node.right);
  }
  return nodes_[i].value;
}

int RegressionTree::depth() const {
  if (nodes_.empty()) return 0;
  std::vector<int> d(nodes_.size(), 0);
  int best = 0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    best = std::max(best, d[i]);
    if (nodes_[i].feature >= 0) {
      d[static_cast<std::size_t>(nodes_[i].left)] = d[i] + 1;
      d[static_cast<std::size_t>(nodes_[i].right)] = d[i] + 1;
    }
  }
  return best;
}

RegressionTree fit_tree(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                        std::span<const std::size_t> rows, const TreeParams& params, Rng& rng) {
  check_xy(x, y);
  if (rows.empty()) throw Error(ErrorCode::kEmptyInput, "tree needs at least one row");
  check_tree_params(params, rows.size());
  TreeBuilder builder(x, y, params, rng);
  return RegressionTree(builder.build(std::vector<std::size_t>(rows.begin(), rows.end())));
}

ForestModel fit_random_forest(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                              const ForestParams& params) {
  check_xy(x, y);
  check_tree_params(params.tree, static_cast<std::size_t>(x.rows()));
  if (params.n_estimators < 1) throw Error(ErrorCode::kDomain, "n_estimators must be >= 1");
  const auto n = static_cast<std::size_t>(x.rows());
  ForestModel model;
  model.trees.reserve(static_cast<std::size_t>(params.n_estimators));
  std::vector<std::size_t> rows(n);
  for (int t = 0; t < params.n_estimators; ++t) {
    Rng rng(derive_seed(params.seed, static_cast<std::uint64_t>(t)));
    if (params.bootstrap) {
      for (auto& r : rows) r = static_cast<std::size_t>(rng.index(n));
    } else {
      std::iota(rows.begin(), rows.end(), std::size_t{0});
    }
    model.trees.push_back(fit_tree(x, y, rows, params.tree, rng));
  }
  return model;
}

Eigen::VectorXd predict_forest(const ForestModel& model, const Eigen::MatrixXd& x) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    double s = 0.0;
    for (const auto& tree : model.trees) s += tree.predict_row(x.row(i));
    out[i] = s / static_cast<double>(model.trees.size());
  }
  return out;
}

BoostingModel fit_gradient_boosting(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                    const BoostingParams& params) {
  check_xy(x, y);
  check_tree_params(params.tree, static_cast<std::size_t>(x.rows()));
  if (!(params.learning_rate > 0.0) || !std::isfinite(params.learning_rate)) {
    throw Error(ErrorCode::kDomain, "learning_rate must be > 0");
  }
  if (params.n_estimators < 1) throw Error(ErrorCode::kDomain, "n_estimators must be >= 1");
  const auto n = static_cast<std::size_t>(x.rows());
  std::vector<std::size_t> rows(n);
  std::iota(rows.begin(), rows.end(), std::size_t{0});

  BoostingModel model;
  model.base = y.mean();
  model.learning_rate = params.learning_rate;
  Eigen::VectorXd pred = Eigen::VectorXd::Constant(x.rows(), model.base);
  model.train_mse.push_back((y - pred).squaredNorm() / static_cast<double>(n));
  for (int m = 0; m < params.n_estimators; ++m) {
    const Eigen::VectorXd residual = y - pred;
    Rng rng(derive_seed(params.seed, static_cast<std::uint64_t>(m)));
    auto tree = fit_tree(x, residual, rows, params.tree, rng);
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      pred[i] += params.learning_rate * tree.predict_row(x.row(i));
    }
    model.stages.push_back(std::move(tree));
    model.train_mse.push_back((y - pred).squaredNorm() / static_cast<double>(n));
  }
  return model;
}

Eigen::VectorXd predict_boosting(const BoostingModel& model, const Eigen::MatrixXd& x) {
  Eigen::VectorXd out = Eigen::VectorXd::Constant(x.rows(), model.base);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    double s = 0.0;
    for (const auto& tree : model.stages) s += tree.predict_row(x.row(i));
    out[i] += model.learning_rate * s;
  }
  return out;
}

}  // namespace solrad::ml
