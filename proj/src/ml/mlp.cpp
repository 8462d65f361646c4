#include "solrad/ml/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "solrad/random.hpp"

namespace solrad::ml {
namespace {

void activate(Activation a, Eigen::MatrixXd& z) {
  switch (a) {
    case Activation::kIdentity: break;
    case Activation::kLogistic: z = (1.0 + (-z.array()).exp()).inverse().matrix(); break;
    case Activation::kTanh: z = z.array().tanh().matrix(); break;
    case Activation::kRelu: z = z.cwiseMax(0.0); break;
  }
}

// derivative expressed through the activation output
void scale_by_derivative(Activation a, const Eigen::MatrixXd& out, Eigen::MatrixXd& delta) {
  switch (a) {
    case Activation::kIdentity: break;
    case Activation::kLogistic: delta.array() *= out.array() * (1.0 - out.array()); break;
    case Activation::kTanh: delta.array() *= 1.0 - out.array().square(); break;
    case Activation::kRelu: delta.array() *= (out.array() > 0.0).cast<double>(); break;
  }
}

std::vector<Eigen::MatrixXd> forward_all(const MlpNetwork& net, const Eigen::MatrixXd& x) {
  std::vector<Eigen::MatrixXd> acts;
  acts.reserve(net.weights.size() + 1);
  acts.push_back(x);
  for (std::size_t l = 0; l < net.weights.size(); ++l) {
    Eigen::MatrixXd z = acts.back() * net.weights[l];
    z.rowwise() += net.biases[l].transpose();
    if (l + 1 < net.weights.size()) activate(net.activation, z);
    acts.push_back(std::move(z));
  }
  return acts;
}

double penalty(const MlpNetwork& net) {
  double s = 0.0;
  for (const auto& w : net.weights) s += w.squaredNorm();
  return s;
}

bool finite(const MlpGradient& g) {
  for (const auto& w : g.weights) {
    if (!w.allFinite()) return false;
  }
  for (const auto& b : g.biases) {
    if (!b.allFinite()) return false;
  }
  return true;
}

struct Optimizer {
  Solver solver;
  double momentum;
  MlpGradient first;   // velocity for sgd, first moment for adam
  MlpGradient second;  // adam only
  long long steps{0};

  Optimizer(Solver s, double mom, const MlpNetwork& net) : solver(s), momentum(mom) {
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
      first.weights.push_back(Eigen::MatrixXd::Zero(net.weights[l].rows(), net.weights[l].cols()));
      first.biases.push_back(Eigen::VectorXd::Zero(net.biases[l].size()));
    }
    second = first;
  }

  template <typename P, typename G>
  void update(P& param, const G& grad, P& m, P& v, double lr, double bias1, double bias2) {
    if (solver == Solver::kSgd) {
      m = momentum * m - lr * grad;
      param += m;
    } else {
      constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-8;
      m = b1 * m + (1.0 - b1) * grad;
      v = b2 * v + (1.0 - b2) * grad.cwiseProduct(grad);
      const double step = lr * std::sqrt(bias2) / bias1;
      param.array() -= step * m.array() / (v.array().sqrt() + eps);
    }
  }

  void step(MlpNetwork& net, const MlpGradient& g, double lr) {
    ++steps;
    const double bias1 = 1.0 - std::pow(0.9, static_cast<double>(steps));
    const double bias2 = 1.0 - std::pow(0.999, static_cast<double>(steps));
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
      update(net.weights[l], g.weights[l], first.weights[l], second.weights[l], lr, bias1, bias2);
      update(net.biases[l], g.biases[l], first.biases[l], second.biases[l], lr, bias1, bias2);
    }
  }
};

Eigen::MatrixXd rows_of(const Eigen::MatrixXd& x, const std::vector<std::size_t>& idx, std::size_t from,
                        std::size_t to) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(to - from), x.cols());
  for (std::size_t i = from; i < to; ++i) out.row(static_cast<Eigen::Index>(i - from)) = x.row(static_cast<Eigen::Index>(idx[i]));
  return out;
}

Eigen::VectorXd rows_of(const Eigen::VectorXd& y, const std::vector<std::size_t>& idx, std::size_t from,
                        std::size_t to) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(to - from));
  for (std::size_t i = from; i < to; ++i) out[static_cast<Eigen::Index>(i - from)] = y[static_cast<Eigen::Index>(idx[i])];
  return out;
}

}  // namespace

Activation parse_activation(std::string_view text) {
  if (text == "identity") return Activation::kIdentity;
  if (text == "logistic") return Activation::kLogistic;
  if (text == "tanh") return Activation::kTanh;
  if (text == "relu") return Activation::kRelu;
  throw Error(ErrorCode::kConfig, "unknown activation '" + std::string(text) + "'");
}

Solver parse_solver(std::string_view text) {
  if (text == "sgd") return Solver::kSgd;
  if (text == "adam") return Solver::kAdam;
  throw Error(ErrorCode::kConfig, "unknown solver '" + std::string(text) + "' (sgd or adam)");
}

Schedule parse_schedule(std::string_view text) {
  if (text == "constant") return Schedule::kConstant;
  if (text == "adaptive") return Schedule::kAdaptive;
  if (text == "invscaling") return Schedule::kInvScaling;
  throw Error(ErrorCode::kConfig, "unknown learning-rate schedule '" + std::string(text) + "'");
}

const char* to_string(Activation a) {
  switch (a) {
    case Activation::kIdentity: return "identity";
    case Activation::kLogistic: return "logistic";
    case Activation::kTanh: return "tanh";
    case Activation::kRelu: return "relu";
  }
  return "?";
}

std::size_t MlpNetwork::parameter_count() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    n += static_cast<std::size_t>(weights[l].size() + biases[l].size());
  }
  return n;
}

bool operator==(const MlpNetwork& a, const MlpNetwork& b) {
  if (a.activation != b.activation || a.weights.size() != b.weights.size()) return false;
  if (a.output_offset != b.output_offset || a.output_scale != b.output_scale) return false;
  for (std::size_t l = 0; l < a.weights.size(); ++l) {
    if (a.weights[l].rows() != b.weights[l].rows() || a.weights[l].cols() != b.weights[l].cols()) return false;
    if (a.weights[l] != b.weights[l] || a.biases[l] != b.biases[l]) return false;
  }
  return true;
}

MlpNetwork init_network(std::size_t inputs, const std::vector<int>& hidden, Activation activation,
                        std::uint64_t seed) {
  if (inputs == 0) throw Error(ErrorCode::kShape, "network needs at least one input");
  Rng rng(seed);
  MlpNetwork net;
  net.activation = activation;
  std::vector<Eigen::Index> sizes{static_cast<Eigen::Index>(inputs)};
  for (int h : hidden) {
    if (h < 1) throw Error(ErrorCode::kDomain, "hidden layer sizes must be >= 1");
    sizes.push_back(h);
  }
  sizes.push_back(1);
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    const double fan = static_cast<double>(sizes[l] + sizes[l + 1]);
    const double factor = activation == Activation::kLogistic ? 2.0 : 6.0;
    const double limit = std::sqrt(factor / fan);
    Eigen::MatrixXd w(sizes[l], sizes[l + 1]);
    for (Eigen::Index j = 0; j < w.cols(); ++j) {
      for (Eigen::Index i = 0; i < w.rows(); ++i) w(i, j) = rng.uniform(-limit, limit);
    }
    net.weights.push_back(std::move(w));
    net.biases.push_back(Eigen::VectorXd::Zero(sizes[l + 1]));
  }
  return net;
}

Eigen::VectorXd forward(const MlpNetwork& net, const Eigen::MatrixXd& x) {
  if (static_cast<std::size_t>(x.cols()) != net.input_width()) {
    throw Error(ErrorCode::kShape, "input width does not match the network");
  }
  Eigen::VectorXd out = forward_all(net, x).back().col(0);
  return (out.array() * net.output_scale + net.output_offset).matrix();
}

double loss_and_gradient(const MlpNetwork& net, const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                         double alpha, MlpGradient* grad) {
  if (x.rows() != y.size()) throw Error(ErrorCode::kShape, "design rows and target length differ");
  if (x.rows() == 0) throw Error(ErrorCode::kEmptyInput, "loss over zero rows");
  const double m = static_cast<double>(x.rows());
  const auto acts = forward_all(net, x);
  Eigen::MatrixXd delta = acts.back() - y;
  const double loss = 0.5 * (delta.squaredNorm() + alpha * penalty(net)) / m;
  if (!grad) return loss;

  const std::size_t layers = net.weights.size();
  grad->weights.resize(layers);
  grad->biases.resize(layers);
  delta /= m;
  for (std::size_t l = layers; l-- > 0;) {
    grad->weights[l] = acts[l].transpose() * delta + (alpha / m) * net.weights[l];
    grad->biases[l] = delta.colwise().sum().transpose();
    if (l > 0) {
      Eigen::MatrixXd back = delta * net.weights[l].transpose();
      scale_by_derivative(net.activation, acts[l], back);
      delta = std::move(back);
    }
  }
  return loss;
}

MlpModel fit_mlp(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const MlpParams& params) {
  if (x.rows() != y.size()) throw Error(ErrorCode::kShape, "design rows and target length differ");
  if (x.rows() == 0) throw Error(ErrorCode::kEmptyInput, "no training rows");
  if (!x.allFinite() || !y.allFinite()) throw Error(ErrorCode::kDomain, "non-finite entry in design");
  if (params.max_iter < 1 || params.n_iter_no_change < 1 || params.batch_size < 1) {
    throw Error(ErrorCode::kDomain, "max_iter, n_iter_no_change and batch_size must be >= 1");
  }
  if (!(params.learning_rate_init > 0.0) || !(params.alpha >= 0.0)) {
    throw Error(ErrorCode::kDomain, "learning_rate_init must be > 0 and alpha >= 0");
  }
  if (!(params.validation_fraction >= 0.0 && params.validation_fraction < 1.0)) {
    throw Error(ErrorCode::kDomain, "validation_fraction must be in [0, 1)");
  }

  const auto n = static_cast<std::size_t>(x.rows());
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng split_rng(derive_seed(params.seed, 1));
  split_rng.shuffle(std::span<std::size_t>(order));
  auto n_val = static_cast<std::size_t>(std::llround(params.validation_fraction * static_cast<double>(n)));
  if (n_val >= n) n_val = 0;
  const bool hold_out = n_val >= 1;
  std::vector<std::size_t> train_idx(order.begin() + static_cast<std::ptrdiff_t>(n_val), order.end());
  std::sort(train_idx.begin(), train_idx.end());
  std::vector<std::size_t> val_idx(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_val));
  std::sort(val_idx.begin(), val_idx.end());

  // the layers see a standardized target; the affine map is folded into the
  // network's output afterwards
  const double y_mean = y.mean();
  const double y_sd = std::sqrt((y.array() - y_mean).square().mean());
  const double y_scale = y_sd > 0.0 ? y_sd : 1.0;
  const Eigen::VectorXd ys = (y.array() - y_mean) / y_scale;

  const Eigen::MatrixXd x_train = rows_of(x, train_idx, 0, train_idx.size());
  const Eigen::VectorXd y_train = rows_of(ys, train_idx, 0, train_idx.size());
  const Eigen::MatrixXd x_val = hold_out ? rows_of(x, val_idx, 0, val_idx.size()) : Eigen::MatrixXd();
  const Eigen::VectorXd y_val = hold_out ? rows_of(ys, val_idx, 0, val_idx.size()) : Eigen::VectorXd();

  MlpModel model;
  model.network = init_network(static_cast<std::size_t>(x.cols()), params.hidden, params.activation,
                               derive_seed(params.seed, 0));
  Optimizer opt(params.solver, params.momentum, model.network);
  Rng batch_rng(derive_seed(params.seed, 2));

  const std::size_t n_train = train_idx.size();
  const auto batch = std::min<std::size_t>(static_cast<std::size_t>(params.batch_size), n_train);
  std::vector<std::size_t> perm(n_train);
  std::iota(perm.begin(), perm.end(), std::size_t{0});

  double lr = params.learning_rate_init;
  double best = std::numeric_limits<double>::infinity();
  MlpNetwork best_net = model.network;
  int no_improve = 0;
  int adaptive_streak = 0;
  MlpGradient grad;
  for (int epoch = 1; epoch <= params.max_iter; ++epoch) {
    if (params.schedule == Schedule::kInvScaling) {
      lr = params.learning_rate_init / std::pow(static_cast<double>(epoch), params.power_t);
    }
    batch_rng.shuffle(std::span<std::size_t>(perm));
    for (std::size_t from = 0; from < n_train; from += batch) {
      const std::size_t to = std::min(n_train, from + batch);
      const Eigen::MatrixXd xb = rows_of(x_train, perm, from, to);
      const Eigen::VectorXd yb = rows_of(y_train, perm, from, to);
      const double l = loss_and_gradient(model.network, xb, yb, params.alpha, &grad);
      if (!std::isfinite(l) || !finite(grad)) {
        throw DivergenceError(epoch - 1, "mlp objective became non-finite in epoch " + std::to_string(epoch));
      }
      opt.step(model.network, grad, lr);
    }
    const double train_loss = loss_and_gradient(model.network, x_train, y_train, params.alpha, nullptr);
    if (!std::isfinite(train_loss)) {
      throw DivergenceError(epoch - 1, "mlp objective became non-finite in epoch " + std::to_string(epoch));
    }
    model.loss_curve.push_back(train_loss);
    double score = train_loss;
    if (hold_out) {
      score = (forward(model.network, x_val) - y_val).squaredNorm() / (2.0 * static_cast<double>(n_val));
      if (!std::isfinite(score)) {
        throw DivergenceError(epoch - 1, "mlp validation loss became non-finite in epoch " + std::to_string(epoch));
      }
      model.validation_curve.push_back(score);
    }
    model.stopped_epoch = epoch;
    const bool improved = score < best - params.tol;
    if (score < best) {
      best = score;
      best_net = model.network;
      model.best_epoch = epoch;
    }
    if (improved) {
      no_improve = 0;
      adaptive_streak = 0;
    } else {
      ++no_improve;
      if (params.schedule == Schedule::kAdaptive && ++adaptive_streak == 2) {
        lr /= 5.0;
        adaptive_streak = 0;
      }
      if (no_improve >= params.n_iter_no_change) break;
    }
  }
  model.network = std::move(best_net);
  model.network.output_offset = y_mean;
  model.network.output_scale = y_scale;
  return model;
}

}  // namespace solrad::ml
