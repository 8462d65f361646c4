#include "solrad/ml/model.hpp"

#include <bit>
#include <cstring>

#include "solrad/error.hpp"
#include "solrad/text.hpp"

namespace solrad::ml {
namespace {

constexpr char kMagic[8] = {'S', 'O', 'L', 'R', 'A', 'D', 'M', '\0'};

class Writer {
 public:
  void u32(std::uint32_t v) { put(v, 4); }
  void u64(std::uint64_t v) { put(v, 8); }
  void i64(std::int64_t v) { put(static_cast<std::uint64_t>(v), 8); }
  void f64(double v) { put(std::bit_cast<std::uint64_t>(v), 8); }
  void bytes(std::string_view s) {
    u64(s.size());
    out_.append(s);
  }
  void matrix(const Eigen::MatrixXd& m) {
    u64(static_cast<std::uint64_t>(m.rows()));
    u64(static_cast<std::uint64_t>(m.cols()));
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      for (Eigen::Index i = 0; i < m.rows(); ++i) f64(m(i, j));
    }
  }
  void vector(const Eigen::VectorXd& v) {
    u64(static_cast<std::uint64_t>(v.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) f64(v[i]);
  }
  void reals(const std::vector<double>& v) {
    u64(v.size());
    for (double d : v) f64(d);
  }
  void tree(const RegressionTree& t) {
    u64(t.nodes().size());
    for (const auto& n : t.nodes()) {
      i64(n.feature);
      f64(n.threshold);
      i64(n.left);
      i64(n.right);
      f64(n.value);
    }
  }
  std::string& str() { return out_; }

 private:
  void put(std::uint64_t v, int width) {
    for (int i = 0; i < width; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xffU));
  }
  std::string out_;
};

class Reader {
 public:
  explicit Reader(std::string_view in) : in_(in) {}

  std::uint32_t u32() { return static_cast<std::uint32_t>(get(4)); }
  std::uint64_t u64() { return get(8); }
  std::int64_t i64() { return static_cast<std::int64_t>(get(8)); }
  double f64() { return std::bit_cast<double>(get(8)); }
  std::string bytes() {
    const auto n = count(1);
    std::string s(in_.substr(pos_, n));
    pos_ += n;
    return s;
  }
  Eigen::MatrixXd matrix() {
    const auto r = u64();
    const auto c = count(8);
    if (r != 0 && c > remaining() / 8 / r) fail();
    Eigen::MatrixXd m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = f64();
    }
    return m;
  }
  Eigen::VectorXd vector() {
    const auto n = count(8);
    Eigen::VectorXd v(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = f64();
    return v;
  }
  std::vector<double> reals() {
    const auto n = count(8);
    std::vector<double> v(n);
    for (auto& d : v) d = f64();
    return v;
  }
  RegressionTree tree() {
    const auto n = count(40);
    std::vector<TreeNode> nodes(n);
    for (std::size_t k = 0; k < n; ++k) {
      auto& node = nodes[k];
      node.feature = static_cast<int>(i64());
      node.threshold = f64();
      node.left = static_cast<int>(i64());
      node.right = static_cast<int>(i64());
      node.value = f64();
      if (node.feature >= 0) {
        // children always follow their parent, which rules out cycles
        const auto ok = [&](int c) { return c > static_cast<int>(k) && c < static_cast<int>(n); };
        if (!ok(node.left) || !ok(node.right)) fail();
      }
    }
    if (n == 0) fail();
    return RegressionTree(std::move(nodes));
  }
  [[nodiscard]] std::size_t remaining() const { return in_.size() - pos_; }
  [[noreturn]] static void fail() { throw Error(ErrorCode::kParse, "model file is malformed"); }

 private:
  // element count whose payload must still fit in the buffer
  std::size_t count(std::size_t element_size) {
    const auto n = u64();
    if (n > remaining() / element_size) fail();
    return static_cast<std::size_t>(n);
  }
  std::uint64_t get(int width) {
    if (remaining() < static_cast<std::size_t>(width)) fail();
    std::uint64_t v = 0;
    for (int i = 0; i < width; ++i) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in_[pos_ + static_cast<std::size_t>(i)]))
           << (8 * i);
    }
    pos_ += static_cast<std::size_t>(width);
    return v;
  }
  std::string_view in_;
  std::size_t pos_{0};
};

TreeParams tree_params(const ModelSpec& spec) {
  TreeParams p;
  p.max_depth = static_cast<int>(spec.get_int("max_depth"));
  p.min_samples_leaf = static_cast<int>(spec.get_int("min_samples_leaf"));
  return p;
}

}  // namespace

ForestParams forest_params(const ModelSpec& spec) {
  ForestParams p;
  p.tree = tree_params(spec);
  p.tree.max_features = spec.get_real("max_features");
  p.n_estimators = static_cast<int>(spec.get_int("n_estimators"));
  p.bootstrap = spec.get_bool("bootstrap");
  p.seed = spec.seed();
  return p;
}

BoostingParams boosting_params(const ModelSpec& spec) {
  BoostingParams p;
  p.tree = tree_params(spec);
  if (spec.get_bool("regularized")) {
    p.tree.reg_lambda = spec.get_real("reg_lambda");
    p.tree.min_split_gain = spec.get_real("min_split_gain");
  }
  p.n_estimators = static_cast<int>(spec.get_int("n_estimators"));
  p.learning_rate = spec.get_real("learning_rate");
  p.seed = spec.seed();
  return p;
}

MlpParams mlp_params(const ModelSpec& spec) {
  MlpParams p;
  p.hidden = spec.get_list("hidden_layer_sizes");
  p.activation = parse_activation(spec.get_string("activation"));
  p.solver = parse_solver(spec.get_string("solver"));
  p.schedule = parse_schedule(spec.get_string("learning_rate"));
  p.alpha = spec.get_real("alpha");
  p.learning_rate_init = spec.get_real("learning_rate_init");
  p.power_t = spec.get_real("power_t");
  p.momentum = spec.get_real("momentum");
  p.max_iter = static_cast<int>(spec.get_int("max_iter"));
  p.n_iter_no_change = static_cast<int>(spec.get_int("n_iter_no_change"));
  p.batch_size = static_cast<int>(spec.get_int("batch_size"));
  p.validation_fraction = spec.get_real("validation_fraction");
  p.tol = spec.get_real("tol");
  p.seed = spec.seed();
  return p;
}

TrainedModel fit(const ModelSpec& spec, const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  TrainedModel model{spec, static_cast<std::size_t>(x.cols()), LinearModel{}, {}};
  switch (spec.family()) {
    case Family::kLinear:
      model.state = fit_linear(x, y, spec.get_bool("min_norm"));
      break;
    case Family::kRandomForest:
      model.state = fit_random_forest(x, y, forest_params(spec));
      break;
    case Family::kGradientBoosting: {
      auto b = fit_gradient_boosting(x, y, boosting_params(spec));
      model.diagnostics.loss_curve = b.train_mse;
      model.diagnostics.stopped_epoch = static_cast<int>(b.stages.size());
      model.state = std::move(b);
      break;
    }
    case Family::kMlp: {
      auto m = fit_mlp(x, y, mlp_params(spec));
      model.diagnostics.loss_curve = std::move(m.loss_curve);
      model.diagnostics.stopped_epoch = m.stopped_epoch;
      model.state = std::move(m.network);
      break;
    }
  }
  return model;
}

Eigen::VectorXd predict(const TrainedModel& model, const Eigen::MatrixXd& x) {
  if (static_cast<std::size_t>(x.cols()) != model.input_width) {
    throw Error(ErrorCode::kShape, "model expects " + std::to_string(model.input_width) +
                                       " columns, got " + std::to_string(x.cols()));
  }
  if (x.rows() == 0) return Eigen::VectorXd(0);
  return std::visit(
      [&](const auto& s) -> Eigen::VectorXd {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, LinearModel>) return predict_linear(s, x);
        else if constexpr (std::is_same_v<T, ForestModel>) return predict_forest(s, x);
        else if constexpr (std::is_same_v<T, BoostingModel>) return predict_boosting(s, x);
        else return forward(s, x);
      },
      model.state);
}

std::string serialize_model(const TrainedModel& model) {
  Writer p;
  p.bytes(model.spec.to_text());
  p.u64(model.input_width);
  p.reals(model.diagnostics.loss_curve);
  p.i64(model.diagnostics.stopped_epoch);
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, LinearModel>) {
          p.vector(s.weights);
          p.f64(s.intercept);
        } else if constexpr (std::is_same_v<T, ForestModel>) {
          p.u64(s.trees.size());
          for (const auto& t : s.trees) p.tree(t);
        } else if constexpr (std::is_same_v<T, BoostingModel>) {
          p.f64(s.base);
          p.f64(s.learning_rate);
          p.reals(s.train_mse);
          p.u64(s.stages.size());
          for (const auto& t : s.stages) p.tree(t);
        } else {
          p.i64(static_cast<std::int64_t>(s.activation));
          p.f64(s.output_offset);
          p.f64(s.output_scale);
          p.u64(s.weights.size());
          for (std::size_t l = 0; l < s.weights.size(); ++l) {
            p.matrix(s.weights[l]);
            p.vector(s.biases[l]);
          }
        }
      },
      model.state);

  Writer out;
  out.str().append(kMagic, sizeof kMagic);
  out.u32(kModelFormatVersion);
  out.u64(p.str().size());
  out.str().append(p.str());
  out.u32(crc32(out.str()));
  return out.str();
}

TrainedModel deserialize_model(std::string_view bytes) {
  if (bytes.size() < sizeof kMagic + 4 + 8 + 4 || std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0) {
    throw Error(ErrorCode::kParse, "not a solrad model file");
  }
  const auto body = bytes.substr(0, bytes.size() - 4);
  Reader trailer(bytes.substr(bytes.size() - 4));
  if (trailer.u32() != crc32(body)) throw Error(ErrorCode::kParse, "model file checksum mismatch");
  Reader head(body.substr(sizeof kMagic));
  const auto version = head.u32();
  if (version != kModelFormatVersion) {
    throw Error(ErrorCode::kParse, "unsupported model format version " + std::to_string(version));
  }
  const auto length = head.u64();
  if (length != head.remaining()) throw Error(ErrorCode::kParse, "model payload length mismatch");

  Reader r(body.substr(sizeof kMagic + 12));
  TrainedModel model{ModelSpec::from_text(r.bytes()), 0, LinearModel{}, {}};
  model.input_width = static_cast<std::size_t>(r.u64());
  model.diagnostics.loss_curve = r.reals();
  model.diagnostics.stopped_epoch = static_cast<int>(r.i64());
  const auto check_width = [&](std::size_t w) {
    if (w != model.input_width) Reader::fail();
  };
  switch (model.spec.family()) {
    case Family::kLinear: {
      LinearModel m;
      m.weights = r.vector();
      m.intercept = r.f64();
      check_width(static_cast<std::size_t>(m.weights.size()));
      model.state = std::move(m);
      break;
    }
    case Family::kRandomForest: {
      ForestModel m;
      const auto n = r.u64();
      if (n == 0 || n > r.remaining()) Reader::fail();
      for (std::uint64_t i = 0; i < n; ++i) m.trees.push_back(r.tree());
      model.state = std::move(m);
      break;
    }
    case Family::kGradientBoosting: {
      BoostingModel m;
      m.base = r.f64();
      m.learning_rate = r.f64();
      m.train_mse = r.reals();
      const auto n = r.u64();
      if (n > r.remaining()) Reader::fail();
      for (std::uint64_t i = 0; i < n; ++i) m.stages.push_back(r.tree());
      model.state = std::move(m);
      break;
    }
    case Family::kMlp: {
      MlpNetwork m;
      const auto a = r.i64();
      if (a < 0 || a > static_cast<std::int64_t>(Activation::kRelu)) Reader::fail();
      m.activation = static_cast<Activation>(a);
      m.output_offset = r.f64();
      m.output_scale = r.f64();
      const auto layers = r.u64();
      if (layers == 0 || layers > r.remaining()) Reader::fail();
      for (std::uint64_t l = 0; l < layers; ++l) {
        m.weights.push_back(r.matrix());
        m.biases.push_back(r.vector());
        const auto& w = m.weights.back();
        if (m.biases.back().size() != w.cols()) Reader::fail();
        if (l > 0 && w.rows() != m.weights[l - 1].cols()) Reader::fail();
      }
      if (m.weights.back().cols() != 1) Reader::fail();
      check_width(static_cast<std::size_t>(m.weights.front().rows()));
      model.state = std::move(m);
      break;
    }
  }
  if (model.spec.family() != Family::kLinear && model.spec.family() != Family::kMlp) {
    // tree features must index into the input
    const auto check_trees = [&](const std::vector<RegressionTree>& trees) {
      for (const auto& t : trees) {
        for (const auto& node : t.nodes()) {
          if (node.feature >= static_cast<int>(model.input_width)) Reader::fail();
        }
      }
    };
    if (const auto* f = std::get_if<ForestModel>(&model.state)) check_trees(f->trees);
    if (const auto* b = std::get_if<BoostingModel>(&model.state)) check_trees(b->stages);
  }
  if (r.remaining() != 0) Reader::fail();
  return model;
}

void save_model(const TrainedModel& model, const std::string& path) {
  write_text_file(path, serialize_model(model));
}

TrainedModel load_model(const std::string& path) { return deserialize_model(read_text_file(path)); }

}  // namespace solrad::ml
