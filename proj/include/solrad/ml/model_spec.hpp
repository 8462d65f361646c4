#pragma once

/**
 * @file model_spec.hpp
 * @brief Model families, validated hyperparameter maps and search spaces.
 *
 * Every family has a fixed schema (name, type, default, allowed range);
 * specs are always complete, with defaults filled in. Text form is one
 * `key=value` per line with keys sorted, `family` and `seed` first.
 */

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace solrad::ml {

enum class Family { kLinear, kRandomForest, kGradientBoosting, kMlp };

Family parse_family(std::string_view text);
const char* to_string(Family family);

using ParamValue = std::variant<bool, long long, double, std::string, std::vector<int>>;

std::string format_param(const ParamValue& v);

class ModelSpec {
 public:
  /// Fills defaults, then applies and validates `overrides`. Unknown keys,
  /// wrong types and out-of-range values throw kConfig.
  static ModelSpec make(Family family, const std::map<std::string, ParamValue>& overrides,
                        std::uint64_t seed);

  [[nodiscard]] Family family() const noexcept { return family_; }
  [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
  [[nodiscard]] const std::map<std::string, ParamValue>& params() const noexcept { return params_; }

  [[nodiscard]] bool get_bool(const std::string& key) const;
  [[nodiscard]] long long get_int(const std::string& key) const;
  [[nodiscard]] double get_real(const std::string& key) const;
  [[nodiscard]] const std::string& get_string(const std::string& key) const;
  [[nodiscard]] const std::vector<int>& get_list(const std::string& key) const;

  /// Report label: `xgboost` for regularized gradient boosting.
  [[nodiscard]] std::string label() const;

  [[nodiscard]] std::string to_text() const;
  static ModelSpec from_text(std::string_view text);

  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;

 private:
  ModelSpec(Family family, std::map<std::string, ParamValue> params, std::uint64_t seed)
      : family_(family), params_(std::move(params)), seed_(seed) {}

  Family family_;
  std::map<std::string, ParamValue> params_;
  std::uint64_t seed_;
};

/// Parses a value for `key` of `family` from its text form (`true`, `12`,
/// `0.5`, `relu`, `100,75,50`).
ParamValue parse_param(Family family, const std::string& key, std::string_view text);

/// Names of the hyperparameters a family accepts.
std::vector<std::string> param_names(Family family);

struct LogUniform {
  double lo{};
  double hi{};
};

using Domain = std::variant<std::vector<ParamValue>, LogUniform>;

class SearchSpace {
 public:
  explicit SearchSpace(Family family) : family_(family) {}

  /// Validates the key against the family schema; lists must be nonempty,
  /// ranges need 0 < lo < hi.
  void set(const std::string& key, Domain domain);

  [[nodiscard]] Family family() const noexcept { return family_; }
  [[nodiscard]] const std::map<std::string, Domain>& domains() const noexcept { return domains_; }

  /// Number of grid points when every domain is a list; 0 when any is
  /// continuous.
  [[nodiscard]] std::size_t grid_size() const;

 private:
  Family family_;
  std::map<std::string, Domain> domains_;
};

/// Parses `a | b | c` lists or `loguniform(lo, hi)`.
Domain parse_domain(Family family, const std::string& key, std::string_view text);

/// Built-in search spaces. The MLP space is the reference grid minus
/// the quasi-Newton solver; ensembles search n_estimators, max_depth,
/// min_samples_leaf and (boosting) learning_rate in loguniform(1e-3, 1e-1).
SearchSpace default_space(Family family, bool regularized_boosting = false);

}  // namespace solrad::ml
