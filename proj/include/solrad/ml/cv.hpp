#pragma once

/**
 * @file cv.hpp
 * @brief Repeated k-fold partitions and seeded random hyperparameter search.
 *
 * Candidate i is sampled from its own stream derive_seed(seed, i) and that
 * seed becomes the candidate's model seed, so results do not depend on the
 * order (or thread) in which candidates are evaluated.
 */

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "solrad/error.hpp"
#include "solrad/ml/model_spec.hpp"

namespace solrad::ml {

struct CvConfig {
  int n_splits{5};
  int n_repeats{3};
  std::uint64_t seed{0};

  void validate(std::size_t records) const;
};

struct Fold {
  int repeat{};
  int fold{};
  std::vector<std::size_t> train;
  std::vector<std::size_t> validate;  // both sorted ascending
};

/// n_repeats seeded shuffles, each cut into n_splits folds whose sizes
/// differ by at most one. n_splits > n throws kDomain.
std::vector<Fold> repeated_kfold(std::size_t n, const CvConfig& cv);

struct CandidateScore {
  std::size_t index{};
  ModelSpec spec;
  /// Mean validation MSE; +inf when the candidate failed.
  double score{std::numeric_limits<double>::infinity()};
  std::vector<double> fold_mse;
  bool failed{false};
  std::string message;
};

struct SearchResult {
  ModelSpec best;
  double best_score{};
  std::vector<CandidateScore> table;  // in candidate order
};

/// Key-value text, one block per candidate separated by blank lines.
std::string score_table_text(const std::vector<CandidateScore>& table);

class NoViableCandidateError : public Error {
 public:
  NoViableCandidateError(std::vector<CandidateScore> table, const std::string& message)
      : Error(ErrorCode::kNoViableCandidate, message), table_(std::move(table)) {}
  [[nodiscard]] const std::vector<CandidateScore>& table() const noexcept { return table_; }

 private:
  std::vector<CandidateScore> table_;
};

/// Draws candidate i: lists uniformly, ranges log-uniformly, keys in sorted
/// order, all from derive_seed(seed, i).
ModelSpec sample_candidate(const SearchSpace& space, std::uint64_t seed, std::size_t index);

/// Evaluates n_candidates specs by mean validation MSE over every fold of
/// every repeat and returns the lowest (first on ties). Candidates that throw
/// (divergence, degenerate design) score +inf; if all do,
/// NoViableCandidateError carries the table. `threads` > 1 evaluates
/// candidates concurrently with identical results.
SearchResult random_search(const SearchSpace& space, const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                           const CvConfig& cv, std::size_t n_candidates, std::uint64_t seed,
                           unsigned threads = 1);

}  // namespace solrad::ml
