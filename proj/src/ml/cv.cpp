#include "solrad/ml/cv.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <optional>
#include <thread>

#include "solrad/dataset.hpp"
#include "solrad/ml/model.hpp"
#include "solrad/random.hpp"
#include "solrad/text.hpp"

namespace solrad::ml {

void CvConfig::validate(std::size_t records) const {
  if (n_splits < 2) throw Error(ErrorCode::kDomain, "n_splits must be >= 2");
  if (n_repeats < 1) throw Error(ErrorCode::kDomain, "n_repeats must be >= 1");
  if (static_cast<std::size_t>(n_splits) > records) {
    throw Error(ErrorCode::kDomain, "n_splits " + std::to_string(n_splits) + " exceeds the " +
                                        std::to_string(records) + " records");
  }
}

std::vector<Fold> repeated_kfold(std::size_t n, const CvConfig& cv) {
  cv.validate(n);
  const auto k = static_cast<std::size_t>(cv.n_splits);
  std::vector<Fold> out;
  std::vector<std::size_t> order(n);
  for (int rep = 0; rep < cv.n_repeats; ++rep) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(derive_seed(cv.seed, static_cast<std::uint64_t>(rep)));
    rng.shuffle(std::span<std::size_t>(order));
    std::vector<int> fold_of(n);
    // the first n % k folds take one extra record
    std::size_t pos = 0;
    for (std::size_t f = 0; f < k; ++f) {
      const std::size_t size = n / k + (f < n % k ? 1 : 0);
      for (std::size_t i = 0; i < size; ++i) fold_of[order[pos++]] = static_cast<int>(f);
    }
    for (std::size_t f = 0; f < k; ++f) {
      Fold fold;
      fold.repeat = rep;
      fold.fold = static_cast<int>(f);
      for (std::size_t i = 0; i < n; ++i) {
        (fold_of[i] == static_cast<int>(f) ? fold.validate : fold.train).push_back(i);
      }
      out.push_back(std::move(fold));
    }
  }
  return out;
}

std::string score_table_text(const std::vector<CandidateScore>& table) {
  std::string out;
  for (const auto& row : table) {
    out += "candidate=" + std::to_string(row.index) + '\n';
    out += "score=" + (row.failed ? std::string("inf") : format_real(row.score)) + '\n';
    if (row.failed) out += "failure=" + row.message + '\n';
    std::string folds;
    for (std::size_t i = 0; i < row.fold_mse.size(); ++i) {
      if (i) folds += ',';
      folds += format_real(row.fold_mse[i]);
    }
    out += "fold_mse=" + folds + '\n';
    out += row.spec.to_text();
    out += '\n';
  }
  return out;
}

ModelSpec sample_candidate(const SearchSpace& space, std::uint64_t seed, std::size_t index) {
  const auto cand_seed = derive_seed(seed, static_cast<std::uint64_t>(index));
  Rng rng(cand_seed);
  std::map<std::string, ParamValue> params;
  for (const auto& [key, domain] : space.domains()) {
    if (const auto* list = std::get_if<std::vector<ParamValue>>(&domain)) {
      params[key] = (*list)[static_cast<std::size_t>(rng.index(list->size()))];
    } else {
      const auto& r = std::get<LogUniform>(domain);
      params[key] = rng.log_uniform(r.lo, r.hi);
    }
  }
  return ModelSpec::make(space.family(), params, cand_seed);
}

namespace {

CandidateScore evaluate_candidate(const ModelSpec& spec, std::size_t index, const Eigen::MatrixXd& x,
                                  const Eigen::VectorXd& y, const std::vector<Fold>& folds) {
  CandidateScore row{index, spec, 0.0, {}, false, {}};
  try {
    double total = 0.0;
    for (const auto& fold : folds) {
      const auto model = fit(spec, take_rows(x, fold.train), take_rows(y, fold.train));
      const auto pred = predict(model, take_rows(x, fold.validate));
      const double mse = (pred - take_rows(y, fold.validate)).squaredNorm() /
                         static_cast<double>(fold.validate.size());
      if (!std::isfinite(mse)) throw Error(ErrorCode::kDivergence, "non-finite validation error");
      row.fold_mse.push_back(mse);
      total += mse;
    }
    row.score = total / static_cast<double>(folds.size());
  } catch (const Error& e) {
    row.failed = true;
    row.score = std::numeric_limits<double>::infinity();
    row.message = std::string(to_string(e.code())) + ": " + e.what();
  }
  return row;
}

}  // namespace

SearchResult random_search(const SearchSpace& space, const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                           const CvConfig& cv, std::size_t n_candidates, std::uint64_t seed,
                           unsigned threads) {
  if (n_candidates < 1) throw Error(ErrorCode::kDomain, "n_candidates must be >= 1");
  if (x.rows() != y.size()) throw Error(ErrorCode::kShape, "design rows and target length differ");
  const auto folds = repeated_kfold(static_cast<std::size_t>(x.rows()), cv);

  std::vector<ModelSpec> specs;
  specs.reserve(n_candidates);
  for (std::size_t i = 0; i < n_candidates; ++i) specs.push_back(sample_candidate(space, seed, i));

  std::vector<std::optional<CandidateScore>> rows(n_candidates);
  std::atomic<std::size_t> next{0};
  const auto work = [&] {
    for (std::size_t i = next++; i < n_candidates; i = next++) {
      rows[i] = evaluate_candidate(specs[i], i, x, y, folds);
    }
  };
  threads = std::max(1U, std::min<unsigned>(threads, static_cast<unsigned>(n_candidates)));
  if (threads == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work);
  }

  std::vector<CandidateScore> table;
  table.reserve(n_candidates);
  for (auto& r : rows) table.push_back(std::move(*r));
  std::size_t best = 0;
  for (std::size_t i = 1; i < table.size(); ++i) {
    if (table[i].score < table[best].score) best = i;
  }
  if (table[best].failed) {
    throw NoViableCandidateError(std::move(table), "every search candidate failed");
  }
  return SearchResult{table[best].spec, table[best].score, std::move(table)};
}

}  // namespace solrad::ml
