#include <doctest.h>

#include <cmath>
#include <vector>

#include "solrad/error.hpp"
#include "solrad/metrics.hpp"
#include "support.hpp"

using namespace solrad;
using solrad::testing::for_all;

namespace {

using Vec = std::vector<double>;

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no exception");
  return ErrorCode::kIo;
}

// Brute-force oracles written independently of the library, long double
// accumulation.
struct Oracle {
  long double mbe, r2, rmse, rrmse;
};

Oracle oracle(const Vec& y, const Vec& x) {
  const std::size_t n = x.size();
  long double sx = 0, se = 0, se2 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += x[i];
    se += (long double)y[i] - x[i];
    se2 += ((long double)y[i] - x[i]) * ((long double)y[i] - x[i]);
  }
  const long double xbar = sx / n;
  long double sst = 0;
  for (double v : x) sst += (v - xbar) * (v - xbar);
  const long double rmse = std::sqrt(se2 / n);
  return {se / n, 1.0L - se2 / sst, rmse, rmse / xbar * 100.0L};
}

const Vec kX{100, 200, 300};
const Vec kY{110, 190, 310};

}  // namespace

TEST_CASE("worked example") {
  CHECK(mbe(kY, kX) == doctest::Approx(10.0 / 3.0).epsilon(1e-14));
  CHECK(r2(kY, kX) == doctest::Approx(0.985).epsilon(1e-14));
  CHECK(rmse(kY, kX) == doctest::Approx(10.0).epsilon(1e-14));
  CHECK(rrmse(kY, kX) == doctest::Approx(5.0).epsilon(1e-14));
}

TEST_CASE("perfect and mean predictors") {
  CHECK(mbe(kX, kX) == 0.0);
  CHECK(r2(kX, kX) == 1.0);
  CHECK(rmse(kX, kX) == 0.0);
  CHECK(rrmse(kX, kX) == 0.0);
  const Vec mean(3, 200.0);
  CHECK(r2(mean, kX) == 0.0);
  // disjoint constant series is worse than the mean predictor
  CHECK(r2(Vec(3, 1000.0), kX) < 0.0);
}

TEST_CASE("sign flip of residuals flips MBE") {
  Vec flipped;
  for (std::size_t i = 0; i < kX.size(); ++i) flipped.push_back(2 * kX[i] - kY[i]);
  CHECK(mbe(flipped, kX) == doctest::Approx(-mbe(kY, kX)).epsilon(1e-14));
}

TEST_CASE("undefined inputs") {
  CHECK(code_of([] { mbe(Vec{1, 2}, Vec{1}); }) == ErrorCode::kPairing);
  CHECK(code_of([] { rmse(Vec{}, Vec{}); }) == ErrorCode::kEmptyInput);
  CHECK(code_of([] { r2(Vec{1, 2}, Vec{5, 5}); }) == ErrorCode::kUndefinedMetric);
  CHECK(code_of([] { r2(Vec{1}, Vec{5}); }) == ErrorCode::kUndefinedMetric);
  CHECK(code_of([] { rrmse(Vec{1, 2}, Vec{-1, 1}); }) == ErrorCode::kUndefinedMetric);
}

TEST_CASE("bands") {
  CHECK(classify_rrmse(0.0) == Band::kExcellent);
  CHECK(classify_rrmse(9.99) == Band::kExcellent);
  CHECK(classify_rrmse(10.0) == Band::kGood);
  CHECK(classify_rrmse(20.0) == Band::kGood);
  CHECK(classify_rrmse(20.01) == Band::kFair);
  CHECK(classify_rrmse(22.3) == Band::kFair);
  CHECK(classify_rrmse(30.0) == Band::kFair);
  CHECK(classify_rrmse(30.01) == Band::kPoor);
  CHECK(code_of([] { classify_rrmse(-0.1); }) == ErrorCode::kDomain);
  CHECK(code_of([] { classify_rrmse(std::nan("")); }) == ErrorCode::kDomain);
  CHECK(std::string(to_string(Band::kFair)) == "Fair");
}

TEST_CASE("metrics match a brute-force oracle") {
  for_all(300, 41, [](Rng& rng) {
    const std::size_t n = 2 + rng.index(999);
    Vec x(n), y(n);
    const double scale = rng.log_uniform(1e-2, 1e4);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = scale * rng.uniform(0.1, 2.0);
      y[i] = x[i] + scale * rng.normal() * rng.uniform(0, 0.5);
    }
    const auto o = oracle(y, x);
    CHECK(std::abs(mbe(y, x) - (double)o.mbe) <= 1e-12 * scale);
    CHECK(std::abs(rmse(y, x) - (double)o.rmse) <= 1e-12 * scale);
    CHECK(std::abs(r2(y, x) - (double)o.r2) <= 1e-12 * std::max(1.0, std::abs((double)o.r2)));
    CHECK(std::abs(rrmse(y, x) - (double)o.rrmse) <= 1e-12 * std::max(1.0, (double)o.rrmse));

    // bias-variance identity
    long double m = 0, v = 0;
    for (std::size_t i = 0; i < n; ++i) m += y[i] - x[i];
    m /= n;
    for (std::size_t i = 0; i < n; ++i) v += (y[i] - x[i] - m) * (y[i] - x[i] - m);
    v /= n;
    const double lhs = rmse(y, x) * rmse(y, x), rhs = mbe(y, x) * mbe(y, x) + (double)v;
    CHECK(std::abs(lhs - rhs) <= 1e-9 * std::max(1.0, lhs));

    // common positive scaling
    const double c = rng.log_uniform(0.01, 100);
    Vec xc(x), yc(y);
    for (auto& e : xc) e *= c;
    for (auto& e : yc) e *= c;
    CHECK(rrmse(yc, xc) == doctest::Approx(rrmse(y, x)).epsilon(1e-10));
    CHECK(r2(yc, xc) == doctest::Approx(r2(y, x)).epsilon(1e-10).scale(1.0));
    CHECK(mbe(yc, xc) == doctest::Approx(c * mbe(y, x)).epsilon(1e-10).scale(c * scale));
    CHECK(rmse(yc, xc) == doctest::Approx(c * rmse(y, x)).epsilon(1e-10));
  });
}

namespace {

CellPredictions cell(const std::string& regime, const std::string& family, double noise) {
  CellPredictions c{regime, family, {}, {}};
  const auto t0 = UtcInstant{} + std::chrono::hours{24 * 15340};
  for (int i = 0; i < 20; ++i) {
    const double obs = 100.0 + 10.0 * i;
    const double est = obs + (i % 2 ? noise : -noise);
    (i < 14 ? c.train : c.test).push_back({t0 + std::chrono::hours{i}, obs, est});
  }
  return c;
}

}  // namespace

TEST_CASE("report grid") {
  const std::vector<std::string> regimes{"M1", "M2", "M3"};
  const std::vector<std::string> families{"linear", "gradient_boosting", "xgboost", "random_forest", "mlp"};
  std::vector<CellPredictions> cells;
  for (const auto& r : regimes) {
    for (const auto& f : families) cells.push_back(cell(r, f, 0.0));
  }
  const auto report = build_report(cells, regimes, families);
  CHECK(report.block_count() == 15);
  for (const auto& r : regimes) {
    for (const auto& f : families) {
      const auto b = report.get(r, f);
      REQUIRE(b);
      CHECK(b->band == Band::kExcellent);
      CHECK(b->r2_test == 1.0);
    }
  }
  const auto csv = report.to_csv();
  CHECK(csv.rfind("regime,family,metric,split,value,band\n", 0) == 0);
  // 8 rows per block plus the header
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 15 * 8 + 1);
  CHECK(build_report(cells, regimes, families).to_csv() == csv);
  CHECK(build_report(cells, regimes, families).to_text() == report.to_text());
}

TEST_CASE("missing or undefined cells are noted, not fatal") {
  std::vector<CellPredictions> cells{cell("M1", "linear", 5.0)};
  auto bad = cell("M1", "mlp", 5.0);
  for (auto& p : bad.test) p.observed = 0.0;  // zero variance and zero mean
  cells.push_back(bad);
  const auto report = build_report(cells, {"M1", "M2"}, {"linear", "mlp"});
  CHECK(report.block_count() == 1);
  CHECK_FALSE(report.get("M1", "mlp"));
  CHECK_FALSE(report.get("M2", "linear"));
  const auto text = report.to_text();
  CHECK(text.find("M1/mlp absent") != std::string::npos);
  CHECK(text.find("n/a") != std::string::npos);
  const auto b = report.get("M1", "linear");
  REQUIRE(b);
  CHECK(b->rmse_test == doctest::Approx(5.0));
  CHECK(b->mbe_train == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("scatter CSV") {
  const auto t = UtcInstant{} + std::chrono::hours{24 * 15340 + 17};
  const std::vector<PredictionPair> p{{t, 1.5, 2.25}};
  const auto csv = scatter_csv(p, -5.0);
  CHECK(csv == "timestamp,observed,estimated\n2012-01-01T12:00:00-05:00,1.5,2.25\n");
}
