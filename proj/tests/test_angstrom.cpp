#include <doctest.h>

#include <cmath>
#include <vector>

#include "solrad/angstrom.hpp"
#include "solrad/error.hpp"
#include "solrad/solar_geometry.hpp"
#include "support.hpp"

using namespace solrad;
using namespace std::chrono;
using solrad::testing::for_all;

namespace {

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no exception");
  return ErrorCode::kIo;
}

// Daily records generated from the estimate equation with the clear fraction
// standing in for n/N, so the fit must recover a and b exactly.
std::vector<DailyGroundRecord> generated_month(int month, double a, double b, Rng& rng, int days_in = 28) {
  std::vector<DailyGroundRecord> out;
  for (int d = 1; d <= days_in; ++d) {
    const year_month_day date{year{2012}, std::chrono::month{static_cast<unsigned>(month)},
                              day{static_cast<unsigned>(d)}};
    const int doy = day_of_year(date);
    const double n_len = day_length(3.44779, declination(doy));
    const double h_ext = extraterrestrial_daily(3.44779, doy);
    const double nc = rng.uniform(0, 1);
    DailyGroundRecord r;
    r.date = date;
    r.day_length_h = n_len;
    r.h_ext = h_ext;
    r.sunshine_hours = (1.0 - nc) * n_len;
    r.h_measured = estimate_radiation(a, b, nc, h_ext);
    out.push_back(r);
  }
  return out;
}

}  // namespace

TEST_CASE("noiseless month recovers the generating coefficients") {
  Rng rng(7);
  const auto recs = generated_month(1, 0.207, 0.419, rng);
  const auto c = fit_monthly(recs);
  const auto& m = c.month(1);
  CHECK(m.status == FitStatus::kFitted);
  CHECK(std::abs(m.a - 0.207) <= 1e-9);
  CHECK(std::abs(m.b - 0.419) <= 1e-9);
  CHECK(m.r_squared == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(m.sample_count == 28);
  CHECK(c.fitted_count() == 1);
  CHECK(c.month(2).status == FitStatus::kNoData);
}

TEST_CASE("fit_monthly recovers random coefficients in every month") {
  for_all(20, 51, [](Rng& rng) {
    std::vector<DailyGroundRecord> recs;
    std::array<double, 12> a{}, b{};
    for (int m = 1; m <= 12; ++m) {
      a[m - 1] = rng.uniform(0.1, 0.35);
      b[m - 1] = rng.uniform(0.3, 0.6);
      const auto month = generated_month(m, a[m - 1], b[m - 1], rng, 3 + static_cast<int>(rng.index(26)));
      recs.insert(recs.end(), month.begin(), month.end());
    }
    const auto c = fit_monthly(recs);
    CHECK(c.fitted_count() == 12);
    for (int m = 1; m <= 12; ++m) {
      CHECK(std::abs(c.month(m).a - a[m - 1]) <= 1e-9);
      CHECK(std::abs(c.month(m).b - b[m - 1]) <= 1e-9);
    }
  });
}

TEST_CASE("degenerate and flat months") {
  Rng rng(8);
  auto recs = generated_month(3, 0.2, 0.4, rng);
  for (auto& r : recs) r.sunshine_hours = 0.5 * r.day_length_h;
  auto feb = generated_month(2, 0.25, 0.5, rng);
  recs.insert(recs.end(), feb.begin(), feb.end());
  const auto c = fit_monthly(recs);
  CHECK(c.month(3).status == FitStatus::kDegenerate);
  CHECK(c.month(2).status == FitStatus::kFitted);

  std::vector<double> x{0.1, 0.4, 0.7}, flat{0.3, 0.3, 0.3};
  const auto f = fit_line(x, flat);
  CHECK(f.intercept == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(f.slope == doctest::Approx(0.0).scale(1.0).epsilon(1e-15));
  CHECK(code_of([] { fit_line(std::vector<double>{0.5, 0.5, 0.5}, std::vector<double>{1, 2, 3}); }) ==
        ErrorCode::kDegenerateFit);
  CHECK(code_of([] { fit_line(std::vector<double>{0.5}, std::vector<double>{1}); }) == ErrorCode::kEmptyInput);
  CHECK(code_of([] { fit_line(std::vector<double>{0.5, 1}, std::vector<double>{1}); }) == ErrorCode::kPairing);
}

TEST_CASE("records without sunshine are skipped") {
  Rng rng(9);
  auto recs = generated_month(5, 0.2, 0.4, rng);
  for (std::size_t i = 0; i < recs.size(); i += 2) recs[i].sunshine_hours.reset();
  const auto c = fit_monthly(recs);
  CHECK(c.month(5).sample_count == 14);
  CHECK(std::abs(c.month(5).a - 0.2) < 1e-9);
  for (auto& r : recs) r.sunshine_hours.reset();
  CHECK(fit_monthly(recs).month(5).status == FitStatus::kNoData);
}

TEST_CASE("OLS residuals are orthogonal to the regressor") {
  for_all(200, 52, [](Rng& rng) {
    const std::size_t n = 3 + rng.index(200);
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = rng.uniform(0, 1);
      y[i] = 0.2 + 0.45 * x[i] + 0.05 * rng.normal();
    }
    const auto f = fit_line(x, y);
    double dot = 0.0, sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double e = y[i] - f.intercept - f.slope * x[i];
      dot += e * x[i];
      sum += e;
    }
    CHECK(std::abs(dot) <= 1e-9);
    CHECK(std::abs(sum) <= 1e-9);
    CHECK(f.r_squared >= 0.0);
    CHECK(f.r_squared <= 1.0);
  });
}

TEST_CASE("estimate examples and bounds") {
  CHECK(estimate_radiation(0.207, 0.419, 0.0, 1000.0) == doctest::Approx(626.0).epsilon(1e-14));
  CHECK(estimate_radiation(0.207, 0.419, 1.0, 1000.0) == doctest::Approx(207.0).epsilon(1e-14));
  CHECK(estimate_radiation(0.0, 1.0, 0.5, 100.0) == 50.0);
  for_all(300, 53, [](Rng& rng) {
    const double a = rng.uniform(0, 0.5), b = rng.uniform(0.01, 0.7), h = rng.uniform(0, 12000);
    const double n1 = rng.uniform(0, 1), n2 = rng.uniform(0, 1);
    const double e1 = estimate_radiation(a, b, n1, h), e2 = estimate_radiation(a, b, n2, h);
    CHECK(e1 >= a * h - 1e-9);
    CHECK(e1 <= (a + b) * h + 1e-9);
    if (n1 <= n2) CHECK(e1 >= e2);
    // affine in n_c
    const double mid = estimate_radiation(a, b, 0.5 * (n1 + n2), h);
    CHECK(mid == doctest::Approx(0.5 * (e1 + e2)).epsilon(1e-12));
  });
}

TEST_CASE("statistical model evaluation") {
  const auto t0 = UtcInstant{} + hours{24 * 15340};
  std::vector<PredictionPair> same, off;
  for (int i = 0; i < 10; ++i) {
    same.push_back({t0 + days{i}, 4000.0 + 100 * i, 4000.0 + 100 * i});
    off.push_back({t0 + days{i}, 4000.0 + 100 * i, 99.0});
  }
  const auto rep = evaluate_statistical_model(same);
  CHECK(rep.metrics.r2 == 1.0);
  CHECK(rep.metrics.rmse == 0.0);
  CHECK(rep.metrics.n == 10);
  CHECK(rep.scatter_csv.rfind("timestamp,observed,estimated\n", 0) == 0);
  CHECK(evaluate_statistical_model(off).metrics.r2 <= 0.0);
  CHECK(code_of([&] { evaluate_statistical_model(std::span(same).first(1)); }) == ErrorCode::kPairing);
}

TEST_CASE("coefficient CSV round trip") {
  Rng rng(10);
  auto recs = generated_month(1, 0.207, 0.419, rng);
  const auto c = fit_monthly(recs);
  const auto csv = c.to_csv("# x\n");
  CHECK(csv.find("month,a,b,r2,n\n") != std::string::npos);
  CHECK(csv.find("\n2,,,,0\n") != std::string::npos);
  const auto back = MonthlyCoefficients::from_csv(csv);
  CHECK(back.to_csv("# x\n") == csv);
  CHECK(back.month(1).a == c.month(1).a);
  CHECK(back.month(1).b == c.month(1).b);
  CHECK(back.fitted_count() == 1);
  CHECK_THROWS_AS(MonthlyCoefficients::from_csv("month,a,b\n"), Error);
  CHECK_THROWS_AS(MonthlyCoefficients::from_csv("month,a,b,r2,n\n13,0.1,0.2,0.9,3\n"), Error);
  CHECK_THROWS_AS((void)c.month(0), Error);
}

TEST_CASE("ground daily CSV and units") {
  const std::vector<GroundDay> days{{year{2012} / 1 / 1, 5123.5, 6.25}, {year{2012} / 1 / 2, 4000.0, std::nullopt}};
  const auto csv = ground_daily_csv(days, "# m\n");
  CHECK(csv == "# m\ndate,radiation,sunshine_hours\n2012-01-01,5123.5,6.25\n2012-01-02,4000,\n");
  const auto back = parse_ground_daily_csv(csv);
  REQUIRE(back.size() == 2);
  CHECK(back[0].sunshine_hours == 6.25);
  CHECK_FALSE(back[1].sunshine_hours);
  CHECK_THROWS_AS(parse_ground_daily_csv("date,radiation,sunshine_hours\n2012-01-01,-1,\n"), Error);
  CHECK_THROWS_AS(parse_ground_daily_csv("date,radiation,sunshine_hours\n2012-01-01,10,25\n"), Error);
  CHECK_THROWS_AS(parse_ground_daily_csv("date,radiation,sunshine_hours\n2012-13-01,10,2\n"), Error);

  CHECK(from_wh_per_m2(1000.0, EnergyUnit::kWhPerM2) == 1000.0);
  CHECK(from_wh_per_m2(1000.0, EnergyUnit::kKJPerM2) == doctest::Approx(3600.0));
  CHECK(from_wh_per_m2(1000.0, EnergyUnit::kMJPerM2) == doctest::Approx(3.6));
  CHECK(parse_energy_unit("kJ/m2") == EnergyUnit::kKJPerM2);
  CHECK(code_of([] { parse_energy_unit("cal/cm2"); }) == ErrorCode::kConfig);
}
