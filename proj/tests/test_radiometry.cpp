#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "solrad/error.hpp"
#include "solrad/radiometry.hpp"
#include "support.hpp"

using namespace solrad;
using namespace std::chrono;
using solrad::testing::for_all;

namespace {

UtcInstant utc(int y, unsigned m, unsigned d, int h, int min = 0) {
  return sys_days{year{y} / month{m} / day{d}} + hours{h} + minutes{min};
}

CalibrationConfig unit_config() {
  CalibrationConfig c;
  c.k = 0.001;
  c.monthly_c.fill(1.0);
  return c;
}

// 4x4 north-up grid with origin (lon -77, lat 4) and 0.5 deg pixels.
RasterGrid grid_of(std::vector<std::uint16_t> values, UtcInstant t, int rows = 4, int cols = 4) {
  return RasterGrid(rows, cols, {-77.0, 0.5, 0.0, 4.0, 0.0, -0.5}, t, std::move(values));
}

std::vector<std::uint16_t> ramp(int n) {
  std::vector<std::uint16_t> v;
  for (int i = 0; i < n; ++i) v.push_back(static_cast<std::uint16_t>(i * 10));
  return v;
}

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no exception");
  return ErrorCode::kIo;
}

}  // namespace

TEST_CASE("raster text round trip") {
  const std::string text =
      "HGRID1\n2 2\n-77 0.04 0 4 0 -0.04\n2012-03-20T17:00:00Z\n0 100\n200 1023\n";
  const auto g = parse_grid(text);
  CHECK(g.rows() == 2);
  CHECK(g.cols() == 2);
  CHECK(g.values() == std::vector<std::uint16_t>{0, 100, 200, 1023});
  CHECK(g.timestamp() == utc(2012, 3, 20, 17));
  CHECK(g.geotransform()[1] == 0.04);
  CHECK(serialize_grid(g) == text);

  const auto dir = solrad::testing::fresh_dir("radiometry_io");
  const auto path = dir + "/a.hgrid";
  save_grid(g, path);
  const auto back = load_grid(path);
  CHECK(serialize_grid(back) == text);
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str() == text);
}

TEST_CASE("round trip holds for random grids") {
  for_all(100, 21, [](Rng& rng) {
    const int rows = 1 + static_cast<int>(rng.index(6)), cols = 1 + static_cast<int>(rng.index(6));
    std::vector<std::uint16_t> v;
    for (int i = 0; i < rows * cols; ++i) v.push_back(static_cast<std::uint16_t>(rng.index(1024)));
    const RasterGrid g(rows, cols,
                       {rng.uniform(-180, 0), rng.uniform(0.001, 1), 0.0, rng.uniform(0, 90), 0.0,
                        -rng.uniform(0.001, 1)},
                       utc(2012, 1, 1, 0) + seconds{static_cast<long long>(rng.index(1u << 28))}, v);
    const auto text = serialize_grid(g);
    const auto back = parse_grid(text);
    CHECK(back.values() == g.values());
    CHECK(back.geotransform() == g.geotransform());
    CHECK(back.timestamp() == g.timestamp());
    CHECK(serialize_grid(back) == text);
  });
}

TEST_CASE("malformed rasters are rejected") {
  const std::string head = "HGRID1\n2 2\n-77 0.04 0 4 0 -0.04\n2012-03-20T17:00:00Z\n";
  CHECK(code_of([&] { parse_grid(head + "0 100\n"); }) == ErrorCode::kParse);         // truncated
  CHECK(code_of([&] { parse_grid(head + "0 100\n200\n"); }) == ErrorCode::kParse);    // short row
  CHECK(code_of([&] { parse_grid(head + "0 100\n200 1024\n"); }) == ErrorCode::kParse);
  CHECK(code_of([&] { parse_grid(head + "0 100\n200 -1\n"); }) == ErrorCode::kParse);
  CHECK(code_of([&] { parse_grid(head + "0 100\n200 3\n1 1\n"); }) == ErrorCode::kParse);
  CHECK(code_of([&] { parse_grid("HGRID2\n" + head.substr(7) + "0 1\n2 3\n"); }) == ErrorCode::kParse);
  CHECK_THROWS_AS(parse_grid("HGRID1\n2 2\n-77 0.04 0.1 4 0 -0.04\n2012-03-20T17:00:00Z\n0 1\n2 3\n"), Error);
  CHECK_THROWS_AS(parse_grid("HGRID1\n2 2\n-77 0.04 0 4 0 -0.04\n2012-03-20 17:00\n0 1\n2 3\n"), Error);
  CHECK_THROWS_AS(RasterGrid(2, 2, {0, 1, 0.5, 0, 0, -1}, utc(2012, 1, 1, 0), {0, 1, 2, 3}), Error);
  CHECK_THROWS_AS(RasterGrid(2, 2, {0, 1, 0, 0, 0, -1}, utc(2012, 1, 1, 0), {0, 1, 2}), Error);
  CHECK_THROWS_AS(RasterGrid(1, 1, {0, 1, 0, 0, 0, -1}, utc(2012, 1, 1, 0), {1024}), Error);
  CHECK_THROWS_AS(RasterGrid(1, 1, {0, 0, 0, 0, 0, -1}, utc(2012, 1, 1, 0), {1}), Error);
  CHECK_THROWS_AS(load_grid("/nonexistent/solrad.hgrid"), Error);
}

TEST_CASE("nearest-neighbour sampling") {
  const auto g = grid_of(ramp(16), utc(2012, 3, 20, 17));
  // cell (1, 2) has centre lon -77 + 2.5*0.5, lat 4 - 1.5*0.5
  CHECK(sample_digital_number(g, 3.25, -75.75) == 60);
  CHECK(sample_digital_number(g, 4.0, -77.0) == 0);  // origin corner belongs to cell (0,0)
  CHECK(sample_digital_number(g, 2.0000001, -75.0000001) == 150);
  CHECK(code_of([&] { sample_digital_number(g, 4.0, -75.0); }) == ErrorCode::kOutOfBounds);  // max edge
  CHECK(code_of([&] { sample_digital_number(g, 2.0, -76.0); }) == ErrorCode::kOutOfBounds);
  CHECK(code_of([&] { sample_digital_number(g, 3.0, -77.25); }) == ErrorCode::kOutOfBounds);
  CHECK(code_of([&] { sample_digital_number(g, 4.25, -76.0); }) == ErrorCode::kOutOfBounds);

  for_all(200, 22, [&](Rng& rng) {
    const int r = static_cast<int>(rng.index(4)), c = static_cast<int>(rng.index(4));
    const double lon = -77.0 + (c + rng.uniform(0.01, 0.99)) * 0.5;
    const double lat = 4.0 - (r + rng.uniform(0.01, 0.99)) * 0.5;
    CHECK(sample_digital_number(g, lat, lon) == g.at(r, c));
  });
}

TEST_CASE("3x3 window mean clips at the edge") {
  const auto g = grid_of(ramp(16), utc(2012, 3, 20, 17));
  // interior cell (1,1): rows 0..2, cols 0..2
  CHECK(sample_window_mean(g, 3.25, -76.25) == doctest::Approx((0 + 10 + 20 + 40 + 50 + 60 + 80 + 90 + 100) / 9.0));
  // corner cell (0,0): rows 0..1, cols 0..1
  CHECK(sample_window_mean(g, 3.9, -76.9) == doctest::Approx((0 + 10 + 40 + 50) / 4.0));
}

TEST_CASE("calibration stages") {
  auto cfg = unit_config();
  CHECK(nominal_reflectance(29, cfg) == 0.0);
  cfg.k = 0.37;
  CHECK(nominal_reflectance(29, cfg) == 0.0);
  cfg.k = 0.001;
  CHECK(nominal_reflectance(129, cfg) == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(nominal_reflectance(0, cfg) == doctest::Approx(-0.029).epsilon(1e-14));

  CHECK(corrected_reflectance(0.2, 5, cfg) == 0.2);
  cfg.monthly_c[4] = 1.1;
  CHECK(corrected_reflectance(0.2, 5, cfg) == doctest::Approx(0.22).epsilon(1e-14));
  CHECK(corrected_reflectance(0.0, 5, cfg) == 0.0);
  CHECK(corrected_reflectance(0.2, 4, cfg) == 0.2);
  CHECK_THROWS_AS(corrected_reflectance(0.2, 13, cfg), Error);

  CHECK(pixel_reflectance(0.3, 1.0, 0.0) == 0.3);
  CHECK(pixel_reflectance(0.4, 1.0, 60.0) == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(pixel_reflectance(0.4, 1.01, 0.0) == doctest::Approx(0.4 * 1.0201).epsilon(1e-12));
  CHECK(code_of([] { pixel_reflectance(0.4, 1.0, 89.0); }) == ErrorCode::kLowSun);
  CHECK(code_of([] { pixel_reflectance(0.4, 1.0, 85.0); }) == ErrorCode::kLowSun);
  CHECK_NOTHROW(pixel_reflectance(0.4, 1.0, 84.99));
  CHECK_NOTHROW(pixel_reflectance(0.4, 1.0, 87.0, 88.0));

  // the documented chain with theta_z = 0 and r = 1
  const double rp = pixel_reflectance(corrected_reflectance(nominal_reflectance(529, unit_config()), 3,
                                                            unit_config()),
                                      1.0, 0.0);
  CHECK(rp == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("configuration validation") {
  auto c = unit_config();
  CHECK_NOTHROW(c.validate());
  c.k = 0.0;
  CHECK_THROWS_AS(c.validate(), Error);
  c = unit_config();
  c.monthly_c[7] = -1.0;
  CHECK_THROWS_AS(c.validate(), Error);
  c = unit_config();
  c.space_count = -1;
  CHECK_THROWS_AS(c.validate(), Error);
  c = unit_config();
  c.zenith_cutoff_deg = 91.0;
  CHECK_THROWS_AS(c.validate(), Error);
}

TEST_CASE("full calibration against the solar geometry") {
  const Site cali(3.44779, -76.51918, -5.0);
  const auto cfg = unit_config();

  SUBCASE("space count everywhere gives zero reflectance") {
    const auto g = grid_of(std::vector<std::uint16_t>(16, 29), utc(2012, 3, 20, 17));
    const auto s = calibrate(g, cali, cfg);
    CHECK(s.valid);
    REQUIRE(s.r_p);
    CHECK(*s.r_p == 0.0);
    CHECK(s.r_prev == 0.0);
  }
  SUBCASE("chain matches hand evaluation") {
    const auto g = grid_of(std::vector<std::uint16_t>(16, 529), utc(2012, 3, 20, 17));
    const auto s = calibrate(g, cali, cfg);
    const auto geo = compute_geometry({cali, g.timestamp()});
    CHECK(s.nd == 529);
    CHECK(s.r_prev == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(s.r_post == s.r_prev);
    CHECK(s.zenith_deg == doctest::Approx(geo.zenith_angle_deg).epsilon(1e-12));
    CHECK(s.earth_sun_distance_au == doctest::Approx(geo.earth_sun_distance_au).epsilon(1e-14));
    const double expect = 0.5 * geo.earth_sun_distance_au * geo.earth_sun_distance_au /
                          std::cos(geo.zenith_angle_deg * std::numbers::pi / 180.0);
    REQUIRE(s.r_p);
    CHECK(*s.r_p == doctest::Approx(expect).epsilon(1e-12));
    // near local noon in Cali on the equinox the sun is close to zenith
    CHECK(s.zenith_deg < 10.0);
  }
  SUBCASE("night raster is a low-sun error or an invalid flagged sample") {
    const auto g = grid_of(std::vector<std::uint16_t>(16, 300), utc(2012, 3, 20, 5));
    CHECK(code_of([&] { calibrate(g, cali, cfg); }) == ErrorCode::kLowSun);
    const auto s = calibrate_flagged(g, cali, cfg);
    CHECK_FALSE(s.valid);
    CHECK_FALSE(s.r_p.has_value());
    CHECK(s.r_prev == doctest::Approx(0.271));
  }
  SUBCASE("site outside the grid") {
    const Site away(10.0, -76.5, -5.0);
    const auto g = grid_of(std::vector<std::uint16_t>(16, 300), utc(2012, 3, 20, 17));
    CHECK(code_of([&] { calibrate(g, away, cfg); }) == ErrorCode::kOutOfBounds);
    CHECK(code_of([&] { calibrate_flagged(g, away, cfg); }) == ErrorCode::kOutOfBounds);
  }
}

TEST_CASE("calibration is linear in the digital number and keeps its sign") {
  const Site cali(3.44779, -76.51918, -5.0);
  for_all(200, 23, [&](Rng& rng) {
    CalibrationConfig cfg;
    cfg.k = rng.log_uniform(1e-4, 1e-2);
    for (auto& c : cfg.monthly_c) c = rng.uniform(0.8, 1.2);
    cfg.space_count = static_cast<int>(rng.index(60));
    const auto t = utc(2012, 1, 1, 13) + days{rng.index(366)} + minutes{rng.index(8 * 60)};
    const int n1 = static_cast<int>(rng.index(1024)), n2 = static_cast<int>(rng.index(1024));
    const auto a = calibrate_flagged(grid_of(std::vector<std::uint16_t>(16, n1), t), cali, cfg);
    const auto b = calibrate_flagged(grid_of(std::vector<std::uint16_t>(16, n2), t), cali, cfg);
    if (!a.valid) return;
    const int m = static_cast<int>(unsigned(year_month_day{floor<days>(to_local_clock(t, -5.0))}.month()));
    const double slope = cfg.k * cfg.monthly_c[m - 1] * a.earth_sun_distance_au * a.earth_sun_distance_au /
                         std::cos(a.zenith_deg * std::numbers::pi / 180.0);
    CHECK(*a.r_p - *b.r_p == doctest::Approx(slope * (n1 - n2)).epsilon(1e-12).scale(1.0));
    CHECK(std::abs(*a.r_p - *b.r_p - slope * (n1 - n2)) <= 1e-12);
    const int sign = (n1 > cfg.space_count) - (n1 < cfg.space_count);
    CHECK(((*a.r_p > 0) - (*a.r_p < 0)) == sign);
  });
}

TEST_CASE("inverse calibration reproduces the target reflectance") {
  auto cfg = unit_config();
  cfg.monthly_c[2] = 1.07;
  for_all(100, 24, [&](Rng& rng) {
    const double rp = rng.uniform(0.0, 0.9), r = rng.uniform(0.983, 1.017), z = rng.uniform(0, 80);
    const double nd = digital_number_for_reflectance(rp, 3, r, z, cfg);
    const double back = pixel_reflectance(corrected_reflectance(nominal_reflectance(nd, cfg), 3, cfg), r, z);
    CHECK(back == doctest::Approx(rp).epsilon(1e-9).scale(1.0));
  });
}
