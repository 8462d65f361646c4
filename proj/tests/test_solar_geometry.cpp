#include <doctest.h>

#include <cmath>
#include <numbers>

#include "solrad/error.hpp"
#include "solrad/solar_geometry.hpp"
#include "support.hpp"

using namespace solrad;
using namespace std::chrono;
using solrad::testing::for_all;

namespace {

constexpr double kPi = std::numbers::pi;
double rad(double deg) { return deg * kPi / 180.0; }
double deg(double r) { return r * 180.0 / kPi; }

// Low-precision solar ephemeris (mean anomaly plus equation of centre),
// accurate to ~0.01 deg; evaluated at noon UTC of day n in 2013, a year in
// the middle of the leap cycle.
struct Ephemeris {
  double declination_deg;
  double eot_min;
  double distance_au;
};

Ephemeris ephemeris(int n) {
  const double days = 4383.0 + (n - 1);  // 2013-01-01 12:00 relative to J2000.0
  const double g = rad(357.529 + 0.98560028 * days);
  const double l = 280.459 + 0.98564736 * days;
  const double lambda = rad(l + 1.915 * std::sin(g) + 0.020 * std::sin(2 * g));
  const double eps = rad(23.439 - 0.00000036 * days);
  const double ra = std::atan2(std::cos(eps) * std::sin(lambda), std::cos(lambda));
  double diff = std::fmod(l - deg(ra), 360.0);
  if (diff > 180.0) diff -= 360.0;
  if (diff < -180.0) diff += 360.0;
  return {deg(std::asin(std::sin(eps) * std::sin(lambda))), 4.0 * diff,
          1.00014 - 0.01671 * std::cos(g) - 0.00014 * std::cos(2 * g)};
}


UtcInstant utc(int y, unsigned m, unsigned d, int h, int min = 0) {
  return sys_days{year{y} / month{m} / day{d}} + hours{h} + minutes{min};
}

}  // namespace

TEST_CASE("declination near solstices and equinox") {
  CHECK(std::abs(declination(80)) <= 0.6);
  CHECK(std::abs(declination(172) - 23.45) <= 0.3);
  CHECK(std::abs(declination(355) + 23.45) <= 0.3);
}

TEST_CASE("declination tracks a solar ephemeris all year") {
  for (int d = 1; d <= 366; ++d) {
    CAPTURE(d);
    CHECK(std::abs(declination(d) - ephemeris(d).declination_deg) < 0.5);
    CHECK(std::abs(declination(d)) <= 23.6);
  }
}

TEST_CASE("half-year antisymmetry of declination") {
  // d + 182.5 is not an integer day; average the two neighbours. The real
  // sun is not antisymmetric to 1 deg around the equinoxes (perihelion
  // makes the winter half-year shorter), so the residual must match the
  // ephemeris residual and stays under 1 deg near the solstices.
  double worst = 0.0;
  for (int d = 1; d <= 183; ++d) {
    CAPTURE(d);
    const double residual = declination(d) + 0.5 * (declination(d + 182) + declination(d + 183));
    const double reference = ephemeris(d).declination_deg +
                             0.5 * (ephemeris(d + 182).declination_deg + ephemeris(d + 183).declination_deg);
    CHECK(std::abs(residual - reference) < 0.3);
    worst = std::max(worst, std::abs(residual));
    if (d < 45 || d > 135) CHECK(std::abs(residual) < 1.0);
  }
  CHECK(worst < 1.6);
}

TEST_CASE("day of year outside 1..366 is a domain error") {
  for (int d : {0, -5, 367}) {
    CHECK_THROWS_AS(declination(d), Error);
    CHECK_THROWS_AS(equation_of_time(d), Error);
    CHECK_THROWS_AS(earth_sun_distance(d), Error);
    CHECK_THROWS_AS(eccentricity_correction(d), Error);
  }
  try {
    declination(0);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kDomain);
  }
  CHECK_NOTHROW(declination(366));
}

TEST_CASE("equation of time examples") {
  CHECK(std::abs(equation_of_time(46) + 14.0) <= 1.0);
  CHECK(std::abs(equation_of_time(306) - 16.0) <= 1.0);
  double sum = 0.0;
  for (int d = 1; d <= 365; ++d) {
    CHECK(equation_of_time(d) >= -15.0);
    CHECK(equation_of_time(d) <= 17.0);
    CHECK(std::abs(equation_of_time(d) - ephemeris(d).eot_min) < 1.0);
    sum += equation_of_time(d);
  }
  CHECK(std::abs(sum / 365.0) <= 0.5);
}

TEST_CASE("earth-sun distance") {
  CHECK(std::abs(earth_sun_distance(3) - 0.983) <= 0.001);
  CHECK(std::abs(earth_sun_distance(185) - 1.017) <= 0.001);
  double sum = 0.0;
  for (int d = 1; d <= 365; ++d) {
    const double r = earth_sun_distance(d);
    CHECK(r >= 0.981);
    CHECK(r <= 1.019);
    // r^2 = 1/E0 by construction
    CHECK(r * r * eccentricity_correction(d) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::abs(r - ephemeris(d).distance_au) < 0.0005);
    sum += r;
  }
  CHECK(std::abs(sum / 365.0 - 1.0) <= 0.002);
}

TEST_CASE("true solar time") {
  SUBCASE("zero corrections return clock time") {
    CHECK(true_solar_time(9.25, -75.0, -5.0, 0.0) == doctest::Approx(9.25).epsilon(1e-15));
    CHECK(true_solar_time(0.0, 30.0, 2.0, 0.0) == 0.0);
  }
  SUBCASE("longitude correction by hand") {
    const double eot = 3.7;
    const double expected = 12.0 + 4.0 * (-76.53 + 75.0) / 60.0 + eot / 60.0;
    CHECK(true_solar_time(12.0, -76.53, -5.0, eot) == doctest::Approx(expected).epsilon(1e-14));
  }
  SUBCASE("wraps into [0, 24)") {
    const double t = true_solar_time(23.9, 0.0, -1.0, 10.0);  // +60 min +10 min
    CHECK(t == doctest::Approx(23.9 + 70.0 / 60.0 - 24.0).epsilon(1e-12));
    const double u = true_solar_time(0.1, 0.0, 1.0, -10.0);
    CHECK(u == doctest::Approx(0.1 - 70.0 / 60.0 + 24.0).epsilon(1e-12));
    for_all(200, 11, [](Rng& rng) {
      const double v = true_solar_time(rng.uniform(0, 24), rng.uniform(-180, 180), rng.uniform(-12, 14),
                                       rng.uniform(-15, 17));
      CHECK(v >= 0.0);
      CHECK(v < 24.0);
    });
  }
  SUBCASE("point form uses local clock and the day's equation of time") {
    const Site cali(3.44779, -76.53, -5.0);
    const GeoTemporalPoint p{cali, utc(2012, 3, 20, 17)};  // 12:00 local
    const double eot = equation_of_time(80);
    CHECK(true_solar_time(p) == doctest::Approx(12.0 + 4.0 * (-1.53) / 60.0 + eot / 60.0).epsilon(1e-12));
  }
}

TEST_CASE("zenith angle") {
  CHECK(zenith_angle(20.0, 20.0, 0.0) == doctest::Approx(0.0).scale(1).epsilon(1e-6));
  CHECK(zenith_angle(0.0, 0.0, 90.0) == doctest::Approx(90.0).epsilon(1e-12));
  CHECK(zenith_angle(3.4478, 0.0, 0.0) == doctest::Approx(3.4478).epsilon(1e-10));
  CHECK(hour_angle(12.0) == 0.0);
  CHECK(hour_angle(18.0) == doctest::Approx(90.0));

  for_all(200, 12, [](Rng& rng) {
    const double phi = rng.uniform(-90, 90), delta = rng.uniform(-23.45, 23.45);
    const double w = rng.uniform(-180, 180);
    const double z = zenith_angle(phi, delta, w);
    const double oracle = deg(std::acos(std::sin(rad(phi)) * std::sin(rad(delta)) +
                                        std::cos(rad(phi)) * std::cos(rad(delta)) * std::cos(rad(w))));
    CHECK(z == doctest::Approx(oracle).epsilon(1e-9));
    CHECK(z >= 0.0);
    CHECK(z <= 180.0);
    // monotone in |w|
    const double w2 = std::min(180.0, std::abs(w) + rng.uniform(0, 30));
    CHECK(zenith_angle(phi, delta, w2) >= z - 1e-9);
  });
}

TEST_CASE("day length") {
  for (double d : {-23.45, -10.0, 0.0, 12.0, 23.45}) CHECK(day_length(0.0, d) == doctest::Approx(12.0).epsilon(1e-14));
  for (double phi : {-60.0, -10.0, 3.4, 45.0, 66.0}) CHECK(day_length(phi, 0.0) == doctest::Approx(12.0).epsilon(1e-14));
  CHECK(day_length(70.0, 23.45) == 24.0);
  CHECK(day_length(70.0, -23.45) == 0.0);
  CHECK(day_length(0.0, 0.0) == 12.0);
  for_all(300, 13, [](Rng& rng) {
    const double phi = rng.uniform(-65, 65), delta = rng.uniform(-23.45, 23.45);
    CHECK(std::abs(day_length(phi, delta) + day_length(phi, -delta) - 24.0) <= 1e-9);
    const double n = day_length(rng.uniform(-90, 90), delta);
    CHECK(n >= 0.0);
    CHECK(n <= 24.0);
  });
}

TEST_CASE("daily extraterrestrial irradiation") {
  SUBCASE("equator at the equinox matches the closed form") {
    // the exact equinox falls between integer days; take the day whose
    // declination is nearest to zero and compare with its own E0
    int best = 79;
    for (int d = 75; d <= 85; ++d) {
      if (std::abs(declination(d)) < std::abs(declination(best))) best = d;
    }
    const double closed = 24.0 / kPi * 1367.0 * eccentricity_correction(best);
    CHECK(std::abs(extraterrestrial_daily(0.0, best) / closed - 1.0) < 0.02);
    CHECK(closed / eccentricity_correction(best) == doctest::Approx(10443.0).epsilon(1e-3));
  }
  SUBCASE("matches an independent evaluation of the daily integral") {
    for_all(200, 14, [](Rng& rng) {
      const double phi = rng.uniform(-89, 89);
      const int d = 1 + static_cast<int>(rng.index(366));
      const double dl = rad(declination(d)), p = rad(phi);
      const double ws = std::acos(std::clamp(-std::tan(p) * std::tan(dl), -1.0, 1.0));
      const double oracle = 24.0 / kPi * 1367.0 * eccentricity_correction(d) *
                            (std::cos(p) * std::cos(dl) * std::sin(ws) + ws * std::sin(p) * std::sin(dl));
      CHECK(extraterrestrial_daily(phi, d) == doctest::Approx(std::max(0.0, oracle)).epsilon(1e-12).scale(1.0));
      CHECK(extraterrestrial_daily(phi, d) >= 0.0);
    });
  }
  SUBCASE("polar night is zero") {
    CHECK(extraterrestrial_daily(80.0, 355) == 0.0);
    CHECK(extraterrestrial_daily(-80.0, 172) == 0.0);
  }
  SUBCASE("hemispheric symmetry") {
    // Orbital eccentricity (E0 varies ~7%) and the unequal half-years
    // (equinoxes ~186 days apart) break the literal d + 182 shift by up to
    // 15%. The geometric statement holds: with E0 divided out, H(phi, d)
    // equals H(-phi, d') for the day d' whose declination is opposite.
    for (double phi : {5.0, 20.0, 35.0, 50.0, 60.0}) {
      for (int d = 1; d <= 365; ++d) {
        int opposite = 1;
        for (int e = 1; e <= 365; ++e) {
          if (std::abs(declination(e) + declination(d)) < std::abs(declination(opposite) + declination(d))) {
            opposite = e;
          }
        }
        CAPTURE(phi);
        CAPTURE(d);
        const double a = extraterrestrial_daily(phi, d) / eccentricity_correction(d);
        const double b = extraterrestrial_daily(-phi, opposite) / eccentricity_correction(opposite);
        if (a > 500.0) CHECK(std::abs(a / b - 1.0) < 0.02);
      }
    }
    // the half-year shift itself is good to 2% near the equator
    for (int d = 1; d <= 183; ++d) {
      const double a = extraterrestrial_daily(10.0, d) / eccentricity_correction(d);
      const double b = extraterrestrial_daily(-10.0, d + 182) / eccentricity_correction(d + 182);
      CHECK(std::abs(a / b - 1.0) < 0.02);
    }
  }
}

TEST_CASE("instantaneous extraterrestrial irradiance") {
  CHECK(extraterrestrial_irradiance(1.0, 0.0) == 1367.0);
  CHECK(extraterrestrial_irradiance(1.0, 60.0) == doctest::Approx(683.5).epsilon(1e-12));
  CHECK(extraterrestrial_irradiance(1.0, 95.0) == 0.0);
  CHECK(extraterrestrial_irradiance(1.03, 90.0) == 0.0);
  const Site cali(3.44779, -76.51918, -5.0);
  for (int h = 0; h < 24; ++h) {
    const GeoTemporalPoint p{cali, utc(2012, 6, 1, h)};
    const auto g = compute_geometry(p);
    CAPTURE(h);
    CHECK(extraterrestrial_hourly(p) >= 0.0);
    if (g.zenith_angle_deg >= 90.0) CHECK(extraterrestrial_hourly(p) == 0.0);
    else CHECK(extraterrestrial_hourly(p) == doctest::Approx(1367.0 * eccentricity_correction(153) *
                                                              std::cos(rad(g.zenith_angle_deg))));
  }
}

TEST_CASE("site validation and the geometry bundle") {
  CHECK_THROWS_AS(Site(90.5, 0.0, 0.0), Error);
  CHECK_THROWS_AS(Site(0.0, -180.5, 0.0), Error);
  CHECK_THROWS_AS(Site(0.0, 0.0, 15.0), Error);
  CHECK_NOTHROW(Site(-90.0, 180.0, -12.0));

  const Site cali(3.44779, -76.51918, -5.0);
  // 2012-12-31 20:00 local is already 2013-01-01 UTC; the local date drives
  // the day of year
  const GeoTemporalPoint p{cali, utc(2013, 1, 1, 1)};
  CHECK(p.local_date() == year{2012} / month{12} / day{31});
  CHECK(p.local_clock_hour() == doctest::Approx(20.0));
  const auto g = compute_geometry(p);
  CHECK(g.declination_deg == declination(366));
  CHECK(g.zenith_angle_deg > 90.0);
  CHECK(g.extraterrestrial_wm2 == 0.0);
  CHECK(g.day_length_h == doctest::Approx(day_length(cali.latitude(), g.declination_deg)));
  CHECK(g.true_solar_time_h >= 0.0);
  CHECK(g.true_solar_time_h < 24.0);
}
