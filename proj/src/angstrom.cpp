#include "solrad/angstrom.hpp"

#include <algorithm>
#include <cmath>

#include "solrad/error.hpp"
#include "solrad/text.hpp"

namespace solrad {

EnergyUnit parse_energy_unit(std::string_view text) {
  if (text == "Wh/m2") return EnergyUnit::kWhPerM2;
  if (text == "kJ/m2") return EnergyUnit::kKJPerM2;
  if (text == "MJ/m2") return EnergyUnit::kMJPerM2;
  throw Error(ErrorCode::kConfig,
              "unknown energy unit '" + std::string(text) + "' (use Wh/m2, kJ/m2 or MJ/m2)");
}

const char* to_string(EnergyUnit unit) {
  switch (unit) {
    case EnergyUnit::kWhPerM2: return "Wh/m2";
    case EnergyUnit::kKJPerM2: return "kJ/m2";
    case EnergyUnit::kMJPerM2: return "MJ/m2";
  }
  return "?";
}

double from_wh_per_m2(double wh, EnergyUnit unit) {
  switch (unit) {
    case EnergyUnit::kWhPerM2: return wh;
    case EnergyUnit::kKJPerM2: return wh * 3.6;
    case EnergyUnit::kMJPerM2: return wh * 0.0036;
  }
  return wh;
}

std::string ground_daily_csv(std::span<const GroundDay> days, std::string_view metadata) {
  std::string out(metadata);
  out += "date,radiation,sunshine_hours\n";
  for (const auto& d : days) {
    out += format_date(d.date) + ',' + format_real(d.radiation) + ',' +
           (d.sunshine_hours ? format_real(*d.sunshine_hours) : std::string()) + '\n';
  }
  return out;
}

std::vector<GroundDay> parse_ground_daily_csv(std::string_view text) {
  std::vector<GroundDay> out;
  bool header = false;
  std::size_t lineno = 0;
  for (auto line : split(text, '\n')) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    if (!header) {
      if (line != "date,radiation,sunshine_hours") {
        throw Error(ErrorCode::kParse, "ground daily CSV: unexpected header");
      }
      header = true;
      continue;
    }
    const auto f = split(line, ',');
    const auto bad = [&](const char* what) {
      return Error(ErrorCode::kParse, "ground daily line " + std::to_string(lineno) + ": " + what);
    };
    if (f.size() != 3) throw bad("expected 3 fields");
    GroundDay d;
    d.date = parse_date(f[0]);
    const auto rad = parse_real(f[1]);
    if (!rad || *rad < 0.0) throw bad("radiation must be a nonnegative number");
    d.radiation = *rad;
    if (!f[2].empty()) {
      const auto sun = parse_real(f[2]);
      if (!sun || *sun < 0.0 || *sun > 24.0) throw bad("sunshine hours outside [0, 24]");
      d.sunshine_hours = *sun;
    }
    out.push_back(d);
  }
  if (!header) throw Error(ErrorCode::kParse, "ground daily CSV: missing header");
  return out;
}

MonthlyCoefficients::MonthlyCoefficients() {
  for (int m = 1; m <= 12; ++m) rows_[static_cast<std::size_t>(m - 1)].month = m;
}

const MonthlyFit& MonthlyCoefficients::month(int m) const {
  if (m < 1 || m > 12) throw Error(ErrorCode::kDomain, "month must be in 1..12");
  return rows_[static_cast<std::size_t>(m - 1)];
}

MonthlyFit& MonthlyCoefficients::month(int m) {
  if (m < 1 || m > 12) throw Error(ErrorCode::kDomain, "month must be in 1..12");
  return rows_[static_cast<std::size_t>(m - 1)];
}

int MonthlyCoefficients::fitted_count() const {
  int n = 0;
  for (const auto& r : rows_) n += r.status == FitStatus::kFitted;
  return n;
}

std::string MonthlyCoefficients::to_csv(std::string_view metadata) const {
  std::string out(metadata);
  out += "month,a,b,r2,n\n";
  for (const auto& r : rows_) {
    out += std::to_string(r.month) + ',';
    if (r.status == FitStatus::kFitted) {
      out += format_real(r.a) + ',' + format_real(r.b) + ',' + format_real(r.r_squared);
    } else {
      out += ",,";
    }
    out += ',' + std::to_string(r.sample_count) + '\n';
  }
  return out;
}

MonthlyCoefficients MonthlyCoefficients::from_csv(std::string_view text) {
  MonthlyCoefficients c;
  bool header = false;
  std::size_t lineno = 0;
  for (auto line : split(text, '\n')) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    if (!header) {
      if (line != "month,a,b,r2,n") throw Error(ErrorCode::kParse, "coefficients: unexpected header");
      header = true;
      continue;
    }
    const auto f = split(line, ',');
    const auto bad = [&] {
      return Error(ErrorCode::kParse, "coefficients line " + std::to_string(lineno) + ": malformed row");
    };
    if (f.size() != 5) throw bad();
    const auto m = parse_integer(f[0]);
    const auto n = parse_integer(f[4]);
    if (!m || *m < 1 || *m > 12 || !n) throw bad();
    auto& row = c.month(static_cast<int>(*m));
    row.sample_count = static_cast<int>(*n);
    if (f[1].empty()) {
      row.status = FitStatus::kNoData;
      continue;
    }
    const auto a = parse_real(f[1]), b = parse_real(f[2]), r = parse_real(f[3]);
    if (!a || !b || !r) throw bad();
    row.status = FitStatus::kFitted;
    row.a = *a;
    row.b = *b;
    row.r_squared = *r;
  }
  if (!header) throw Error(ErrorCode::kParse, "coefficients: missing header");
  return c;
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error(ErrorCode::kPairing, "x/y length mismatch");
  const std::size_t n = x.size();
  if (n < 2) throw Error(ErrorCode::kEmptyInput, "line fit needs at least two points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  // relative to the regressor scale so that rounding noise counts as zero
  if (sxx <= 1e-24 * std::max(1.0, mx * mx) * static_cast<double>(n)) {
    throw Error(ErrorCode::kDegenerateFit, "regressor has zero variance");
  }
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ssr = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = y[i] - (fit.intercept + fit.slope * x[i]);
    ssr += e * e;
  }
  // a flat response fitted exactly counts as a perfect fit
  fit.r_squared = syy > 0.0 ? std::clamp(1.0 - ssr / syy, 0.0, 1.0) : 1.0;
  return fit;
}

MonthlyCoefficients fit_monthly(std::span<const DailyGroundRecord> records) {
  std::array<std::vector<double>, 12> xs, ys;
  for (const auto& r : records) {
    if (!r.sunshine_hours || !(r.h_ext > 0.0) || !(r.day_length_h > 0.0)) continue;
    const auto m = static_cast<unsigned>(r.date.month());
    xs[m - 1].push_back(*r.sunshine_hours / r.day_length_h);
    ys[m - 1].push_back(r.h_measured / r.h_ext);
  }
  MonthlyCoefficients out;
  for (int m = 1; m <= 12; ++m) {
    auto& row = out.month(m);
    const auto& x = xs[static_cast<std::size_t>(m - 1)];
    const auto& y = ys[static_cast<std::size_t>(m - 1)];
    row.sample_count = static_cast<int>(x.size());
    if (x.size() < 2) {
      row.status = FitStatus::kNoData;
      row.message = "fewer than two days with sunshine data";
      continue;
    }
    try {
      const auto fit = fit_line(x, y);
      row.status = FitStatus::kFitted;
      row.a = fit.intercept;
      row.b = fit.slope;
      row.r_squared = fit.r_squared;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kDegenerateFit) throw;
      row.status = FitStatus::kDegenerate;
      row.message = e.what();
    }
  }
  return out;
}

double estimate_radiation(double a, double b, double cloudiness, double h_ext) {
  return (a + b * (1.0 - cloudiness)) * h_ext;
}

StatisticalReport evaluate_statistical_model(std::span<const PredictionPair> pairs,
                                             double utc_offset_hours) {
  if (pairs.size() < 2) throw Error(ErrorCode::kPairing, "statistical model needs n >= 2 pairs");
  std::vector<double> est, obs;
  est.reserve(pairs.size());
  obs.reserve(pairs.size());
  for (const auto& p : pairs) {
    est.push_back(p.estimated);
    obs.push_back(p.observed);
  }
  StatisticalReport rep;
  rep.metrics = evaluate_series(est, obs);
  rep.scatter_csv = scatter_csv(pairs, utc_offset_hours);
  return rep;
}

}  // namespace solrad
