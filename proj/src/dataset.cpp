#include "solrad/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <set>

#include "solrad/error.hpp"
#include "solrad/random.hpp"
#include "solrad/text.hpp"

namespace solrad {
namespace {

struct FieldBinding {
  const std::string* name;
  std::optional<double> StationObservation::*member;
  double lo;
  double hi;
};

bool is_null_token(std::string_view s) {
  return s.empty() || s == "NA" || s == "NaN" || s == "null" || s == "NULL";
}

std::string opt_real(const std::optional<double>& v) { return v ? format_real(*v) : std::string(); }

}  // namespace

std::string IngestReport::summary() const {
  std::string out = "accepted " + std::to_string(accepted) + ", rejected " +
                    std::to_string(rejected.size()) + '\n';
  for (const auto& c : unknown_columns) out += "unknown column '" + c + "' ignored\n";
  for (const auto& r : rejected) {
    out += "row " + std::to_string(r.row) + " (line " + std::to_string(r.line) + "): " + r.reason + '\n';
  }
  return out;
}

StationLoad parse_station_csv(std::string_view text, const StationSchema& schema) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  const FieldBinding bindings[] = {
      {&schema.wind_speed, &StationObservation::wind_speed, -kInf, kInf},
      {&schema.wind_direction, &StationObservation::wind_direction, 0.0, 360.0},
      {&schema.temperature, &StationObservation::temperature, -kInf, kInf},
      {&schema.rain, &StationObservation::rain, 0.0, kInf},
      {&schema.humidity, &StationObservation::humidity, 0.0, 100.0},
      {&schema.solar_radiation, &StationObservation::solar_radiation, 0.0, kInf},
  };

  StationLoad out;
  std::vector<std::string> header;
  int ts_col = -1;
  std::vector<int> cols(std::size(bindings), -1);
  std::set<std::int64_t> seen;
  std::size_t lineno = 0;
  std::size_t row = 0;

  for (auto raw : split(text, '\n')) {
    ++lineno;
    const auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    if (header.empty()) {
      header = split_csv_line(line);
      for (auto& h : header) h = std::string(trim(h));
      const auto find = [&](const std::string& name) -> int {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) {
          throw Error(ErrorCode::kParse, "station CSV: mapped column '" + name + "' not in header");
        }
        return static_cast<int>(it - header.begin());
      };
      ts_col = find(schema.timestamp);
      std::set<int> used{ts_col};
      for (std::size_t i = 0; i < std::size(bindings); ++i) {
        if (!bindings[i].name->empty()) {
          cols[i] = find(*bindings[i].name);
          used.insert(cols[i]);
        }
      }
      for (std::size_t c = 0; c < header.size(); ++c) {
        if (!used.count(static_cast<int>(c))) out.report.unknown_columns.push_back(header[c]);
      }
      continue;
    }
    ++row;
    const auto fields = split_csv_line(line);
    const auto reject = [&](std::string reason) {
      out.report.rejected.push_back({row, lineno, std::move(reason)});
    };
    if (fields.size() != header.size()) {
      reject("expected " + std::to_string(header.size()) + " fields, got " +
             std::to_string(fields.size()));
      continue;
    }
    StationObservation obs;
    try {
      obs.timestamp = parse_iso8601(trim(fields[static_cast<std::size_t>(ts_col)]));
    } catch (const Error& e) {
      reject(std::string("bad timestamp: ") + e.what());
      continue;
    }
    bool ok = true;
    for (std::size_t i = 0; i < std::size(bindings) && ok; ++i) {
      if (cols[i] < 0) continue;
      const auto token = trim(fields[static_cast<std::size_t>(cols[i])]);
      if (is_null_token(token)) continue;
      const auto v = parse_real(token);
      if (!v || !std::isfinite(*v)) {
        reject("column '" + *bindings[i].name + "': not a number");
        ok = false;
      } else if (*v < bindings[i].lo || *v > bindings[i].hi) {
        reject("column '" + *bindings[i].name + "': value " + format_real(*v) + " out of range");
        ok = false;
      } else {
        obs.*(bindings[i].member) = *v;
      }
    }
    if (!ok) continue;
    const auto key = obs.timestamp.time_since_epoch().count();
    if (!seen.insert(key).second) {
      reject("duplicate timestamp " + format_iso8601_utc(obs.timestamp));
      continue;
    }
    out.observations.push_back(obs);
  }
  if (header.empty()) throw Error(ErrorCode::kParse, "station CSV: missing header row");
  out.report.accepted = out.observations.size();
  return out;
}

StationLoad load_station_csv(const std::string& path, const StationSchema& schema) {
  try {
    return parse_station_csv(read_text_file(path), schema);
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + e.what());
  }
}

std::string station_csv(std::span<const StationObservation> rows, double utc_offset_hours,
                        std::string_view metadata) {
  std::string out(metadata);
  out += "timestamp,wind_speed,wind_direction,temperature,rain,humidity,solar_radiation\n";
  for (const auto& r : rows) {
    out += format_iso8601_offset(r.timestamp, utc_offset_hours) + ',' + opt_real(r.wind_speed) +
           ',' + opt_real(r.wind_direction) + ',' + opt_real(r.temperature) + ',' +
           opt_real(r.rain) + ',' + opt_real(r.humidity) + ',' + opt_real(r.solar_radiation) + '\n';
  }
  return out;
}

std::string features_csv(std::span<const ImageFeatureRecord> rows, double utc_offset_hours,
                         std::string_view metadata) {
  std::string out(metadata);
  out += "timestamp,r_p,n_c,h_ext,day_length,degenerate\n";
  for (const auto& r : rows) {
    out += format_iso8601_offset(r.timestamp, utc_offset_hours) + ',' + format_real(r.r_p) + ',' +
           format_real(r.n_c) + ',' + format_real(r.h_ext) + ',' + format_real(r.day_length) + ',' +
           (r.degenerate_slot ? "1" : "0") + '\n';
  }
  return out;
}

std::vector<ImageFeatureRecord> parse_features_csv(std::string_view text) {
  std::vector<ImageFeatureRecord> out;
  bool header = false;
  std::size_t lineno = 0;
  for (auto raw : split(text, '\n')) {
    ++lineno;
    const auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    if (!header) {
      if (line != "timestamp,r_p,n_c,h_ext,day_length,degenerate") {
        throw Error(ErrorCode::kParse, "features CSV: unexpected header");
      }
      header = true;
      continue;
    }
    const auto f = split(line, ',');
    const auto bad = [&](const char* what) {
      return Error(ErrorCode::kParse, "features line " + std::to_string(lineno) + ": " + what);
    };
    if (f.size() != 6) throw bad("expected 6 fields");
    ImageFeatureRecord r;
    r.timestamp = parse_iso8601(f[0]);
    const auto rp = parse_real(f[1]), nc = parse_real(f[2]), he = parse_real(f[3]),
               dl = parse_real(f[4]);
    if (!rp || !nc || !he || !dl) throw bad("non-numeric field");
    if (*nc < 0.0 || *nc > 1.0) throw bad("cloudiness outside [0, 1]");
    if (*he < 0.0) throw bad("negative extraterrestrial irradiance");
    if (*dl < 0.0 || *dl > 24.0) throw bad("day length outside [0, 24]");
    r.r_p = *rp;
    r.n_c = *nc;
    r.h_ext = *he;
    r.day_length = *dl;
    r.degenerate_slot = f[5] == "1";
    out.push_back(r);
  }
  if (!header) throw Error(ErrorCode::kParse, "features CSV: missing header");
  return out;
}

std::int64_t hour_key(UtcInstant t) {
  return std::chrono::floor<std::chrono::hours>(t).time_since_epoch().count();
}

JoinResult join_on_timestamp(std::span<const StationObservation> station,
                             std::span<const ImageFeatureRecord> images) {
  std::map<std::int64_t, const StationObservation*> by_hour;
  for (const auto& s : station) by_hour.emplace(hour_key(s.timestamp), &s);

  std::vector<const ImageFeatureRecord*> ordered;
  ordered.reserve(images.size());
  for (const auto& im : images) ordered.push_back(&im);
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](auto* a, auto* b) { return a->timestamp < b->timestamp; });

  JoinResult out;
  std::set<std::int64_t> matched;
  for (const auto* im : ordered) {
    const auto key = hour_key(im->timestamp);
    const auto it = by_hour.find(key);
    if (it == by_hour.end() || !matched.insert(key).second) {
      ++out.eliminated;
      continue;
    }
    out.records.push_back({*it->second, *im});
  }
  return out;
}

Regime parse_regime(std::string_view text) {
  if (text == "M1") return Regime::kM1;
  if (text == "M2") return Regime::kM2;
  if (text == "M3") return Regime::kM3;
  throw Error(ErrorCode::kConfig, "unknown feature regime '" + std::string(text) + "'");
}

const char* to_string(Regime regime) {
  switch (regime) {
    case Regime::kM1: return "M1";
    case Regime::kM2: return "M2";
    case Regime::kM3: return "M3";
  }
  return "?";
}

DesignMatrix select_features(std::span<const JoinedRecord> records, Regime regime,
                             const FeatureOptions& options) {
  if (records.empty()) throw Error(ErrorCode::kEmptyInput, "no joined records to select from");
  const bool met = regime != Regime::kM2;
  const bool img = regime != Regime::kM1;

  DesignMatrix dm;
  if (met) {
    dm.columns = {"wind_speed"};
    if (options.wind_direction_cyclic) {
      dm.columns.insert(dm.columns.end(), {"wind_direction_sin", "wind_direction_cos"});
    } else {
      dm.columns.push_back("wind_direction");
    }
    dm.columns.insert(dm.columns.end(), {"temperature", "rain", "humidity"});
  }
  if (img) dm.columns.insert(dm.columns.end(), {"r_p", "n_c", "h_ext", "day_length"});

  std::vector<std::vector<double>> rows;
  std::vector<double> target;
  for (const auto& r : records) {
    const auto& s = r.station;
    if (!s.solar_radiation) {
      ++dm.dropped_null_rows;
      continue;
    }
    std::vector<double> row;
    row.reserve(dm.columns.size());
    if (met) {
      if (!s.wind_speed || !s.wind_direction || !s.temperature || !s.rain || !s.humidity) {
        ++dm.dropped_null_rows;
        continue;
      }
      row.push_back(*s.wind_speed);
      if (options.wind_direction_cyclic) {
        const double rad = *s.wind_direction * std::numbers::pi / 180.0;
        row.push_back(std::sin(rad));
        row.push_back(std::cos(rad));
      } else {
        row.push_back(*s.wind_direction);
      }
      row.push_back(*s.temperature);
      row.push_back(*s.rain);
      row.push_back(*s.humidity);
    }
    if (img) {
      row.push_back(r.image.r_p);
      row.push_back(r.image.n_c);
      row.push_back(r.image.h_ext);
      row.push_back(r.image.day_length);
    }
    rows.push_back(std::move(row));
    target.push_back(*s.solar_radiation);
    dm.timestamps.push_back(r.image.timestamp);
  }
  if (rows.empty()) throw Error(ErrorCode::kEmptyInput, "every joined record has null selected fields");
  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto p = static_cast<Eigen::Index>(dm.columns.size());
  dm.x.resize(n, p);
  dm.y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) dm.x(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    dm.y(i) = target[static_cast<std::size_t>(i)];
  }
  return dm;
}

ScalerParams fit_scaler(const Eigen::MatrixXd& train) {
  if (train.rows() == 0) throw Error(ErrorCode::kEmptyInput, "scaler needs a nonempty training matrix");
  return {train.colwise().minCoeff().transpose(), train.colwise().maxCoeff().transpose()};
}

Eigen::MatrixXd apply_scaler(const ScalerParams& params, const Eigen::MatrixXd& x) {
  if (x.cols() != params.min.size()) throw Error(ErrorCode::kShape, "scaler width mismatch");
  Eigen::MatrixXd out(x.rows(), x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const double range = params.max(j) - params.min(j);
    if (range > 0.0) {
      out.col(j) = (x.col(j).array() - params.min(j)) / range;
    } else {
      out.col(j).setZero();
    }
  }
  return out;
}

double invert_scaled(const ScalerParams& params, Eigen::Index column, double value) {
  return params.min(column) + value * (params.max(column) - params.min(column));
}

SplitIndices split(std::size_t n, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw Error(ErrorCode::kDomain, "test fraction must lie strictly between 0 and 1");
  }
  if (n < 2) throw Error(ErrorCode::kEmptyInput, "need at least two records to split");
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  Rng rng(seed);
  rng.shuffle(std::span<std::size_t>(idx));
  auto n_test = static_cast<std::size_t>(std::llround(static_cast<double>(n) * test_fraction));
  n_test = std::clamp<std::size_t>(n_test, 1, n - 1);
  SplitIndices s;
  s.test.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_test));
  s.train.assign(idx.begin() + static_cast<std::ptrdiff_t>(n_test), idx.end());
  return s;
}

Eigen::MatrixXd take_rows(const Eigen::MatrixXd& x, std::span<const std::size_t> rows) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), x.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = x.row(static_cast<Eigen::Index>(rows[i]));
  }
  return out;
}

Eigen::VectorXd take_rows(const Eigen::VectorXd& y, std::span<const std::size_t> rows) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out(static_cast<Eigen::Index>(i)) = y(static_cast<Eigen::Index>(rows[i]));
  }
  return out;
}

}  // namespace solrad
