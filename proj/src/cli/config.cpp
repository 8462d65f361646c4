#include "solrad/cli/config.hpp"

#include <algorithm>
#include <set>

#include "solrad/error.hpp"
#include "solrad/text.hpp"

namespace solrad::cli {
namespace {

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "seed",
      "site.latitude", "site.longitude", "site.utc_offset_hours",
      "paths.output_dir", "paths.rasters_dir", "paths.station_csv", "paths.ground_csv",
      "calibration.k", "calibration.c", "calibration.space_count", "calibration.zenith_cutoff_deg",
      "calibration.sampling",
      "units.ground_radiation",
      "station.column.timestamp", "station.column.wind_speed", "station.column.wind_direction",
      "station.column.temperature", "station.column.rain", "station.column.humidity",
      "station.column.solar_radiation",
      "dataset.regimes", "dataset.test_fraction", "dataset.wind_direction", "dataset.scale_features",
      "dataset.scaler_fit", "dataset.scale_target",
      "models.families", "search.candidates", "search.threads", "cv.n_splits", "cv.n_repeats",
      "synth.start", "synth.days", "synth.images_per_day", "synth.first_image_hour",
      "synth.image_interval_minutes", "synth.a", "synth.b", "synth.noise_sigma", "synth.cloud_jitter",
      "synth.clear_sky", "synth.r_clear", "synth.r_cloud_max", "synth.grid_size", "synth.pixel_deg",
      "synth.orphan_images", "synth.sunshine_missing_fraction",
  };
  return keys;
}

[[noreturn]] void fail(const std::string& key, const std::string& why) {
  throw Error(ErrorCode::kConfig, "config key '" + key + "': " + why);
}

class Values {
 public:
  explicit Values(const std::map<std::string, std::string>& raw) : raw_(raw) {}

  [[nodiscard]] bool has(const std::string& key) const { return raw_.count(key) > 0; }

  [[nodiscard]] const std::string& text(const std::string& key) const {
    const auto it = raw_.find(key);
    if (it == raw_.end()) fail(key, "required but missing");
    return it->second;
  }

  [[nodiscard]] double real(const std::string& key) const {
    const auto v = parse_real(text(key));
    if (!v) fail(key, "expected a number, got '" + text(key) + "'");
    return *v;
  }

  [[nodiscard]] long long integer(const std::string& key) const {
    const auto v = parse_integer(text(key));
    if (!v) fail(key, "expected an integer, got '" + text(key) + "'");
    return *v;
  }

  [[nodiscard]] bool boolean(const std::string& key) const {
    const auto& t = text(key);
    if (t == "true") return true;
    if (t == "false") return false;
    fail(key, "expected true or false");
  }

  /// One value for every month or twelve comma-separated values.
  [[nodiscard]] std::array<double, 12> monthly(const std::string& key) const {
    std::array<double, 12> out{};
    const auto parts = split(text(key), ',');
    if (parts.size() != 1 && parts.size() != 12) fail(key, "expected 1 or 12 comma-separated numbers");
    for (std::size_t m = 0; m < 12; ++m) {
      const auto v = parse_real(trim(parts[parts.size() == 1 ? 0 : m]));
      if (!v) fail(key, "expected numbers");
      out[m] = *v;
    }
    return out;
  }

 private:
  const std::map<std::string, std::string>& raw_;
};

std::string join_path(const std::string& dir, const std::string& leaf) {
  if (dir.empty()) return leaf;
  return dir.back() == '/' ? dir + leaf : dir + '/' + leaf;
}

}  // namespace

FamilyLabel parse_family_label(std::string_view text) {
  if (text == "xgboost") return {"xgboost", ml::Family::kGradientBoosting, true};
  const auto f = ml::parse_family(text);
  return {std::string(text), f, false};
}

std::string PipelineConfig::metadata() const {
  return std::string("# solrad ") + kToolVersion + " config=" + hex32(hash) + '\n';
}

ml::SearchSpace PipelineConfig::space_for(const FamilyLabel& label) const {
  auto space = ml::default_space(label.family, label.regularized);
  const auto it = space_overrides.find(label.label);
  if (it != space_overrides.end()) {
    for (const auto& [key, domain] : it->second) space.set(key, domain);
  }
  return space;
}

std::pair<std::string, std::string> parse_override(std::string_view text) {
  const auto eq = text.find('=');
  if (eq == std::string_view::npos) {
    throw Error(ErrorCode::kConfig, "override '" + std::string(text) + "' is not key=value");
  }
  return {std::string(trim(text.substr(0, eq))), std::string(trim(text.substr(eq + 1)))};
}

PipelineConfig parse_config(std::string_view text, const Overrides& overrides) {
  std::map<std::string, std::string> raw;
  std::size_t lineno = 0;
  for (auto line : split(text, '\n')) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::kConfig, "config line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key(trim(line.substr(0, eq)));
    if (!raw.emplace(key, std::string(trim(line.substr(eq + 1)))).second) {
      throw Error(ErrorCode::kConfig, "config line " + std::to_string(lineno) + ": key '" + key + "' repeated");
    }
  }
  for (const auto& [key, value] : overrides) raw[key] = value;

  for (const auto& [key, value] : raw) {
    if (known_keys().count(key)) continue;
    if (key.starts_with("space.")) {
      const auto dot = key.find('.', 6);
      if (dot != std::string::npos && dot + 1 < key.size()) continue;
    }
    throw Error(ErrorCode::kConfig, "unknown config key '" + key + "'");
  }

  const Values v(raw);
  PipelineConfig cfg;
  cfg.raw = raw;
  {
    const auto s = v.integer("seed");
    if (s < 0) fail("seed", "must be a nonnegative integer");
    cfg.seed = static_cast<std::uint64_t>(s);
  }
  cfg.latitude = v.real("site.latitude");
  cfg.longitude = v.real("site.longitude");
  cfg.utc_offset_hours = v.real("site.utc_offset_hours");
  try {
    (void)cfg.site();
  } catch (const Error& e) {
    throw Error(ErrorCode::kConfig, std::string("site: ") + e.what());
  }

  cfg.output_dir = v.text("paths.output_dir");
  cfg.rasters_dir = v.has("paths.rasters_dir") ? v.text("paths.rasters_dir") : join_path(cfg.output_dir, "rasters");
  cfg.station_csv = v.has("paths.station_csv") ? v.text("paths.station_csv") : join_path(cfg.output_dir, "station.csv");
  cfg.ground_csv = v.has("paths.ground_csv") ? v.text("paths.ground_csv") : join_path(cfg.output_dir, "ground_daily.csv");

  cfg.calibration.k = v.real("calibration.k");
  cfg.calibration.monthly_c.fill(1.0);
  if (v.has("calibration.c")) cfg.calibration.monthly_c = v.monthly("calibration.c");
  if (v.has("calibration.space_count")) cfg.calibration.space_count = static_cast<int>(v.integer("calibration.space_count"));
  if (v.has("calibration.zenith_cutoff_deg")) cfg.calibration.zenith_cutoff_deg = v.real("calibration.zenith_cutoff_deg");
  try {
    cfg.calibration.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::kConfig, std::string("calibration: ") + e.what());
  }
  if (v.has("calibration.sampling")) {
    const auto& s = v.text("calibration.sampling");
    if (s == "nearest") cfg.sampling = SamplingMode::kNearest;
    else if (s == "mean3x3") cfg.sampling = SamplingMode::kMean3x3;
    else fail("calibration.sampling", "expected nearest or mean3x3");
  }
  if (v.has("units.ground_radiation")) cfg.ground_unit = parse_energy_unit(v.text("units.ground_radiation"));

  const std::pair<const char*, std::string StationSchema::*> columns[] = {
      {"timestamp", &StationSchema::timestamp},     {"wind_speed", &StationSchema::wind_speed},
      {"wind_direction", &StationSchema::wind_direction}, {"temperature", &StationSchema::temperature},
      {"rain", &StationSchema::rain},                {"humidity", &StationSchema::humidity},
      {"solar_radiation", &StationSchema::solar_radiation},
  };
  for (const auto& [name, member] : columns) {
    const std::string key = std::string("station.column.") + name;
    if (v.has(key)) cfg.station_schema.*member = v.text(key);
  }
  if (cfg.station_schema.timestamp.empty() || cfg.station_schema.solar_radiation.empty()) {
    fail("station.column", "timestamp and solar_radiation columns cannot be disabled");
  }

  if (v.has("dataset.regimes")) {
    cfg.regimes.clear();
    for (auto part : split(v.text("dataset.regimes"), ',')) cfg.regimes.push_back(parse_regime(trim(part)));
    if (cfg.regimes.empty()) fail("dataset.regimes", "empty list");
  }
  if (v.has("dataset.test_fraction")) {
    cfg.test_fraction = v.real("dataset.test_fraction");
    if (!(cfg.test_fraction > 0.0 && cfg.test_fraction < 1.0)) fail("dataset.test_fraction", "must be in (0, 1)");
  }
  if (v.has("dataset.wind_direction")) {
    const auto& w = v.text("dataset.wind_direction");
    if (w == "cyclic") cfg.features.wind_direction_cyclic = true;
    else if (w != "raw") fail("dataset.wind_direction", "expected raw or cyclic");
  }
  if (v.has("dataset.scale_features")) cfg.scale_features = v.boolean("dataset.scale_features");
  if (v.has("dataset.scaler_fit")) {
    const auto& f = v.text("dataset.scaler_fit");
    if (f == "all") cfg.scaler_fit_all = true;
    else if (f != "train") fail("dataset.scaler_fit", "expected train or all");
  }
  if (v.has("dataset.scale_target")) cfg.scale_target = v.boolean("dataset.scale_target");

  const std::string families = v.has("models.families") ? v.text("models.families")
                                                         : "linear,gradient_boosting,xgboost,random_forest,mlp";
  std::set<std::string> seen;
  for (auto part : split(families, ',')) {
    auto label = parse_family_label(trim(part));
    if (!seen.insert(label.label).second) fail("models.families", "'" + label.label + "' listed twice");
    cfg.families.push_back(std::move(label));
  }
  if (v.has("search.candidates")) {
    const auto c = v.integer("search.candidates");
    if (c < 1) fail("search.candidates", "must be >= 1");
    cfg.candidates = static_cast<std::size_t>(c);
  }
  if (v.has("search.threads")) {
    const auto t = v.integer("search.threads");
    if (t < 1 || t > 256) fail("search.threads", "must be in 1..256");
    cfg.threads = static_cast<unsigned>(t);
  }
  if (v.has("cv.n_splits")) cfg.cv_splits = static_cast<int>(v.integer("cv.n_splits"));
  if (v.has("cv.n_repeats")) cfg.cv_repeats = static_cast<int>(v.integer("cv.n_repeats"));
  if (cfg.cv_splits < 2) fail("cv.n_splits", "must be >= 2");
  if (cfg.cv_repeats < 1) fail("cv.n_repeats", "must be >= 1");

  for (const auto& [key, value] : raw) {
    if (!key.starts_with("space.")) continue;
    const auto dot = key.find('.', 6);
    const std::string label = key.substr(6, dot - 6);
    const std::string param = key.substr(dot + 1);
    const auto fl = parse_family_label(label);
    try {
      auto domain = ml::parse_domain(fl.family, param, value);
      ml::SearchSpace probe(fl.family);
      probe.set(param, domain);
      cfg.space_overrides[label][param] = std::move(domain);
    } catch (const Error& e) {
      fail(key, e.what());
    }
  }
  for (const auto& label : cfg.families) {
    try {
      const auto space = cfg.space_for(label);
      (void)ml::sample_candidate(space, 0, 0);
    } catch (const Error& e) {
      fail("space." + label.label, e.what());
    }
  }

  SynthSpec& s = cfg.synth;
  s = SynthSpec::defaults();
  s.latitude = cfg.latitude;
  s.longitude = cfg.longitude;
  s.utc_offset_hours = cfg.utc_offset_hours;
  s.calibration = cfg.calibration;
  s.unit = cfg.ground_unit;
  if (v.has("synth.start")) s.start = parse_date(v.text("synth.start"));
  const auto int_key = [&](const char* key, int& target) {
    if (v.has(key)) target = static_cast<int>(v.integer(key));
  };
  const auto real_key = [&](const char* key, double& target) {
    if (v.has(key)) target = v.real(key);
  };
  int_key("synth.days", s.days);
  int_key("synth.images_per_day", s.images_per_day);
  int_key("synth.first_image_hour", s.first_image_hour);
  int_key("synth.image_interval_minutes", s.image_interval_minutes);
  int_key("synth.grid_size", s.grid_size);
  int_key("synth.orphan_images", s.orphan_images);
  real_key("synth.noise_sigma", s.noise_sigma);
  real_key("synth.cloud_jitter", s.cloud_jitter);
  real_key("synth.r_clear", s.r_clear);
  real_key("synth.r_cloud_max", s.r_cloud_max);
  real_key("synth.pixel_deg", s.pixel_deg);
  real_key("synth.sunshine_missing_fraction", s.sunshine_missing_fraction);
  if (v.has("synth.a")) s.a = v.monthly("synth.a");
  if (v.has("synth.b")) s.b = v.monthly("synth.b");
  if (v.has("synth.clear_sky")) s.clear_sky = v.boolean("synth.clear_sky");
  try {
    s.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::kConfig, e.what());
  }

  std::string canonical;
  for (const auto& [key, value] : raw) canonical += key + '=' + value + '\n';
  cfg.hash = crc32(canonical);
  return cfg;
}

PipelineConfig load_config(const std::string& path, const Overrides& overrides) {
  return parse_config(read_text_file(path), overrides);
}

}  // namespace solrad::cli
