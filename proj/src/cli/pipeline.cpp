#include "solrad/cli/pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <map>
#include <optional>

#include "solrad/cloudiness.hpp"
#include "solrad/error.hpp"
#include "solrad/metrics.hpp"
#include "solrad/ml/model.hpp"
#include "solrad/text.hpp"

namespace solrad::cli {
namespace fs = std::filesystem;

namespace {

std::string out_path(const PipelineConfig& cfg, const std::string& leaf) {
  return (fs::path(cfg.output_dir) / leaf).string();
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create directory '" + dir + "': " + ec.message());
}

void ensure_parent(const std::string& file) {
  const auto parent = fs::path(file).parent_path();
  if (!parent.empty()) ensure_dir(parent.string());
}

std::string require_input(const std::string& path, const std::string& hint) {
  if (!fs::exists(path)) {
    throw Error(ErrorCode::kIo, "missing input '" + path + "'" + (hint.empty() ? "" : "; " + hint));
  }
  return read_text_file(path);
}

std::uint64_t stream_id(std::string_view name) { return crc32(name); }

struct Prepared {
  std::string regime;
  std::vector<std::string> columns;
  Eigen::MatrixXd x_train, x_test;
  Eigen::VectorXd y_train, y_test;  // observed units
  std::optional<ScalerParams> y_scaler;
  std::vector<UtcInstant> t_train, t_test;
  std::size_t dropped{};
};

struct JoinedData {
  JoinResult join;
  IngestReport ingest;
  std::size_t images{};
  std::size_t station_rows{};
};

JoinedData load_joined(const PipelineConfig& cfg) {
  const auto features_text = require_input(out_path(cfg, "features.csv"), "run `solrad features` first");
  if (!fs::exists(cfg.station_csv)) throw Error(ErrorCode::kIo, "missing station CSV '" + cfg.station_csv + "'");
  auto station = load_station_csv(cfg.station_csv, cfg.station_schema);
  const auto images = parse_features_csv(features_text);
  JoinedData out;
  out.join = join_on_timestamp(station.observations, images);
  out.ingest = std::move(station.report);
  out.images = images.size();
  out.station_rows = station.observations.size();
  return out;
}

Prepared prepare(const PipelineConfig& cfg, Regime regime, const JoinResult& join) {
  Prepared p;
  p.regime = to_string(regime);
  const auto design = select_features(join.records, regime, cfg.features);
  const auto n = static_cast<std::size_t>(design.x.rows());
  if (n < 4) {
    throw Error(ErrorCode::kEmptyInput, "regime " + p.regime + " has only " + std::to_string(n) +
                                            " complete rows");
  }
  const auto parts = split(n, cfg.test_fraction, derive_seed(cfg.seed, stream_id("split")));
  p.columns = design.columns;
  p.dropped = design.dropped_null_rows;
  p.x_train = take_rows(design.x, parts.train);
  p.x_test = take_rows(design.x, parts.test);
  p.y_train = take_rows(design.y, parts.train);
  p.y_test = take_rows(design.y, parts.test);
  for (auto i : parts.train) p.t_train.push_back(design.timestamps[i]);
  for (auto i : parts.test) p.t_test.push_back(design.timestamps[i]);
  if (cfg.scale_features) {
    const auto scaler = fit_scaler(cfg.scaler_fit_all ? design.x : p.x_train);
    p.x_train = apply_scaler(scaler, p.x_train);
    p.x_test = apply_scaler(scaler, p.x_test);
  }
  if (cfg.scale_target) {
    const Eigen::MatrixXd y = cfg.scaler_fit_all ? Eigen::MatrixXd(design.y) : Eigen::MatrixXd(p.y_train);
    p.y_scaler = fit_scaler(y);
  }
  return p;
}

// target in the units the models are trained on
Eigen::VectorXd model_target(const Prepared& p, const Eigen::VectorXd& y) {
  if (!p.y_scaler) return y;
  return apply_scaler(*p.y_scaler, Eigen::MatrixXd(y)).col(0);
}

Eigen::VectorXd observed_units(const Prepared& p, Eigen::VectorXd pred) {
  if (!p.y_scaler) return pred;
  for (Eigen::Index i = 0; i < pred.size(); ++i) pred[i] = invert_scaled(*p.y_scaler, 0, pred[i]);
  return pred;
}

std::string cell_name(const std::string& regime, const std::string& label) { return regime + "_" + label; }

std::vector<PredictionPair> pairs_of(const std::vector<UtcInstant>& t, const Eigen::VectorXd& observed,
                                     const Eigen::VectorXd& estimated) {
  std::vector<PredictionPair> out;
  out.reserve(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    out.push_back({t[i], observed[static_cast<Eigen::Index>(i)], estimated[static_cast<Eigen::Index>(i)]});
  }
  return out;
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"synth", "calibrate", "features", "fit-angstrom",
                                                 "estimate", "train", "evaluate"};
  return names;
}

std::string reflectance_csv(std::span<const ReflectanceSample> samples, double utc_offset_hours,
                            std::string_view metadata) {
  std::string out(metadata);
  out += "timestamp,nd,r_prev,r_post,r_p,zenith,valid\n";
  for (const auto& s : samples) {
    out += format_iso8601_offset(s.point.timestamp, utc_offset_hours) + ',' + format_real(s.nd) + ',' +
           format_real(s.r_prev) + ',' + format_real(s.r_post) + ',' +
           (s.r_p ? format_real(*s.r_p) : std::string()) + ',' + format_real(s.zenith_deg) + ',' +
           (s.valid ? "1" : "0") + '\n';
  }
  return out;
}

std::vector<ReflectanceSample> parse_reflectance_csv(std::string_view text, const Site& site) {
  std::vector<ReflectanceSample> out;
  bool header = false;
  std::size_t lineno = 0;
  for (auto line : split(text, '\n')) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    if (!header) {
      if (line != "timestamp,nd,r_prev,r_post,r_p,zenith,valid") {
        throw Error(ErrorCode::kParse, "reflectance CSV: unexpected header");
      }
      header = true;
      continue;
    }
    const auto bad = [&] {
      return Error(ErrorCode::kParse, "reflectance line " + std::to_string(lineno) + ": malformed row");
    };
    const auto f = split(line, ',');
    if (f.size() != 7) throw bad();
    const auto nd = parse_real(f[1]), rprev = parse_real(f[2]), rpost = parse_real(f[3]),
               zen = parse_real(f[5]);
    if (!nd || !rprev || !rpost || !zen || (f[6] != "0" && f[6] != "1")) throw bad();
    const GeoTemporalPoint point{site, parse_iso8601(f[0])};
    ReflectanceSample s{point, *nd, *rprev, *rpost, std::nullopt, *zen,
                        earth_sun_distance(day_of_year(point.local_date())), f[6] == "1"};
    if (s.valid) {
      const auto rp = parse_real(f[4]);
      if (!rp) throw bad();
      s.r_p = *rp;
    } else if (!f[4].empty()) {
      throw bad();
    }
    out.push_back(s);
  }
  if (!header) throw Error(ErrorCode::kParse, "reflectance CSV: missing header");
  return out;
}

int cmd_synth(const PipelineConfig& cfg, std::ostream& log) {
  const auto corpus = generate_synthetic(cfg.synth, cfg.seed);
  const auto meta = cfg.metadata();
  ensure_dir(cfg.rasters_dir);
  ensure_dir(cfg.output_dir);
  std::string manifest = meta + "file,crc32\n";
  std::size_t stale = 0;
  std::vector<std::string> names;
  for (const auto& grid : corpus.rasters) {
    const auto name = raster_file_name(grid.timestamp());
    const auto bytes = serialize_grid(grid);
    write_text_file((fs::path(cfg.rasters_dir) / name).string(), bytes);
    manifest += name + ',' + hex32(crc32(bytes)) + '\n';
    names.push_back(name);
  }
  std::sort(names.begin(), names.end());
  for (const auto& entry : fs::directory_iterator(cfg.rasters_dir)) {
    const auto name = entry.path().filename().string();
    if (entry.path().extension() == ".hgrid" && !std::binary_search(names.begin(), names.end(), name)) ++stale;
  }
  write_text_file((fs::path(cfg.rasters_dir) / "MANIFEST.csv").string(), manifest);
  ensure_parent(cfg.station_csv);
  write_text_file(cfg.station_csv, station_csv(corpus.station, cfg.utc_offset_hours, meta));
  ensure_parent(cfg.ground_csv);
  write_text_file(cfg.ground_csv, ground_daily_csv(corpus.ground, meta));
  write_text_file(out_path(cfg, "ground_truth.csv"), ground_truth_csv(corpus, cfg.utc_offset_hours, meta));
  write_text_file(out_path(cfg, "daily_truth.csv"), daily_truth_csv(corpus, meta));
  log << "synth: " << corpus.rasters.size() << " rasters, " << corpus.station.size() << " station rows, "
      << corpus.ground.size() << " ground days\n";
  if (stale > 0) {
    log << "synth: warning: " << stale << " other .hgrid files already in " << cfg.rasters_dir
        << " will be picked up by calibrate\n";
  }
  return 0;
}

int cmd_calibrate(const PipelineConfig& cfg, std::ostream& log) {
  if (!fs::is_directory(cfg.rasters_dir)) {
    log << "calibrate: rasters directory '" << cfg.rasters_dir << "' does not exist\n";
    return 1;
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(cfg.rasters_dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".hgrid") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) {
    log << "calibrate: no .hgrid rasters in '" << cfg.rasters_dir << "'\n";
    return 1;
  }
  const Site site = cfg.site();
  std::vector<ReflectanceSample> samples;
  std::string errors = cfg.metadata() + "file,error\n";
  std::size_t failed = 0;
  for (const auto& path : files) {
    try {
      samples.push_back(calibrate_flagged(load_grid(path.string()), site, cfg.calibration, cfg.sampling));
    } catch (const Error& e) {
      ++failed;
      std::string msg = e.what();
      std::replace(msg.begin(), msg.end(), ',', ';');
      errors += path.filename().string() + ',' + msg + '\n';
    }
  }
  ensure_dir(cfg.output_dir);
  write_text_file(out_path(cfg, "calibrate_errors.txt"), errors);
  if (samples.empty()) {
    log << "calibrate: none of the " << files.size() << " rasters could be calibrated (see calibrate_errors.txt)\n";
    return 1;
  }
  std::stable_sort(samples.begin(), samples.end(), [](const auto& a, const auto& b) {
    return a.point.timestamp < b.point.timestamp;
  });
  write_text_file(out_path(cfg, "reflectance.csv"),
                  reflectance_csv(samples, cfg.utc_offset_hours, cfg.metadata()));
  const auto valid = std::count_if(samples.begin(), samples.end(), [](const auto& s) { return s.valid; });
  log << "calibrate: " << samples.size() << " samples (" << valid << " valid, "
      << samples.size() - static_cast<std::size_t>(valid) << " below the sun cutoff), " << failed
      << " unreadable\n";
  return 0;
}

int cmd_features(const PipelineConfig& cfg, std::ostream& log) {
  const auto text = require_input(out_path(cfg, "reflectance.csv"), "run `solrad calibrate` first");
  const Site site = cfg.site();
  const auto samples = parse_reflectance_csv(text, site);
  const auto valid = std::count_if(samples.begin(), samples.end(), [](const auto& s) { return s.valid; });
  if (valid == 0) {
    log << "features: no valid reflectance samples\n";
    return 1;
  }
  const auto env = build_envelope(samples);
  std::vector<ImageFeatureRecord> records;
  std::size_t degenerate = 0;
  for (const auto& s : samples) {
    if (!s.valid) continue;
    const int slot = hour_slot(s.point);
    ImageFeatureRecord r;
    r.timestamp = s.point.timestamp;
    r.r_p = *s.r_p;
    r.n_c = cloudiness_index(*s.r_p, slot, env);
    r.degenerate_slot = env.slot(slot).degenerate();
    r.h_ext = extraterrestrial_hourly(s.point);
    r.day_length = day_length(site.latitude(), declination(day_of_year(s.point.local_date())));
    degenerate += r.degenerate_slot;
    records.push_back(r);
  }
  write_text_file(out_path(cfg, "envelope.csv"), env.to_csv(cfg.metadata()));
  write_text_file(out_path(cfg, "features.csv"), features_csv(records, cfg.utc_offset_hours, cfg.metadata()));
  log << "features: " << records.size() << " image records";
  if (degenerate > 0) log << ", " << degenerate << " in degenerate hour slots (n_c set to 0)";
  log << '\n';
  return 0;
}

namespace {

std::vector<DailyGroundRecord> ground_records(const PipelineConfig& cfg) {
  const auto days = parse_ground_daily_csv(require_input(cfg.ground_csv, "set paths.ground_csv"));
  std::vector<DailyGroundRecord> out;
  for (const auto& d : days) {
    const int doy = day_of_year(d.date);
    out.push_back({d.date, d.radiation, d.sunshine_hours, day_length(cfg.latitude, declination(doy)),
                   from_wh_per_m2(extraterrestrial_daily(cfg.latitude, doy), cfg.ground_unit)});
  }
  return out;
}

}  // namespace

int cmd_fit_angstrom(const PipelineConfig& cfg, std::ostream& log) {
  const auto records = ground_records(cfg);
  const bool any_sunshine =
      std::any_of(records.begin(), records.end(), [](const auto& r) { return r.sunshine_hours.has_value(); });
  if (!any_sunshine) {
    log << "fit-angstrom: the ground record has no sunshine-duration values; the monthly coefficients "
           "need them and cannot be fitted\n";
    return 1;
  }
  const auto coeffs = fit_monthly(records);
  for (const auto& row : coeffs.rows()) {
    if (row.status != FitStatus::kFitted && row.sample_count > 0) {
      log << "fit-angstrom: month " << row.month << ": " << row.message << '\n';
    }
  }
  if (coeffs.fitted_count() == 0) {
    log << "fit-angstrom: no month could be fitted\n";
    return 1;
  }
  ensure_dir(cfg.output_dir);
  write_text_file(out_path(cfg, "coefficients.csv"), coeffs.to_csv(cfg.metadata()));
  log << "fit-angstrom: " << coeffs.fitted_count() << " of 12 months fitted\n";
  return 0;
}

int cmd_estimate(const PipelineConfig& cfg, std::ostream& log) {
  const auto coeffs = MonthlyCoefficients::from_csv(
      require_input(out_path(cfg, "coefficients.csv"), "run `solrad fit-angstrom` first"));
  const auto features =
      parse_features_csv(require_input(out_path(cfg, "features.csv"), "run `solrad features` first"));
  const auto records = ground_records(cfg);
  const Site site = cfg.site();

  std::map<std::chrono::sys_days, std::pair<double, int>> daily_nc;
  for (const auto& f : features) {
    auto& acc = daily_nc[std::chrono::sys_days(GeoTemporalPoint{site, f.timestamp}.local_date())];
    acc.first += f.n_c;
    acc.second += 1;
  }
  const auto offset = std::chrono::seconds(std::lround(cfg.utc_offset_hours * 3600.0));
  std::vector<PredictionPair> pairs;
  std::size_t skipped_month = 0;
  for (const auto& r : records) {
    const auto it = daily_nc.find(std::chrono::sys_days(r.date));
    if (it == daily_nc.end()) continue;
    const auto& row = coeffs.month(static_cast<int>(static_cast<unsigned>(r.date.month())));
    if (row.status != FitStatus::kFitted) {
      ++skipped_month;
      continue;
    }
    const double nc = it->second.first / it->second.second;
    const UtcInstant t = std::chrono::sys_seconds(std::chrono::sys_days(r.date)) - offset;
    pairs.push_back({t, r.h_measured, estimate_radiation(row.a, row.b, nc, r.h_ext)});
  }
  if (pairs.size() < 2) {
    log << "estimate: fewer than two days have image features, ground data and fitted coefficients\n";
    return 1;
  }
  const auto rep = evaluate_statistical_model(pairs, cfg.utc_offset_hours);
  write_text_file(out_path(cfg, "estimates.csv"), cfg.metadata() + rep.scatter_csv);
  std::string text = cfg.metadata();
  text += "unit=" + std::string(to_string(cfg.ground_unit)) + '\n';
  text += "n=" + std::to_string(rep.metrics.n) + '\n';
  text += "mbe=" + format_real(rep.metrics.mbe) + '\n';
  text += "r2=" + format_real(rep.metrics.r2) + '\n';
  text += "rmse=" + format_real(rep.metrics.rmse) + '\n';
  text += "rrmse_pct=" + format_real(rep.metrics.rrmse_pct) + '\n';
  text += "band=" + std::string(to_string(rep.metrics.band)) + '\n';
  write_text_file(out_path(cfg, "statistical_report.txt"), text);
  log << "estimate: " << pairs.size() << " days, R2 " << format_real(rep.metrics.r2) << ", rRMSE "
      << format_real(rep.metrics.rrmse_pct) << "% (" << to_string(rep.metrics.band) << ")";
  if (skipped_month > 0) log << "; " << skipped_month << " days skipped for unfitted months";
  log << '\n';
  return 0;
}

int cmd_train(const PipelineConfig& cfg, std::ostream& log) {
  const auto data = load_joined(cfg);
  std::string join_report = cfg.metadata();
  join_report += "images=" + std::to_string(data.images) + '\n';
  join_report += "station_rows=" + std::to_string(data.station_rows) + '\n';
  join_report += "joined=" + std::to_string(data.join.records.size()) + '\n';
  join_report += "eliminated=" + std::to_string(data.join.eliminated) + '\n';
  join_report += "station_rejected=" + std::to_string(data.ingest.rejected.size()) + '\n';
  for (const auto& issue : data.ingest.rejected) {
    join_report += "rejected_row=" + std::to_string(issue.row) + " line=" + std::to_string(issue.line) + ": " +
                   issue.reason + '\n';
  }
  ensure_dir(cfg.output_dir);
  write_text_file(out_path(cfg, "join_report.txt"), join_report);
  log << "train: joined " << data.join.records.size() << " records, eliminated " << data.join.eliminated
      << " images without a station match\n";

  ensure_dir(out_path(cfg, "models"));
  ensure_dir(out_path(cfg, "search"));
  std::string report = cfg.metadata();
  std::size_t saved = 0;
  for (const auto regime : cfg.regimes) {
    Prepared p;
    try {
      p = prepare(cfg, regime, data.join);
    } catch (const Error& e) {
      log << "train: regime " << to_string(regime) << ": " << e.what() << '\n';
      report += std::string(to_string(regime)) + ": " + e.what() + '\n';
      continue;
    }
    const ml::CvConfig cv{cfg.cv_splits, cfg.cv_repeats,
                          derive_seed(cfg.seed, stream_id(std::string("cv/") + p.regime))};
    for (const auto& label : cfg.families) {
      const auto name = cell_name(p.regime, label.label);
      const auto seed = derive_seed(cfg.seed, stream_id("search/" + name));
      try {
        const Eigen::VectorXd target = model_target(p, p.y_train);
        const auto result = ml::random_search(cfg.space_for(label), p.x_train, target, cv, cfg.candidates,
                                              seed, cfg.threads);
        write_text_file(out_path(cfg, "search/" + name + ".txt"),
                        cfg.metadata() + "best=" + format_real(result.best_score) + "\n\n" +
                            ml::score_table_text(result.table));
        const auto model = ml::fit(result.best, p.x_train, target);
        ml::save_model(model, out_path(cfg, "models/" + name + ".srm"));
        ++saved;
        report += name + ": cv_mse=" + format_real(result.best_score) + " rows=" +
                  std::to_string(p.x_train.rows()) + '\n';
        log << "train: " << name << " cv mse " << format_real(result.best_score) << '\n';
      } catch (const ml::NoViableCandidateError& e) {
        write_text_file(out_path(cfg, "search/" + name + ".txt"),
                        cfg.metadata() + "best=none\n\n" + ml::score_table_text(e.table()));
        report += name + ": " + e.what() + '\n';
        log << "train: " << name << ": " << e.what() << '\n';
      } catch (const Error& e) {
        report += name + ": " + e.what() + '\n';
        log << "train: " << name << ": " << e.what() << '\n';
      }
    }
  }
  write_text_file(out_path(cfg, "train_report.txt"), report);
  if (saved == 0) {
    log << "train: no model could be trained\n";
    return 1;
  }
  return 0;
}

int cmd_evaluate(const PipelineConfig& cfg, std::ostream& log) {
  const auto data = load_joined(cfg);
  std::vector<std::string> regimes, labels;
  for (const auto r : cfg.regimes) regimes.emplace_back(to_string(r));
  for (const auto& l : cfg.families) labels.push_back(l.label);
  EvaluationReport report(regimes, labels);
  ensure_dir(out_path(cfg, "scatter"));
  for (const auto regime : cfg.regimes) {
    Prepared p;
    try {
      p = prepare(cfg, regime, data.join);
    } catch (const Error& e) {
      for (const auto& l : labels) report.note(to_string(regime), l, e.what());
      continue;
    }
    for (const auto& label : cfg.families) {
      const auto name = cell_name(p.regime, label.label);
      const auto path = out_path(cfg, "models/" + name + ".srm");
      if (!fs::exists(path)) {
        report.note(p.regime, label.label, "no trained model");
        continue;
      }
      try {
        const auto model = ml::load_model(path);
        CellPredictions cell{p.regime, label.label,
                             pairs_of(p.t_train, p.y_train, observed_units(p, ml::predict(model, p.x_train))),
                             pairs_of(p.t_test, p.y_test, observed_units(p, ml::predict(model, p.x_test)))};
        report.set(p.regime, label.label, compute_block(cell));
        write_text_file(out_path(cfg, "scatter/" + name + "_train.csv"),
                        cfg.metadata() + scatter_csv(cell.train, cfg.utc_offset_hours));
        write_text_file(out_path(cfg, "scatter/" + name + "_test.csv"),
                        cfg.metadata() + scatter_csv(cell.test, cfg.utc_offset_hours));
      } catch (const Error& e) {
        report.note(p.regime, label.label, e.what());
      }
    }
  }
  if (report.block_count() == 0) {
    log << "evaluate: no (regime, family) cell could be evaluated\n";
    write_text_file(out_path(cfg, "report.txt"), cfg.metadata() + report.to_text());
    return 1;
  }
  write_text_file(out_path(cfg, "report.csv"), cfg.metadata() + report.to_csv());
  write_text_file(out_path(cfg, "report.txt"), cfg.metadata() + report.to_text());
  log << "evaluate: " << report.block_count() << " cells reported\n";
  return 0;
}

int run_command(std::string_view name, const PipelineConfig& cfg, std::ostream& log) {
  try {
    if (name == "synth") return cmd_synth(cfg, log);
    if (name == "calibrate") return cmd_calibrate(cfg, log);
    if (name == "features") return cmd_features(cfg, log);
    if (name == "fit-angstrom") return cmd_fit_angstrom(cfg, log);
    if (name == "estimate") return cmd_estimate(cfg, log);
    if (name == "train") return cmd_train(cfg, log);
    if (name == "evaluate") return cmd_evaluate(cfg, log);
  } catch (const Error& e) {
    log << name << ": error (" << to_string(e.code()) << "): " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    log << name << ": error: " << e.what() << '\n';
    return 1;
  }
  log << "unknown command '" << name << "'\n";
  return 2;
}

}  // namespace solrad::cli
