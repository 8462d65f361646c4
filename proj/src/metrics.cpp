#include "solrad/metrics.hpp"

#include <cmath>
#include <cstdio>

#include "solrad/error.hpp"
#include "solrad/text.hpp"

namespace solrad {
namespace {

void check_pair(std::span<const double> y, std::span<const double> x) {
  if (y.size() != x.size()) {
    throw Error(ErrorCode::kPairing, "estimated/observed length mismatch (" +
                                         std::to_string(y.size()) + " vs " +
                                         std::to_string(x.size()) + ")");
  }
  if (x.empty()) throw Error(ErrorCode::kEmptyInput, "metrics need at least one pair");
}

double mean_of(std::span<const double> v) {
  double s = 0.0;
  for (double e : v) s += e;
  return s / static_cast<double>(v.size());
}

double sse(std::span<const double> y, std::span<const double> x) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = y[i] - x[i];
    s += d * d;
  }
  return s;
}

std::vector<double> column(std::span<const PredictionPair> pairs, bool estimated) {
  std::vector<double> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) out.push_back(estimated ? p.estimated : p.observed);
  return out;
}

}  // namespace

double mbe(std::span<const double> estimated, std::span<const double> observed) {
  check_pair(estimated, observed);
  double s = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) s += estimated[i] - observed[i];
  return s / static_cast<double>(observed.size());
}

double r2(std::span<const double> estimated, std::span<const double> observed) {
  check_pair(estimated, observed);
  if (observed.size() < 2) throw Error(ErrorCode::kUndefinedMetric, "R^2 needs n >= 2");
  const double xbar = mean_of(observed);
  double sst = 0.0;
  for (double x : observed) sst += (x - xbar) * (x - xbar);
  if (sst == 0.0) throw Error(ErrorCode::kUndefinedMetric, "R^2 undefined: observed variance is zero");
  return 1.0 - sse(estimated, observed) / sst;
}

double rmse(std::span<const double> estimated, std::span<const double> observed) {
  check_pair(estimated, observed);
  return std::sqrt(sse(estimated, observed) / static_cast<double>(observed.size()));
}

double rrmse(std::span<const double> estimated, std::span<const double> observed) {
  check_pair(estimated, observed);
  const double xbar = mean_of(observed);
  if (xbar == 0.0) throw Error(ErrorCode::kUndefinedMetric, "rRMSE undefined: observed mean is zero");
  return rmse(estimated, observed) / xbar * 100.0;
}

Band classify_rrmse(double rrmse_pct) {
  if (!(rrmse_pct >= 0.0)) throw Error(ErrorCode::kDomain, "rRMSE must be nonnegative");
  if (rrmse_pct < 10.0) return Band::kExcellent;
  if (rrmse_pct <= 20.0) return Band::kGood;
  if (rrmse_pct <= 30.0) return Band::kFair;
  return Band::kPoor;
}

const char* to_string(Band band) {
  switch (band) {
    case Band::kExcellent: return "Excellent";
    case Band::kGood: return "Good";
    case Band::kFair: return "Fair";
    case Band::kPoor: return "Poor";
  }
  return "?";
}

SeriesMetrics evaluate_series(std::span<const double> estimated, std::span<const double> observed) {
  SeriesMetrics m;
  m.n = observed.size();
  m.mbe = mbe(estimated, observed);
  m.r2 = r2(estimated, observed);
  m.rmse = rmse(estimated, observed);
  m.rrmse_pct = rrmse(estimated, observed);
  m.band = classify_rrmse(m.rrmse_pct);
  return m;
}

MetricBlock compute_block(const CellPredictions& cell) {
  const auto ytr = column(cell.train, true), xtr = column(cell.train, false);
  const auto yte = column(cell.test, true), xte = column(cell.test, false);
  MetricBlock b;
  b.mbe_train = mbe(ytr, xtr);
  b.mbe_test = mbe(yte, xte);
  b.r2_train = r2(ytr, xtr);
  b.r2_test = r2(yte, xte);
  b.rmse_train = rmse(ytr, xtr);
  b.rmse_test = rmse(yte, xte);
  b.rrmse_train = rrmse(ytr, xtr);
  b.rrmse_test = rrmse(yte, xte);
  b.band = classify_rrmse(b.rrmse_test);
  return b;
}

EvaluationReport::EvaluationReport(std::vector<std::string> regimes,
                                   std::vector<std::string> families)
    : regimes_(std::move(regimes)), families_(std::move(families)) {}

void EvaluationReport::set(const std::string& regime, const std::string& family,
                           MetricBlock block) {
  blocks_[{regime, family}] = block;
  notes_.erase({regime, family});
}

void EvaluationReport::note(const std::string& regime, const std::string& family,
                            std::string reason) {
  notes_[{regime, family}] = std::move(reason);
}

std::optional<MetricBlock> EvaluationReport::get(const std::string& regime,
                                                 const std::string& family) const {
  const auto it = blocks_.find({regime, family});
  if (it == blocks_.end()) return std::nullopt;
  return it->second;
}

std::string EvaluationReport::to_csv() const {
  std::string out = "regime,family,metric,split,value,band\n";
  for (const auto& regime : regimes_) {
    for (const auto& family : families_) {
      const auto it = blocks_.find({regime, family});
      if (it == blocks_.end()) continue;
      const auto& b = it->second;
      const std::string prefix = regime + ',' + family + ',';
      const auto row = [&](const char* metric, const char* split, double v, const char* band) {
        out += prefix + metric + ',' + split + ',' + format_real(v) + ',' + band + '\n';
      };
      row("mbe", "train", b.mbe_train, "");
      row("mbe", "test", b.mbe_test, "");
      row("r2", "train", b.r2_train, "");
      row("r2", "test", b.r2_test, "");
      row("rmse", "train", b.rmse_train, "");
      row("rmse", "test", b.rmse_test, "");
      row("rrmse", "train", b.rrmse_train, to_string(classify_rrmse(b.rrmse_train)));
      row("rrmse", "test", b.rrmse_test, to_string(b.band));
    }
  }
  return out;
}

std::string EvaluationReport::to_text() const {
  constexpr int kLabel = 18;
  constexpr int kCol = 20;
  std::string out;
  char buf[64];
  const auto pad = [](std::string s, int w) {
    if (static_cast<int>(s.size()) < w) s.append(static_cast<std::size_t>(w) - s.size(), ' ');
    return s;
  };
  out += pad("REGIME", 8) + pad("METRIC", kLabel);
  for (const auto& f : families_) out += pad(f, kCol);
  out += '\n';
  struct Row {
    const char* label;
    double (*get)(const MetricBlock&);
  };
  static constexpr Row kRows[] = {
      {"MBE (test)", [](const MetricBlock& b) { return b.mbe_test; }},
      {"R2 train", [](const MetricBlock& b) { return b.r2_train; }},
      {"R2 test", [](const MetricBlock& b) { return b.r2_test; }},
      {"RMSE (test)", [](const MetricBlock& b) { return b.rmse_test; }},
      {"rRMSE % (test)", [](const MetricBlock& b) { return b.rrmse_test; }},
  };
  for (const auto& regime : regimes_) {
    for (const auto& row : kRows) {
      out += pad(regime, 8) + pad(row.label, kLabel);
      for (const auto& family : families_) {
        const auto it = blocks_.find({regime, family});
        if (it == blocks_.end()) {
          out += pad("n/a", kCol);
        } else {
          std::snprintf(buf, sizeof buf, "%.3f", row.get(it->second));
          out += pad(buf, kCol);
        }
      }
      out += '\n';
    }
    out += pad(regime, 8) + pad("Band (test)", kLabel);
    for (const auto& family : families_) {
      const auto it = blocks_.find({regime, family});
      out += pad(it == blocks_.end() ? "n/a" : to_string(it->second.band), kCol);
    }
    out += '\n';
  }
  for (const auto& [key, reason] : notes_) {
    out += "note: " + key.first + "/" + key.second + " absent: " + reason + '\n';
  }
  out +=
      "note: bands by test rRMSE: Excellent [0,10), Good [10,20], Fair (20,30], Poor (30,inf).\n";
  return out;
}

EvaluationReport build_report(std::span<const CellPredictions> cells,
                              std::vector<std::string> regimes,
                              std::vector<std::string> families) {
  EvaluationReport report(std::move(regimes), std::move(families));
  for (const auto& cell : cells) {
    try {
      report.set(cell.regime, cell.family, compute_block(cell));
    } catch (const Error& e) {
      report.note(cell.regime, cell.family, e.what());
    }
  }
  return report;
}

std::string scatter_csv(std::span<const PredictionPair> pairs, double utc_offset_hours) {
  std::string out = "timestamp,observed,estimated\n";
  for (const auto& p : pairs) {
    out += format_iso8601_offset(p.timestamp, utc_offset_hours) + ',' + format_real(p.observed) +
           ',' + format_real(p.estimated) + '\n';
  }
  return out;
}

}  // namespace solrad
