#include "solrad/radiometry.hpp"

#include <cmath>
#include <numbers>

#include "solrad/error.hpp"
#include "solrad/text.hpp"

namespace solrad {
namespace {

constexpr std::string_view kMagic = "HGRID1";

[[noreturn]] void parse_fail(std::size_t line, const std::string& what) {
  throw Error(ErrorCode::kParse, "grid line " + std::to_string(line) + ": " + what);
}

// Splits into '\n'-terminated lines; a missing final terminator is a
// truncation.
std::vector<std::string_view> grid_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    const auto nl = text.find('\n', start);
    if (nl == std::string_view::npos) {
      parse_fail(lines.size() + 1, "missing line terminator (truncated file?)");
    }
    lines.push_back(text.substr(start, nl - start));
    start = nl + 1;
  }
  return lines;
}

std::vector<std::string_view> fields_of(std::string_view line, std::size_t lineno,
                                        std::size_t expected) {
  auto f = split(line, ' ');
  if (f.size() != expected) {
    parse_fail(lineno, "expected " + std::to_string(expected) + " space-separated fields, got " +
                           std::to_string(f.size()));
  }
  return f;
}

double cos_deg(double deg) { return std::cos(deg * std::numbers::pi / 180.0); }

}  // namespace

RasterGrid::RasterGrid(int rows, int cols, const GeoTransform& geotransform,
                       UtcInstant timestamp, std::vector<std::uint16_t> values)
    : rows_(rows), cols_(cols), gt_(geotransform), timestamp_(timestamp),
      values_(std::move(values)) {
  if (rows <= 0 || cols <= 0) throw Error(ErrorCode::kDomain, "grid dimensions must be positive");
  if (values_.size() != static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols)) {
    throw Error(ErrorCode::kDomain, "grid value count does not match rows x cols");
  }
  if (!(gt_[1] > 0.0)) throw Error(ErrorCode::kDomain, "pixel width must be positive");
  if (gt_[5] == 0.0 || !std::isfinite(gt_[5])) {
    throw Error(ErrorCode::kDomain, "pixel height must be nonzero");
  }
  if (gt_[2] != 0.0 || gt_[4] != 0.0) {
    throw Error(ErrorCode::kDomain, "rotated geotransforms are not supported");
  }
  for (auto v : values_) {
    if (v > kMaxDigitalNumber) throw Error(ErrorCode::kDomain, "digital number above 1023");
  }
}

std::optional<std::pair<int, int>> RasterGrid::cell_of(double latitude, double longitude) const {
  const double u = (longitude - gt_[0]) / gt_[1];
  const double v = (latitude - gt_[3]) / gt_[5];
  if (!(u >= 0.0 && u < cols_ && v >= 0.0 && v < rows_)) return std::nullopt;
  return std::pair{static_cast<int>(std::floor(v)), static_cast<int>(std::floor(u))};
}

RasterGrid parse_grid(std::string_view text) {
  const auto lines = grid_lines(text);
  if (lines.empty() || lines[0] != kMagic) parse_fail(1, "expected HGRID1 magic");
  if (lines.size() < 4) parse_fail(lines.size() + 1, "header truncated");

  const auto dims = fields_of(lines[1], 2, 2);
  const auto rows = parse_integer(dims[0]);
  const auto cols = parse_integer(dims[1]);
  if (!rows || !cols || *rows <= 0 || *cols <= 0 || *rows > 100000 || *cols > 100000) {
    parse_fail(2, "invalid dimensions");
  }

  const auto gtf = fields_of(lines[2], 3, 6);
  RasterGrid::GeoTransform gt{};
  for (std::size_t i = 0; i < 6; ++i) {
    const auto v = parse_real(gtf[i]);
    if (!v || !std::isfinite(*v)) parse_fail(3, "invalid geotransform term " + std::to_string(i));
    gt[i] = *v;
  }
  if (gt[2] != 0.0 || gt[4] != 0.0) parse_fail(3, "rotation terms must be exactly 0");
  if (!(gt[1] > 0.0) || gt[5] == 0.0) parse_fail(3, "invalid pixel size");

  if (lines[3].empty() || lines[3].back() != 'Z') parse_fail(4, "timestamp must be UTC ('Z')");
  UtcInstant ts;
  try {
    ts = parse_iso8601(lines[3]);
  } catch (const Error& e) {
    parse_fail(4, e.what());
  }

  const auto nr = static_cast<std::size_t>(*rows);
  const auto nc = static_cast<std::size_t>(*cols);
  if (lines.size() != 4 + nr) {
    parse_fail(lines.size() + 1, "expected " + std::to_string(nr) + " payload rows, found " +
                                     std::to_string(lines.size() - 4));
  }
  std::vector<std::uint16_t> values;
  values.reserve(nr * nc);
  for (std::size_t r = 0; r < nr; ++r) {
    const std::size_t lineno = 5 + r;
    const auto f = fields_of(lines[4 + r], lineno, nc);
    for (std::size_t c = 0; c < nc; ++c) {
      const auto v = parse_integer(f[c]);
      if (!v || *v < 0 || *v > kMaxDigitalNumber) {
        parse_fail(lineno, "digital number out of 0..1023 at column " + std::to_string(c + 1));
      }
      values.push_back(static_cast<std::uint16_t>(*v));
    }
  }
  return RasterGrid(static_cast<int>(nr), static_cast<int>(nc), gt, ts, std::move(values));
}

std::string serialize_grid(const RasterGrid& grid) {
  std::string out;
  out.reserve(64 + grid.values().size() * 4);
  out += kMagic;
  out += '\n';
  out += std::to_string(grid.rows()) + ' ' + std::to_string(grid.cols()) + '\n';
  const auto& gt = grid.geotransform();
  for (std::size_t i = 0; i < 6; ++i) {
    if (i) out += ' ';
    out += format_real(gt[i]);
  }
  out += '\n';
  out += format_iso8601_utc(grid.timestamp());
  out += '\n';
  for (int r = 0; r < grid.rows(); ++r) {
    for (int c = 0; c < grid.cols(); ++c) {
      if (c) out += ' ';
      out += std::to_string(grid.at(r, c));
    }
    out += '\n';
  }
  return out;
}

RasterGrid load_grid(const std::string& path) {
  const auto text = read_text_file(path);
  try {
    return parse_grid(text);
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + e.what());
  }
}

void save_grid(const RasterGrid& grid, const std::string& path) {
  write_text_file(path, serialize_grid(grid));
}

int sample_digital_number(const RasterGrid& grid, double latitude, double longitude) {
  const auto cell = grid.cell_of(latitude, longitude);
  if (!cell) {
    throw Error(ErrorCode::kOutOfBounds, "point (" + format_real(latitude) + ", " +
                                             format_real(longitude) + ") outside grid extent");
  }
  return grid.at(cell->first, cell->second);
}

double sample_window_mean(const RasterGrid& grid, double latitude, double longitude) {
  const auto cell = grid.cell_of(latitude, longitude);
  if (!cell) {
    throw Error(ErrorCode::kOutOfBounds, "point (" + format_real(latitude) + ", " +
                                             format_real(longitude) + ") outside grid extent");
  }
  double sum = 0.0;
  int n = 0;
  for (int r = cell->first - 1; r <= cell->first + 1; ++r) {
    for (int c = cell->second - 1; c <= cell->second + 1; ++c) {
      if (r < 0 || c < 0 || r >= grid.rows() || c >= grid.cols()) continue;
      sum += grid.at(r, c);
      ++n;
    }
  }
  return sum / n;
}

void CalibrationConfig::validate() const {
  if (!(k > 0.0)) throw Error(ErrorCode::kDomain, "calibration k must be positive");
  for (double c : monthly_c) {
    if (!(c > 0.0)) throw Error(ErrorCode::kDomain, "monthly correction factors must be positive");
  }
  if (space_count < 0) throw Error(ErrorCode::kDomain, "space count must be nonnegative");
  if (!(zenith_cutoff_deg > 0.0 && zenith_cutoff_deg <= 90.0)) {
    throw Error(ErrorCode::kDomain, "zenith cutoff must lie in (0, 90]");
  }
}

double nominal_reflectance(double nd, const CalibrationConfig& config) {
  return config.k * (nd - config.space_count);
}

double corrected_reflectance(double r_prev, int month, const CalibrationConfig& config) {
  if (month < 1 || month > 12) throw Error(ErrorCode::kDomain, "month must be in 1..12");
  return config.monthly_c[static_cast<std::size_t>(month - 1)] * r_prev;
}

double pixel_reflectance(double r_post, double earth_sun_distance_au, double zenith_deg,
                         double zenith_cutoff_deg) {
  if (!(zenith_deg < zenith_cutoff_deg)) {
    throw Error(ErrorCode::kLowSun, "zenith " + format_real(zenith_deg) + " deg at or beyond cutoff " +
                                        format_real(zenith_cutoff_deg));
  }
  return (r_post * earth_sun_distance_au * earth_sun_distance_au) / cos_deg(zenith_deg);
}

ReflectanceSample calibrate_flagged(const RasterGrid& grid, const Site& site,
                                    const CalibrationConfig& config, SamplingMode mode) {
  ReflectanceSample s{GeoTemporalPoint{site, grid.timestamp()}, 0.0, 0.0, 0.0, std::nullopt, 0.0, 0.0, false};
  s.nd = mode == SamplingMode::kNearest
             ? static_cast<double>(sample_digital_number(grid, site.latitude(), site.longitude()))
             : sample_window_mean(grid, site.latitude(), site.longitude());
  const auto geo = compute_geometry(s.point);
  const int month = static_cast<int>(static_cast<unsigned>(s.point.local_date().month()));
  s.r_prev = nominal_reflectance(s.nd, config);
  s.r_post = corrected_reflectance(s.r_prev, month, config);
  s.zenith_deg = geo.zenith_angle_deg;
  s.earth_sun_distance_au = geo.earth_sun_distance_au;
  if (s.zenith_deg < config.zenith_cutoff_deg) {
    s.r_p = pixel_reflectance(s.r_post, s.earth_sun_distance_au, s.zenith_deg,
                              config.zenith_cutoff_deg);
    s.valid = true;
  }
  return s;
}

ReflectanceSample calibrate(const RasterGrid& grid, const Site& site,
                            const CalibrationConfig& config, SamplingMode mode) {
  auto s = calibrate_flagged(grid, site, config, mode);
  if (!s.valid) {
    throw Error(ErrorCode::kLowSun, "raster " + format_iso8601_utc(grid.timestamp()) +
                                        ": zenith " + format_real(s.zenith_deg) +
                                        " deg at or beyond cutoff");
  }
  return s;
}

double digital_number_for_reflectance(double target_rp, int month, double earth_sun_distance_au,
                                      double zenith_deg, const CalibrationConfig& config) {
  const double c = config.monthly_c[static_cast<std::size_t>(month - 1)];
  const double gain = config.k * c * earth_sun_distance_au * earth_sun_distance_au / cos_deg(zenith_deg);
  return config.space_count + target_rp / gain;
}

}  // namespace solrad
