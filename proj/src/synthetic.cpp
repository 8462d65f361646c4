#include "solrad/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>

#include "solrad/cloudiness.hpp"
#include "solrad/error.hpp"
#include "solrad/random.hpp"
#include "solrad/text.hpp"

namespace solrad {
namespace {

using namespace std::chrono;

// Independent streams so that toggling one knob does not reshuffle the rest.
enum Stream : std::uint64_t { kClouds = 1, kNoise, kMeteo, kBackground, kSunshine, kOrphans };

struct ImageDraft {
  UtcInstant t;
  SolarGeometry geo;
  int slot{};
  bool valid{};
  double nc{};
  double rp{};
  int nd{};
};

}  // namespace

SynthSpec SynthSpec::defaults() {
  SynthSpec s;
  s.a.fill(0.207);
  s.b.fill(0.419);
  s.calibration.k = 0.001;
  s.calibration.monthly_c.fill(1.0);
  return s;
}

void SynthSpec::validate() const {
  Site(latitude, longitude, utc_offset_hours);
  calibration.validate();
  if (!start.ok()) throw Error(ErrorCode::kConfig, "synth: invalid start date");
  if (days < 1) throw Error(ErrorCode::kConfig, "synth: days must be >= 1");
  if (images_per_day < 1) throw Error(ErrorCode::kConfig, "synth: images_per_day must be >= 1");
  if (image_interval_minutes < 1) throw Error(ErrorCode::kConfig, "synth: image interval must be >= 1 minute");
  if (first_image_hour < 0 ||
      first_image_hour * 60 + (images_per_day - 1) * image_interval_minutes >= 24 * 60) {
    throw Error(ErrorCode::kConfig, "synth: image schedule must fit inside one local day");
  }
  if (!(r_cloud_max > r_clear) || !(kMaxReflectanceFraction * r_cloud_max > r_clear)) {
    throw Error(ErrorCode::kConfig, "synth: need 0.8 * r_cloud_max > r_clear");
  }
  if (noise_sigma < 0.0 || cloud_jitter < 0.0) throw Error(ErrorCode::kConfig, "synth: negative noise");
  if (grid_size < 1 || !(pixel_deg > 0.0)) throw Error(ErrorCode::kConfig, "synth: invalid grid geometry");
  if (orphan_images < 0) throw Error(ErrorCode::kConfig, "synth: orphan_images must be >= 0");
  if (sunshine_missing_fraction < 0.0 || sunshine_missing_fraction > 1.0) {
    throw Error(ErrorCode::kConfig, "synth: sunshine_missing_fraction must be in [0, 1]");
  }
}

SyntheticCorpus generate_synthetic(const SynthSpec& spec, std::uint64_t seed) {
  spec.validate();
  const Site site(spec.latitude, spec.longitude, spec.utc_offset_hours);
  const auto& cal = spec.calibration;
  const double r_hi = kMaxReflectanceFraction * spec.r_cloud_max;
  const auto offset = minutes{static_cast<long>(std::lround(spec.utc_offset_hours * 60.0))};

  Rng clouds(derive_seed(seed, kClouds));
  Rng noise(derive_seed(seed, kNoise));
  Rng meteo(derive_seed(seed, kMeteo));
  Rng background(derive_seed(seed, kBackground));
  Rng sunshine(derive_seed(seed, kSunshine));

  const int gs = spec.grid_size;
  const RasterGrid::GeoTransform gt{spec.longitude - gs * spec.pixel_deg / 2.0, spec.pixel_deg, 0.0,
                                    spec.latitude + gs * spec.pixel_deg / 2.0, 0.0, -spec.pixel_deg};

  SyntheticCorpus corpus;
  std::array<int, kHourSlots> slot_seen{};
  std::vector<UtcInstant> valid_image_times;

  for (int d = 0; d < spec.days; ++d) {
    const sys_days day = sys_days{spec.start} + days{d};
    const year_month_day ymd{day};
    const int month = static_cast<int>(static_cast<unsigned>(ymd.month()));
    const int doy = day_of_year(ymd);
    const double a = spec.a[static_cast<std::size_t>(month - 1)];
    const double b = spec.b[static_cast<std::size_t>(month - 1)];
    const double daily_level = spec.clear_sky ? 0.0 : clouds.uniform();

    std::vector<ImageDraft> images;
    for (int i = 0; i < spec.images_per_day; ++i) {
      ImageDraft im;
      const sys_seconds local = day + minutes{spec.first_image_hour * 60 + i * spec.image_interval_minutes};
      im.t = local - offset;
      const GeoTemporalPoint point{site, im.t};
      im.geo = compute_geometry(point);
      im.slot = hour_slot(point);
      im.valid = im.geo.zenith_angle_deg < cal.zenith_cutoff_deg;
      const double jitter = clouds.normal();
      im.nc = spec.clear_sky ? 0.0 : std::clamp(daily_level + spec.cloud_jitter * jitter, 0.0, 1.0);
      if (im.valid) {
        const int seen = slot_seen[static_cast<std::size_t>(im.slot)]++;
        if (!spec.clear_sky && seen == 0) {
          im.nc = 0.0;
          im.rp = spec.r_clear;
        } else if (!spec.clear_sky && seen == 1) {
          im.nc = 1.0;
          im.rp = spec.r_cloud_max;
        } else {
          im.rp = spec.r_clear + im.nc * (r_hi - spec.r_clear);
        }
        const double dn = digital_number_for_reflectance(im.rp, month, im.geo.earth_sun_distance_au,
                                                         im.geo.zenith_angle_deg, cal);
        const long long nd = std::llround(dn);
        if (nd < 0 || nd > kMaxDigitalNumber) {
          throw Error(ErrorCode::kDomain, "synth: reflectance " + format_real(im.rp) +
                                              " needs digital number " + std::to_string(nd) +
                                              " outside 0..1023; lower calibration k");
        }
        im.nd = static_cast<int>(nd);
        valid_image_times.push_back(im.t);
      } else {
        // below the cutoff the sensor sees (almost) nothing
        im.rp = 0.0;
        im.nd = cal.space_count;
      }
      images.push_back(im);
    }

    double nc_sum = 0.0;
    int n_valid = 0;
    for (const auto& im : images) {
      if (im.valid) {
        nc_sum += im.nc;
        ++n_valid;
      }
    }
    const double clear = spec.clear_sky ? 1.0 : (n_valid ? 1.0 - nc_sum / n_valid : 1.0 - daily_level);

    // daily ground record
    const double n_day = day_length(spec.latitude, declination(doy));
    const double h0 = from_wh_per_m2(extraterrestrial_daily(spec.latitude, doy), spec.unit);
    const double y_noise = spec.noise_sigma * noise.normal();
    GroundDay g;
    g.date = ymd;
    g.radiation = std::max(0.0, (a + b * clear + y_noise) * h0);
    const bool missing = sunshine.uniform() < spec.sunshine_missing_fraction;
    if (!missing) g.sunshine_hours = clear * n_day;
    corpus.ground.push_back(g);
    corpus.daily_truth.push_back({ymd, clear, (a + b * clear) * h0, h0});

    // rasters and per-image truth
    std::map<std::int64_t, const ImageDraft*> by_hour;
    for (const auto& im : images) {
      std::vector<std::uint16_t> values(static_cast<std::size_t>(gs) * gs);
      for (auto& v : values) v = static_cast<std::uint16_t>(cal.space_count + background.index(400));
      values[static_cast<std::size_t>(gs / 2) * gs + gs / 2] = static_cast<std::uint16_t>(im.nd);
      corpus.rasters.emplace_back(gs, gs, gt, im.t, std::move(values));
      by_hour.emplace(hour_key(im.t), &im);
    }

    // hourly station rows at local hh:00
    for (int h = 0; h < 24; ++h) {
      StationObservation obs;
      obs.timestamp = (day + hours{h}) - offset;
      const auto it = by_hour.find(hour_key(obs.timestamp));
      double g_ext;
      double clear_hour;
      double nc_hour;
      if (it != by_hour.end()) {
        g_ext = it->second->geo.extraterrestrial_wm2;
        nc_hour = it->second->nc;
        clear_hour = 1.0 - nc_hour;
      } else {
        g_ext = extraterrestrial_hourly(GeoTemporalPoint{site, obs.timestamp});
        nc_hour = 1.0 - clear;
        clear_hour = clear;
      }
      const double h_true = (a + b * clear_hour) * g_ext;
      const double radiation = std::max(0.0, (a + b * clear_hour + spec.noise_sigma * noise.normal()) * g_ext);
      const double load = radiation / 1000.0;
      obs.solar_radiation = radiation;
      obs.temperature = 18.0 + 10.0 * load + 0.5 * meteo.normal();
      obs.humidity = std::clamp(88.0 - 35.0 * load + 3.0 * meteo.normal(), 0.0, 100.0);
      obs.wind_speed = std::max(0.0, 1.0 + 2.5 * load + 0.5 * meteo.normal());
      obs.wind_direction = meteo.uniform(0.0, 360.0);
      const double rain_draw = meteo.uniform();
      obs.rain = (nc_hour > 0.6 && rain_draw < 0.4) ? 0.2 + 5.0 * meteo.uniform() : 0.0;
      corpus.station.push_back(obs);
      if (it != by_hour.end()) {
        const auto& im = *it->second;
        corpus.truth.push_back({im.t, im.nc, h_true, im.rp, im.nd, im.valid});
      }
    }
    // images that share an hour with an earlier image still get a truth row
    std::set<std::int64_t> covered;
    for (const auto& im : images) {
      if (!covered.insert(hour_key(im.t)).second) {
        const double g_ext = im.geo.extraterrestrial_wm2;
        corpus.truth.push_back({im.t, im.nc, (a + b * (1.0 - im.nc)) * g_ext, im.rp, im.nd, im.valid});
      }
    }
  }
  std::stable_sort(corpus.truth.begin(), corpus.truth.end(),
                   [](const auto& x, const auto& y) { return x.timestamp < y.timestamp; });

  if (spec.orphan_images > 0) {
    if (static_cast<std::size_t>(spec.orphan_images) > valid_image_times.size()) {
      throw Error(ErrorCode::kConfig, "synth: more orphan images requested than valid images");
    }
    Rng pick(derive_seed(seed, kOrphans));
    std::vector<std::int64_t> keys;
    for (auto t : valid_image_times) keys.push_back(hour_key(t));
    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
    if (static_cast<std::size_t>(spec.orphan_images) > keys.size()) {
      throw Error(ErrorCode::kConfig, "synth: more orphan images requested than image hours");
    }
    pick.shuffle(std::span<std::int64_t>(keys));
    const std::set<std::int64_t> drop(keys.begin(), keys.begin() + spec.orphan_images);
    std::erase_if(corpus.station, [&](const StationObservation& o) {
      return drop.count(hour_key(o.timestamp)) > 0;
    });
  }
  return corpus;
}

std::string raster_file_name(UtcInstant t) {
  const auto dp = floor<days>(t);
  const year_month_day ymd{dp};
  const hh_mm_ss hms{t - dp};
  char buf[64];
  std::snprintf(buf, sizeof buf, "goes_%04d%02u%02uT%02ld%02ld%02ldZ.hgrid", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<long>(hms.hours().count()), static_cast<long>(hms.minutes().count()),
                static_cast<long>(hms.seconds().count()));
  return buf;
}

std::string ground_truth_csv(const SyntheticCorpus& corpus, double utc_offset_hours,
                             std::string_view metadata) {
  std::string out(metadata);
  out += "timestamp,nc_true,h_true,rp_true,nd,valid\n";
  for (const auto& r : corpus.truth) {
    out += format_iso8601_offset(r.timestamp, utc_offset_hours) + ',' + format_real(r.nc_true) + ',' +
           format_real(r.h_true) + ',' + format_real(r.rp_true) + ',' + std::to_string(r.nd) + ',' +
           (r.valid ? "1" : "0") + '\n';
  }
  return out;
}

std::string daily_truth_csv(const SyntheticCorpus& corpus, std::string_view metadata) {
  std::string out(metadata);
  out += "date,clear_fraction,h_true,h_ext\n";
  for (const auto& r : corpus.daily_truth) {
    out += format_date(r.date) + ',' + format_real(r.clear_fraction) + ',' + format_real(r.h_true) +
           ',' + format_real(r.h_ext) + '\n';
  }
  return out;
}

}  // namespace solrad
