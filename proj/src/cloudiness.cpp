#include "solrad/cloudiness.hpp"

#include <algorithm>
#include <cmath>

#include "solrad/error.hpp"
#include "solrad/text.hpp"

namespace solrad {

const EnvelopeSlot& ReflectanceEnvelope::slot(int hour) const {
  if (hour < 0 || hour >= kHourSlots) {
    throw Error(ErrorCode::kDomain, "hour slot must be in 0..23");
  }
  const auto& s = slots_[static_cast<std::size_t>(hour)];
  if (!s.populated()) {
    throw Error(ErrorCode::kMissingSlot, "no reflectance samples for hour slot " + std::to_string(hour));
  }
  return s;
}

void ReflectanceEnvelope::add(int hour, double r_p) {
  if (hour < 0 || hour >= kHourSlots) throw Error(ErrorCode::kDomain, "hour slot must be in 0..23");
  if (!std::isfinite(r_p)) throw Error(ErrorCode::kDomain, "non-finite reflectance");
  auto& s = slots_[static_cast<std::size_t>(hour)];
  if (s.sample_count == 0) {
    s.r_min = r_p;
    s.r_max_observed = r_p;
  } else {
    s.r_min = std::min(s.r_min, r_p);
    s.r_max_observed = std::max(s.r_max_observed, r_p);
  }
  s.r_max_adjusted = kMaxReflectanceFraction * s.r_max_observed;
  ++s.sample_count;
}

std::string ReflectanceEnvelope::to_csv(std::string_view metadata) const {
  std::string out(metadata);
  out += "slot,r_min,r_max_adjusted,count\n";
  for (int h = 0; h < kHourSlots; ++h) {
    const auto& s = slots_[static_cast<std::size_t>(h)];
    if (!s.populated()) continue;
    out += std::to_string(h) + ',' + format_real(s.r_min) + ',' + format_real(s.r_max_adjusted) +
           ',' + std::to_string(s.sample_count) + '\n';
  }
  return out;
}

ReflectanceEnvelope ReflectanceEnvelope::from_csv(std::string_view text) {
  ReflectanceEnvelope env;
  bool header = false;
  std::size_t lineno = 0;
  for (auto line : split(text, '\n')) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    if (!header) {
      if (line != "slot,r_min,r_max_adjusted,count") {
        throw Error(ErrorCode::kParse, "envelope: unexpected header");
      }
      header = true;
      continue;
    }
    const auto f = split(line, ',');
    const auto bad = [&] {
      return Error(ErrorCode::kParse, "envelope line " + std::to_string(lineno) + ": malformed row");
    };
    if (f.size() != 4) throw bad();
    const long long slot = parse_integer(f[0]).value_or(-1);
    const long long count = parse_integer(f[3]).value_or(0);
    const auto rmin = parse_real(f[1]);
    const auto rmax = parse_real(f[2]);
    if (!rmin || !rmax || slot < 0 || slot >= kHourSlots || count <= 0) throw bad();
    auto& s = env.slots_[static_cast<std::size_t>(slot)];
    s.r_min = rmin.value();
    s.r_max_adjusted = rmax.value();
    s.r_max_observed = rmax.value() / kMaxReflectanceFraction;
    s.sample_count = static_cast<int>(count);
  }
  if (!header) throw Error(ErrorCode::kParse, "envelope: missing header");
  return env;
}

int hour_slot(const GeoTemporalPoint& point) {
  return std::clamp(static_cast<int>(std::floor(point.local_clock_hour())), 0, kHourSlots - 1);
}

ReflectanceEnvelope build_envelope(std::span<const SlotValue> values) {
  ReflectanceEnvelope env;
  for (const auto& v : values) env.add(v.slot, v.r_p);
  if (values.empty()) throw Error(ErrorCode::kEmptyInput, "no valid reflectance samples");
  return env;
}

ReflectanceEnvelope build_envelope(std::span<const ReflectanceSample> samples) {
  std::vector<SlotValue> values;
  values.reserve(samples.size());
  for (const auto& s : samples) {
    if (s.valid && s.r_p) values.push_back({hour_slot(s.point), *s.r_p});
  }
  return build_envelope(std::span<const SlotValue>(values));
}

double cloudiness_index(double r_p, int slot, const ReflectanceEnvelope& envelope) {
  const auto& s = envelope.slot(slot);
  if (s.degenerate()) return 0.0;
  const double ratio = (r_p - s.r_min) / (s.r_max_adjusted - s.r_min);
  if (std::isnan(ratio)) throw Error(ErrorCode::kDomain, "non-finite reflectance");
  return std::clamp(ratio, 0.0, 1.0);
}

}  // namespace solrad
