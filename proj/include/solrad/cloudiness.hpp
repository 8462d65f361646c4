#pragma once

/**
 * @file cloudiness.hpp
 * @brief Per-hour reflectance envelopes and the clamped cloudiness index.
 *
 * Slots are local clock hours 0..23 pooled over the whole dataset at one
 * site. The upper bound is 80% of the observed maximum.
 */

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "solrad/radiometry.hpp"

namespace solrad {

inline constexpr double kMaxReflectanceFraction = 0.8;
inline constexpr int kHourSlots = 24;

struct EnvelopeSlot {
  double r_min{};
  double r_max_observed{};
  double r_max_adjusted{};
  int sample_count{0};

  [[nodiscard]] bool populated() const noexcept { return sample_count > 0; }
  /// Fewer than two samples, or the adjusted max does not exceed the min.
  [[nodiscard]] bool degenerate() const noexcept {
    return sample_count < 2 || !(r_max_adjusted > r_min);
  }
};

/// One reflectance value tagged with its hour slot.
struct SlotValue {
  int slot{};
  double r_p{};
};

class ReflectanceEnvelope {
 public:
  ReflectanceEnvelope() = default;

  /// Throws kMissingSlot when the slot has no samples.
  [[nodiscard]] const EnvelopeSlot& slot(int hour) const;
  [[nodiscard]] const std::array<EnvelopeSlot, kHourSlots>& slots() const noexcept {
    return slots_;
  }

  void add(int hour, double r_p);

  /// CSV `slot,r_min,r_max_adjusted,count`, populated slots only, plus any
  /// leading `#` metadata lines supplied by the caller.
  [[nodiscard]] std::string to_csv(std::string_view metadata = {}) const;
  static ReflectanceEnvelope from_csv(std::string_view text);

 private:
  std::array<EnvelopeSlot, kHourSlots> slots_{};
};

/// Local clock hour of a sample, 0..23.
int hour_slot(const GeoTemporalPoint& point);

/// Builds the envelope from valid samples. Throws kEmptyInput when no
/// valid sample exists.
ReflectanceEnvelope build_envelope(std::span<const ReflectanceSample> samples);
ReflectanceEnvelope build_envelope(std::span<const SlotValue> values);

/// clamp((r_p - r_min) / (r_max_adjusted - r_min), 0, 1). A degenerate slot
/// yields 0 (clear). Throws kMissingSlot for an empty slot.
double cloudiness_index(double r_p, int slot, const ReflectanceEnvelope& envelope);

}  // namespace solrad
