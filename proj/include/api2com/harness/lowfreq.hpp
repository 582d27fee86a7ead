#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "api2com/metrics/metrics.hpp"

namespace api2com::harness {

struct FreqBucket {
  std::size_t lo;  // inclusive
  std::size_t hi;  // exclusive
};

inline constexpr std::array<FreqBucket, 7> kFreqBuckets = {
    {{0, 50}, {50, 100}, {100, 150}, {150, 200}, {200, 300}, {300, 400}, {400, 500}}};

std::string bucket_label(std::size_t i);  // "<50", "50-100", ...
/// Bucket index for a training frequency; none at 500 and above.
std::optional<std::size_t> bucket_of(std::size_t frequency);

struct LowFreqCounts {
  std::array<std::size_t, 7> hypothesis{};  // generated tokens also present in the reference
  std::array<std::size_t, 7> reference{};   // all reference tokens
};

/// A hypothesis token counts when the aligned reference contains it, up to
/// the number of times it occurs there.
LowFreqCounts low_frequency_analysis(const std::vector<metrics::EvalPair>& pairs,
                                     const std::function<std::size_t(std::string_view)>& train_frequency);

}  // namespace api2com::harness
