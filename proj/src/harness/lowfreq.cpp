#include "api2com/harness/lowfreq.hpp"

#include <map>

namespace api2com::harness {

std::string bucket_label(std::size_t i) {
  const auto& b = kFreqBuckets.at(i);
  if (b.lo == 0) return "<" + std::to_string(b.hi);
  return std::to_string(b.lo) + "-" + std::to_string(b.hi);
}

std::optional<std::size_t> bucket_of(std::size_t f) {
  for (std::size_t i = 0; i < kFreqBuckets.size(); ++i) {
    if (f >= kFreqBuckets[i].lo && f < kFreqBuckets[i].hi) return i;
  }
  return std::nullopt;
}

LowFreqCounts low_frequency_analysis(const std::vector<metrics::EvalPair>& pairs,
                                     const std::function<std::size_t(std::string_view)>& train_frequency) {
  LowFreqCounts c;
  for (const auto& p : pairs) {
    std::map<std::string, std::size_t> left;
    for (const auto& t : p.reference) {
      ++left[t];
      if (auto b = bucket_of(train_frequency(t))) ++c.reference[*b];
    }
    for (const auto& t : p.hypothesis) {
      auto it = left.find(t);
      if (it == left.end() || it->second == 0) continue;
      --it->second;
      if (auto b = bucket_of(train_frequency(t))) ++c.hypothesis[*b];
    }
  }
  return c;
}

}  // namespace api2com::harness
