#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace api2com::harness {

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> valid;
  std::vector<std::size_t> test;
};

/// Seeded shuffle of 0..n-1, cut by ratio. Valid and test get the floor of
/// their share, train takes the remainder. Throws when n < 10.
SplitIndices split_indices(std::size_t n, std::uint64_t seed, std::array<unsigned, 3> ratios = {8, 1, 1});

template <typename T>
struct Split {
  std::vector<T> train;
  std::vector<T> valid;
  std::vector<T> test;
};

template <typename T>
Split<T> split_dataset(const std::vector<T>& records, std::uint64_t seed, std::array<unsigned, 3> ratios = {8, 1, 1}) {
  const auto idx = split_indices(records.size(), seed, ratios);
  Split<T> s;
  for (auto i : idx.train) s.train.push_back(records[i]);
  for (auto i : idx.valid) s.valid.push_back(records[i]);
  for (auto i : idx.test) s.test.push_back(records[i]);
  return s;
}

}  // namespace api2com::harness
