#include "api2com/harness/split.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

namespace api2com::harness {

SplitIndices split_indices(std::size_t n, std::uint64_t seed, std::array<unsigned, 3> ratios) {
  if (n < 10) throw std::invalid_argument("need at least 10 records to split, got " + std::to_string(n));
  const unsigned total = ratios[0] + ratios[1] + ratios[2];
  if (total == 0) throw std::invalid_argument("split ratios are all zero");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  const std::size_t n_valid = n * ratios[1] / total;
  const std::size_t n_test = n * ratios[2] / total;
  const std::size_t n_train = n - n_valid - n_test;
  SplitIndices s;
  s.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  s.valid.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train),
                 order.begin() + static_cast<std::ptrdiff_t>(n_train + n_valid));
  s.test.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train + n_valid), order.end());
  return s;
}

}  // namespace api2com::harness
