#pragma once

#include <cstdint>
#include <vector>

namespace cloudifier::train {

struct SplitSpec {
  double train = 0.93;
  double test = 0.04;
  double dev = 0.03;
  std::uint64_t seed = 0;
};

struct SplitIndices {
  std::vector<std::size_t> train, test, dev;
};

// Seeded shuffle of [0, n), then contiguous train/test/dev parts sized by
// largest-remainder rounding of n * fraction (ties go to the earlier part).
SplitIndices split_indices(std::size_t n, const SplitSpec& spec);

template <class T>
struct Split {
  std::vector<T> train, test, dev;
};

template <class T>
Split<T> split_dataset(const std::vector<T>& items, const SplitSpec& spec) {
  const SplitIndices idx = split_indices(items.size(), spec);
  Split<T> out;
  for (auto i : idx.train) out.train.push_back(items[i]);
  for (auto i : idx.test) out.test.push_back(items[i]);
  for (auto i : idx.dev) out.dev.push_back(items[i]);
  return out;
}

}  // namespace cloudifier::train
