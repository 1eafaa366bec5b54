#include "cloudifier/train/split.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "cloudifier/common.hpp"
#include "cloudifier/rng.hpp"

namespace cloudifier::train {

SplitIndices split_indices(std::size_t n, const SplitSpec& spec) {
  if (n == 0) throw ConfigError("split_dataset: empty input");
  const std::array<double, 3> f{spec.train, spec.test, spec.dev};
  for (double v : f) {
    if (!(v >= 0.0)) throw ConfigError("split_dataset: fractions must be non-negative");
  }
  if (std::abs(f[0] + f[1] + f[2] - 1.0) > 1e-9) throw ConfigError("split_dataset: fractions must sum to 1");

  std::array<std::size_t, 3> count{};
  std::array<double, 3> rem{};
  std::size_t assigned = 0;
  for (int k = 0; k < 3; ++k) {
    // Rounded at 1e-9 so 0.93 * 100 counts as exactly 93.
    const double q = std::round(f[k] * static_cast<double>(n) * 1e9) / 1e9;
    count[k] = static_cast<std::size_t>(std::floor(q));
    rem[k] = q - std::floor(q);
    assigned += count[k];
  }
  std::array<int, 3> order{0, 1, 2};
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return rem[a] > rem[b]; });
  for (std::size_t i = 0; assigned < n; ++i, ++assigned) ++count[order[i % 3]];

  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  Rng rng(spec.seed);
  for (std::size_t i = n - 1; i > 0; --i) {
    const auto j = static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(i)));
    std::swap(perm[i], perm[j]);
  }
  SplitIndices out;
  auto it = perm.begin();
  out.train.assign(it, it + static_cast<std::ptrdiff_t>(count[0]));
  it += static_cast<std::ptrdiff_t>(count[0]);
  out.test.assign(it, it + static_cast<std::ptrdiff_t>(count[1]));
  it += static_cast<std::ptrdiff_t>(count[1]);
  out.dev.assign(it, perm.end());
  return out;
}

}  // namespace cloudifier::train
