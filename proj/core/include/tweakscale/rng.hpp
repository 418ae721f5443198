// Copyright 2026 The tweakscale Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef TWEAKSCALE_RNG_HPP_
#define TWEAKSCALE_RNG_HPP_

#include <cstdint>
#include <random>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace tweakscale {

using Rng = std::mt19937_64;

inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Independent stream seed for a labelled consumer (table, tool, run).
inline std::uint64_t deriveSeed(std::uint64_t seed, std::string_view label) {
  std::uint64_t z = seed ^ fnv1a(label);
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Bounded draw with rejection; std::uniform_int_distribution is not
// specified bit-for-bit across standard libraries.
inline std::uint64_t uniformBelow(Rng& rng, std::uint64_t n) {
  if (n <= 1) return 0;
  const std::uint64_t limit = Rng::max() - Rng::max() % n;
  std::uint64_t x = rng();
  while (x >= limit) x = rng();
  return x % n;
}

/// Up to `k` distinct elements of `pool` in random order.
template <typename T>
std::vector<T> sample(Rng& rng, const std::vector<T>& pool, std::size_t k) {
  std::vector<T> out;
  if (pool.size() <= 2 * k) {
    out = pool;
    for (std::size_t i = out.size(); i > 1; --i) std::swap(out[i - 1], out[uniformBelow(rng, i)]);
    if (out.size() > k) out.resize(k);
    return out;
  }
  std::unordered_set<std::size_t> seen;
  while (out.size() < k) {
    const std::size_t i = uniformBelow(rng, pool.size());
    if (seen.insert(i).second) out.push_back(pool[i]);
  }
  return out;
}

}  // namespace tweakscale

#endif  // TWEAKSCALE_RNG_HPP_
