#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace netshift {

using Rng = std::mt19937_64;

/// Independent stream keyed by a tuple such as (seed, window, bootstrap index).
/// The same key always yields the same stream, whatever thread draws from it.
inline Rng make_rng(std::initializer_list<std::uint64_t> key) {
  std::vector<std::uint32_t> words;
  words.reserve(key.size() * 2 + 1);
  words.push_back(static_cast<std::uint32_t>(key.size()));
  for (auto k : key) {
    words.push_back(static_cast<std::uint32_t>(k & 0xffffffffu));
    words.push_back(static_cast<std::uint32_t>(k >> 32));
  }
  std::seed_seq seq(words.begin(), words.end());
  return Rng(seq);
}

/// Child seed for nested streams, e.g. a fit run inside one bootstrap draw.
inline std::uint64_t derive_seed(std::initializer_list<std::uint64_t> key) {
  auto rng = make_rng(key);
  return rng();
}

}  // namespace netshift
