#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace gkde {

using Rng = std::mt19937_64;

//! SplitMix64 finalizer; a bijective 64-bit mixer.
std::uint64_t mix64(std::uint64_t x);

//! Seed of an independent stream identified by a path of counters below a
//! master seed, e.g. stream_seed(seed, {n_index, replication}). The value
//! depends only on the arguments, never on scheduling.
std::uint64_t stream_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path);

inline Rng make_rng(std::uint64_t master, std::initializer_list<std::uint64_t> path)
{
  return Rng(stream_seed(master, path));
}

} // namespace gkde
