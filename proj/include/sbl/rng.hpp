#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace sbl {

// splitmix64; used to derive independent substreams from (seed, index) so
// parallel/retried trials stay deterministic.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t substream(std::uint64_t seed, std::uint64_t index) {
    return splitmix64(seed ^ splitmix64(index + 1));
}

inline std::mt19937_64 make_rng(std::uint64_t seed) {
    return std::mt19937_64(splitmix64(seed));
}

// k distinct values from {0,...,n-1}, sorted. Partial Fisher-Yates.
std::vector<int> sample_distinct(std::mt19937_64& rng, int n, int k);

// k distinct elements of `pool`, sorted by value.
std::vector<int> sample_from(std::mt19937_64& rng, const std::vector<int>& pool, int k);

} // namespace sbl
