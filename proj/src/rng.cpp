#include "sbl/rng.hpp"

#include <algorithm>

#include "sbl/errors.hpp"

namespace sbl {

std::vector<int> sample_distinct(std::mt19937_64& rng, int n, int k) {
    if (k < 0 || k > n) throw parameter_error("sample_distinct: need 0 <= k <= n");
    std::vector<int> pool(n);
    for (int i = 0; i < n; ++i) pool[i] = i;
    for (int i = 0; i < k; ++i) {
        std::uniform_int_distribution<int> pick(i, n - 1);
        std::swap(pool[i], pool[pick(rng)]);
    }
    pool.resize(k);
    std::sort(pool.begin(), pool.end());
    return pool;
}

std::vector<int> sample_from(std::mt19937_64& rng, const std::vector<int>& pool, int k) {
    if (k < 0 || k > int(pool.size()))
        throw parameter_error("sample_from: need 0 <= k <= |pool|");
    std::vector<int> copy = pool;
    for (int i = 0; i < k; ++i) {
        std::uniform_int_distribution<int> pick(i, int(copy.size()) - 1);
        std::swap(copy[i], copy[pick(rng)]);
    }
    copy.resize(k);
    std::sort(copy.begin(), copy.end());
    return copy;
}

} // namespace sbl
