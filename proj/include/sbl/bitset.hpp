#pragma once

#include <cstdint>
#include <vector>

namespace sbl {

// Dynamic bitset over 64-bit words; enough for candidate-set intersections
// in the embedding searches and subset density counts.
class DynBitset {
public:
    DynBitset() = default;
    explicit DynBitset(int bits) : bits_(bits), words_((bits + 63) / 64, 0) {}

    void set(int i) { words_[i >> 6] |= 1ULL << (i & 63); }
    void reset(int i) { words_[i >> 6] &= ~(1ULL << (i & 63)); }
    bool test(int i) const { return (words_[i >> 6] >> (i & 63)) & 1ULL; }
    int size_bits() const { return bits_; }

    void clear() { std::fill(words_.begin(), words_.end(), 0); }

    void and_with(const DynBitset& o) {
        for (std::size_t w = 0; w < words_.size(); ++w) words_[w] &= o.words_[w];
    }
    void or_with(const DynBitset& o) {
        for (std::size_t w = 0; w < words_.size(); ++w) words_[w] |= o.words_[w];
    }
    void and_not_with(const DynBitset& o) {
        for (std::size_t w = 0; w < words_.size(); ++w) words_[w] &= ~o.words_[w];
    }

    int count() const {
        int c = 0;
        for (auto w : words_) c += __builtin_popcountll(w);
        return c;
    }

    int and_count(const DynBitset& o) const {
        int c = 0;
        for (std::size_t w = 0; w < words_.size(); ++w)
            c += __builtin_popcountll(words_[w] & o.words_[w]);
        return c;
    }

    // lowest set bit, or -1
    int first() const {
        for (std::size_t w = 0; w < words_.size(); ++w)
            if (words_[w]) return int(w) * 64 + __builtin_ctzll(words_[w]);
        return -1;
    }

    // next set bit strictly after i, or -1
    int next(int i) const {
        ++i;
        if (i >= bits_) return -1;
        std::size_t w = std::size_t(i) >> 6;
        std::uint64_t cur = words_[w] & (~0ULL << (i & 63));
        while (true) {
            if (cur) return int(w) * 64 + __builtin_ctzll(cur);
            if (++w >= words_.size()) return -1;
            cur = words_[w];
        }
    }

    std::vector<int> to_vector() const {
        std::vector<int> out;
        for (int i = first(); i >= 0; i = next(i)) out.push_back(i);
        return out;
    }

    bool operator==(const DynBitset& o) const { return words_ == o.words_; }

private:
    int bits_ = 0;
    std::vector<std::uint64_t> words_;
};

} // namespace sbl
