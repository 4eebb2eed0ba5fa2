#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace confgraph {

// Fixed-size bit vector used for node sets and per-session columns.
class BitVec {
public:
    BitVec() = default;
    explicit BitVec(std::size_t nbits)
        : nbits_(nbits), words_((nbits + 63) / 64, 0) {}

    std::size_t size() const { return nbits_; }

    bool test(std::size_t i) const {
        return (words_[i >> 6] >> (i & 63)) & 1u;
    }
    void set(std::size_t i) { words_[i >> 6] |= (1ULL << (i & 63)); }
    void reset(std::size_t i) { words_[i >> 6] &= ~(1ULL << (i & 63)); }

    std::size_t count() const {
        std::size_t c = 0;
        for (auto w : words_) c += std::popcount(w);
        return c;
    }

    bool any() const {
        for (auto w : words_)
            if (w) return true;
        return false;
    }

    bool intersects(const BitVec& o) const {
        const std::size_t m = std::min(words_.size(), o.words_.size());
        for (std::size_t i = 0; i < m; ++i)
            if (words_[i] & o.words_[i]) return true;
        return false;
    }

    BitVec& operator|=(const BitVec& o) {
        for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= o.words_[i];
        return *this;
    }
    BitVec& operator&=(const BitVec& o) {
        for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= o.words_[i];
        return *this;
    }
    // this &= ~o
    BitVec& and_not(const BitVec& o) {
        for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= ~o.words_[i];
        return *this;
    }

    friend bool operator==(const BitVec& a, const BitVec& b) {
        return a.nbits_ == b.nbits_ && a.words_ == b.words_;
    }

    static std::size_t and_count(const BitVec& a, const BitVec& b) {
        std::size_t c = 0;
        const std::size_t m = std::min(a.words_.size(), b.words_.size());
        for (std::size_t i = 0; i < m; ++i) c += std::popcount(a.words_[i] & b.words_[i]);
        return c;
    }

    std::vector<int> to_indices() const {
        std::vector<int> out;
        for (std::size_t w = 0; w < words_.size(); ++w) {
            std::uint64_t bits = words_[w];
            while (bits) {
                const int b = std::countr_zero(bits);
                out.push_back(static_cast<int>(w * 64 + b));
                bits &= bits - 1;
            }
        }
        return out;
    }

    std::uint64_t* words() { return words_.data(); }
    const std::uint64_t* words() const { return words_.data(); }
    std::size_t word_count() const { return words_.size(); }

private:
    std::size_t nbits_ = 0;
    std::vector<std::uint64_t> words_;
};

}  // namespace confgraph
