#pragma once

#include <bit>
#include <cstdint>
#include <vector>

namespace gsp {

// Fixed-length bit vector over 64-bit words. Used both for syndrome
// vectors (bit v = mu_v) and for vertex masks.
struct Bits {
    uint32_t n = 0;
    std::vector<uint64_t> w;

    Bits() = default;
    explicit Bits(uint32_t nbits) : n(nbits), w((nbits + 63) / 64, 0) {}

    static Bits of_size(uint32_t nbits) { return Bits(nbits); }

    bool get(uint32_t i) const { return (w[i >> 6] >> (i & 63)) & 1; }
    void set(uint32_t i, bool v = true) {
        uint64_t m = uint64_t{1} << (i & 63);
        if (v)
            w[i >> 6] |= m;
        else
            w[i >> 6] &= ~m;
    }
    void flip(uint32_t i) { w[i >> 6] ^= uint64_t{1} << (i & 63); }

    void clear() {
        for (auto& x : w) x = 0;
    }

    bool any() const {
        for (auto x : w)
            if (x) return true;
        return false;
    }

    uint32_t popcount() const {
        uint32_t c = 0;
        for (auto x : w) c += static_cast<uint32_t>(std::popcount(x));
        return c;
    }

    void xor_with(const Bits& o) {
        for (size_t i = 0; i < w.size(); ++i) w[i] ^= o.w[i];
    }
    // this ^= (o & mask)
    void xor_masked(const Bits& o, const Bits& mask) {
        for (size_t i = 0; i < w.size(); ++i) w[i] ^= o.w[i] & mask.w[i];
    }
    void and_with(const Bits& o) {
        for (size_t i = 0; i < w.size(); ++i) w[i] &= o.w[i];
    }
    void or_with(const Bits& o) {
        for (size_t i = 0; i < w.size(); ++i) w[i] |= o.w[i];
    }

    bool parity_and(const Bits& mask) const {
        uint64_t acc = 0;
        for (size_t i = 0; i < w.size(); ++i) acc ^= w[i] & mask.w[i];
        return std::popcount(acc) & 1;
    }

    uint32_t popcount_and(const Bits& mask) const {
        uint32_t c = 0;
        for (size_t i = 0; i < w.size(); ++i)
            c += static_cast<uint32_t>(std::popcount(w[i] & mask.w[i]));
        return c;
    }

    bool operator==(const Bits& o) const { return n == o.n && w == o.w; }
};

inline Bits operator^(Bits a, const Bits& b) {
    a.xor_with(b);
    return a;
}
inline Bits operator&(Bits a, const Bits& b) {
    a.and_with(b);
    return a;
}
inline Bits operator|(Bits a, const Bits& b) {
    a.or_with(b);
    return a;
}

}  // namespace gsp
