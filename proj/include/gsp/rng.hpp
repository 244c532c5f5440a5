#pragma once

#include <array>
#include <cstdint>

namespace gsp {

// Philox4x32-10 counter-based generator. Each (seed, stream) pair is an
// independent stream; jumping to any position is O(1), so worker batches
// can be assigned fixed streams and results do not depend on scheduling.
class RngStream {
  public:
    RngStream() : RngStream(0, 0) {}

    RngStream(uint64_t seed, uint64_t stream) {
        key_[0] = static_cast<uint32_t>(seed);
        key_[1] = static_cast<uint32_t>(seed >> 32);
        ctr_[0] = 0;
        ctr_[1] = 0;
        ctr_[2] = static_cast<uint32_t>(stream);
        ctr_[3] = static_cast<uint32_t>(stream >> 32);
    }

    uint32_t next_u32() {
        if (buf_pos_ == 4) refill();
        return buf_[buf_pos_++];
    }

    uint64_t next_u64() {
        uint64_t lo = next_u32();
        uint64_t hi = next_u32();
        return lo | (hi << 32);
    }

    // Uniform in [0, 1) with 53-bit resolution.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) {
        if (p <= 0.0) return false;
        if (p >= 1.0) return true;
        return uniform() < p;
    }

    // Uniform integer in [0, n). Rejection-free modulo is fine here: n is
    // tiny (<= 16 or a vertex count) so the bias is far below statistical
    // resolution, but use the widening trick anyway since it is free.
    uint32_t uniform_u32(uint32_t n) {
        return static_cast<uint32_t>((static_cast<uint64_t>(next_u32()) * n) >> 32);
    }

    template <typename T>
    void shuffle(T* data, size_t n) {
        for (size_t i = n; i > 1; --i) {
            size_t j = uniform_u32(static_cast<uint32_t>(i));
            std::swap(data[i - 1], data[j]);
        }
    }

  private:
    static constexpr uint32_t kM0 = 0xD2511F53u;
    static constexpr uint32_t kM1 = 0xCD9E8D57u;
    static constexpr uint32_t kW0 = 0x9E3779B9u;
    static constexpr uint32_t kW1 = 0xBB67AE85u;

    static void round(std::array<uint32_t, 4>& x, uint32_t k0, uint32_t k1) {
        uint64_t p0 = static_cast<uint64_t>(kM0) * x[0];
        uint64_t p1 = static_cast<uint64_t>(kM1) * x[2];
        uint32_t hi0 = static_cast<uint32_t>(p0 >> 32), lo0 = static_cast<uint32_t>(p0);
        uint32_t hi1 = static_cast<uint32_t>(p1 >> 32), lo1 = static_cast<uint32_t>(p1);
        x = {hi1 ^ x[1] ^ k0, lo1, hi0 ^ x[3] ^ k1, lo0};
    }

    void refill() {
        std::array<uint32_t, 4> x = ctr_;
        uint32_t k0 = key_[0], k1 = key_[1];
        for (int r = 0; r < 10; ++r) {
            round(x, k0, k1);
            k0 += kW0;
            k1 += kW1;
        }
        buf_ = x;
        buf_pos_ = 0;
        if (++ctr_[0] == 0) ++ctr_[1];
    }

    std::array<uint32_t, 2> key_{};
    std::array<uint32_t, 4> ctr_{};
    std::array<uint32_t, 4> buf_{};
    int buf_pos_ = 4;
};

}  // namespace gsp
