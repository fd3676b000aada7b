#pragma once

// Philox4x64-10 counter-based generator (Salmon et al., SC'11).
// Every (seed, stream) pair is an independent sequence, so a Monte Carlo
// path can be regenerated from its index without replaying earlier paths.

#include <array>
#include <cstdint>
#include <limits>

namespace fbgraph {

class Philox4x64 {
  public:
    using result_type = std::uint64_t;
    using counter_type = std::array<std::uint64_t, 4>;
    using key_type = std::array<std::uint64_t, 2>;

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    // Raw bijection: 10 rounds applied to a counter block under a key.
    static counter_type block(counter_type ctr, key_type key) {
        for (int r = 0; r < 10; ++r) {
            if (r > 0) {
                key[0] += kW0;
                key[1] += kW1;
            }
            ctr = round(ctr, key);
        }
        return ctr;
    }

    Philox4x64() : Philox4x64(0, 0) {}

    // key = seed, counter words 2..3 carry the stream id.
    Philox4x64(std::uint64_t seed, std::uint64_t stream) {
        key_ = {seed, 0x5851F42D4C957F2DULL};
        ctr_ = {0, 0, stream, 0};
    }

    result_type operator()() {
        if (pos_ == 4) {
            buf_ = block(ctr_, key_);
            if (++ctr_[0] == 0) ++ctr_[1];
            pos_ = 0;
        }
        return buf_[pos_++];
    }

    void discard(unsigned long long n) {
        while (n--) (*this)();
    }

    // Uniform double in (0,1), never exactly 0 or 1.
    double uniform01() { return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53; }

  private:
    static constexpr std::uint64_t kM0 = 0xD2E7470EE14C6C93ULL;
    static constexpr std::uint64_t kM1 = 0xCA5A826395121157ULL;
    static constexpr std::uint64_t kW0 = 0x9E3779B97F4A7C15ULL;
    static constexpr std::uint64_t kW1 = 0xBB67AE8584CAA73BULL;

    static void mulhilo(std::uint64_t a, std::uint64_t b, std::uint64_t& hi, std::uint64_t& lo) {
        const unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
        hi = static_cast<std::uint64_t>(p >> 64);
        lo = static_cast<std::uint64_t>(p);
    }

    static counter_type round(const counter_type& c, const key_type& k) {
        std::uint64_t hi0, lo0, hi1, lo1;
        mulhilo(kM0, c[0], hi0, lo0);
        mulhilo(kM1, c[2], hi1, lo1);
        return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    }

    key_type key_{};
    counter_type ctr_{};
    counter_type buf_{};
    int pos_ = 4;
};

} // namespace fbgraph
