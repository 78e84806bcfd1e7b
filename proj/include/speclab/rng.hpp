#pragma once

#include <cstdint>
#include <stdexcept>

namespace speclab {

inline uint64_t splitmix64(uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Counter-based generator: the n-th draw of stream (seed, index) is a pure
/// function of (seed, index, n), so samples can be produced in any order.
class SplitRng
{
  public:
    SplitRng(uint64_t seed, uint64_t index) : key_(splitmix64(splitmix64(seed) ^ (index * 0xd1342543de82ef95ULL))) {}

    uint64_t next() { return splitmix64(key_ ^ splitmix64(counter_++)); }

    /// Uniform in [0, n).
    uint64_t below(uint64_t n)
    {
        if (n == 0)
            throw std::invalid_argument("empty range");
        uint64_t lim = UINT64_MAX - UINT64_MAX % n;
        while (true) {
            uint64_t x = next();
            if (x < lim)
                return x % n;
        }
    }

    /// Uniform in [lo, hi].
    int64_t uniform(int64_t lo, int64_t hi)
    {
        if (hi < lo)
            throw std::invalid_argument("empty range");
        return lo + int64_t(below(uint64_t(hi - lo) + 1));
    }

    double unit() { return double(next() >> 11) * 0x1.0p-53; }

  private:
    uint64_t key_;
    uint64_t counter_ = 0;
};

} // namespace speclab
