#pragma once

// Counter-based random numbers (Philox4x32-10, Salmon et al. SC'11).
// Every draw is a pure function of (key, counter), so Monte Carlo work can be
// split across samples, edges and workers without coordinating streams.

#include <array>
#include <cstdint>
#include <limits>

namespace phasecert
{

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

namespace detail
{
inline constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
inline constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
inline constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
inline constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

constexpr PhiloxCounter philox_round(const PhiloxCounter& c, const PhiloxKey& k)
{
    const std::uint64_t p0 = std::uint64_t{kPhiloxM0} * c[0];
    const std::uint64_t p1 = std::uint64_t{kPhiloxM1} * c[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}
} // namespace detail

constexpr PhiloxCounter philox4x32(PhiloxCounter ctr, PhiloxKey key)
{
    for (int round = 0; round < 10; ++round)
    {
        ctr = detail::philox_round(ctr, key);
        key[0] += detail::kPhiloxW0;
        key[1] += detail::kPhiloxW1;
    }
    return ctr;
}

/// Top 53 bits of a 64-bit word mapped onto [0, 1).
constexpr double unit_interval(std::uint64_t bits)
{
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

constexpr PhiloxKey philox_key(std::uint64_t seed)
{
    return {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
}

/// Stateless generator: uniform(stream, index) is a fixed function of the seed.
class CounterRng
{
  public:
    explicit constexpr CounterRng(std::uint64_t seed) : key_(philox_key(seed)), seed_(seed) {}

    constexpr std::uint64_t bits(std::uint64_t stream, std::uint64_t index) const
    {
        const PhiloxCounter out = philox4x32(
            {static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
             static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)},
            key_);
        return (std::uint64_t{out[1]} << 32) | out[0];
    }

    constexpr double uniform(std::uint64_t stream, std::uint64_t index) const
    {
        return unit_interval(bits(stream, index));
    }

    constexpr std::uint64_t seed() const { return seed_; }

  private:
    PhiloxKey key_;
    std::uint64_t seed_;
};

/// Sequential engine over one Philox stream; satisfies UniformRandomBitGenerator.
class PhiloxEngine
{
  public:
    using result_type = std::uint64_t;

    PhiloxEngine(std::uint64_t seed, std::uint64_t stream) : key_(philox_key(seed)), stream_(stream) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()()
    {
        if (have_ == 0)
        {
            block_ = philox4x32({static_cast<std::uint32_t>(counter_),
                                 static_cast<std::uint32_t>(counter_ >> 32),
                                 static_cast<std::uint32_t>(stream_),
                                 static_cast<std::uint32_t>(stream_ >> 32)},
                                key_);
            ++counter_;
            have_ = 2;
        }
        --have_;
        const int base = have_ == 1 ? 0 : 2;
        return (std::uint64_t{block_[base + 1]} << 32) | block_[base];
    }

    double uniform() { return unit_interval((*this)()); }

    /// Uniform integer in [0, n) by rejection on the top bits.
    std::uint64_t below(std::uint64_t n)
    {
        const std::uint64_t limit = max() - max() % n;
        std::uint64_t r;
        do
        {
            r = (*this)();
        } while (r >= limit);
        return r % n;
    }

  private:
    PhiloxKey key_;
    std::uint64_t stream_;
    std::uint64_t counter_ = 0;
    PhiloxCounter block_{};
    int have_ = 0;
};

} // namespace phasecert
