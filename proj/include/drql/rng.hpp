#ifndef DRQL_RNG_HPP
#define DRQL_RNG_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>

namespace drql {

/// Seeded random stream. Identical (seed, stream id) pairs reproduce the
/// same sequence bit for bit; distinct stream ids give statistically
/// independent sequences (the pair is mixed through std::seed_seq).
///
/// Satisfies UniformRandomBitGenerator, so it can drive the standard
/// distributions directly. Single owner: never share one between threads.
class RngStream {
public:
    using result_type = std::uint64_t;

    RngStream(std::uint64_t seed, std::uint64_t stream_id)
        : seed_(seed), stream_id_(stream_id) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(stream_id), static_cast<std::uint32_t>(stream_id >> 32),
                          0x9e3779b9u};
        engine_.seed(seq);
    }

    static constexpr result_type min() { return std::mt19937_64::min(); }
    static constexpr result_type max() { return std::mt19937_64::max(); }

    result_type operator()() { return engine_(); }

    /// Uniform double in [0, 1).
    double uniform() {
        const double u = std::generate_canonical<double, std::numeric_limits<double>::digits>(engine_);
        // older libstdc++ can round up to exactly 1
        return u < 1.0 ? u : std::nextafter(1.0, 0.0);
    }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_id_; }

private:
    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::mt19937_64 engine_;
};

}  // namespace drql

#endif  // DRQL_RNG_HPP
