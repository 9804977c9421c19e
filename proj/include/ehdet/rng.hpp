#ifndef EHDET_RNG_HPP
#define EHDET_RNG_HPP

#include <cstdint>

namespace ehdet {

// Draw purposes, one independent stream per (seed, trial, sensor, purpose).
// Streams are counter-keyed so trial order and worker count never change
// the numbers a given trial sees.
enum class Draw : std::uint32_t {
    hypothesis = 0,
    observation = 1,
    gain = 2,
    arrival = 3,
    noise = 4,
    battery_init = 5,
    deploy = 6,
};

class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t trial, std::uint32_t sensor, Draw purpose);

    std::uint64_t next_u64();

    // Uniform on the open interval (0,1).
    double next_uniform();

    // Standard normal via inverse CDF (one uniform per draw).
    double next_normal();

    // Exponential with the given mean.
    double next_exponential(double mean);

private:
    std::uint64_t state_;
};

}  // namespace ehdet

#endif
