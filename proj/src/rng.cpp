#include "ehdet/rng.hpp"

#include <cmath>

#include "ehdet/special.hpp"

namespace ehdet {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t mix_key(std::uint64_t seed, std::uint64_t trial, std::uint32_t sensor,
                      std::uint32_t purpose) {
    std::uint64_t s = seed;
    std::uint64_t h = splitmix64(s);
    s ^= trial + 0x9E3779B97F4A7C15ULL;
    h ^= splitmix64(s);
    s ^= (static_cast<std::uint64_t>(sensor) << 32) | purpose;
    h ^= splitmix64(s);
    return h;
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t trial, std::uint32_t sensor, Draw purpose)
    : state_(mix_key(seed, trial, sensor, static_cast<std::uint32_t>(purpose))) {}

std::uint64_t RngStream::next_u64() {
    return splitmix64(state_);
}

double RngStream::next_uniform() {
    // 53-bit mantissa, offset by half an ulp so 0 and 1 are excluded.
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::next_normal() {
    return -inv_q(next_uniform());
}

double RngStream::next_exponential(double mean) {
    return -mean * std::log(next_uniform());
}

}  // namespace ehdet
