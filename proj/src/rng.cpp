#include "cri/rng.hpp"

#include <cmath>
#include <numbers>

namespace cri {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t mix64(std::uint64_t x) noexcept {
    // splitmix64 finalizer
    x ^= x >> 30;
    x *= 0xBF58476D1CE4E5B9ULL;
    x ^= x >> 27;
    x *= 0x94D049BB133111EBULL;
    x ^= x >> 31;
    return x;
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t index)
    : seed_(seed), index_(index), key_(mix64(mix64(seed + kGolden) ^ mix64(index * kGolden + 0x632BE59BD9B4E019ULL))) {}

std::uint64_t RngStream::next_u64() noexcept {
    ++counter_;
    return mix64(key_ + counter_ * kGolden);
}

double RngStream::uniform() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::uniform_pos() noexcept {
    return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
}

double RngStream::normal() noexcept {
    if (has_cached_) {
        has_cached_ = false;
        return cached_normal_;
    }
    const double radius = std::sqrt(-2.0 * std::log(uniform_pos()));
    const double angle = 2.0 * std::numbers::pi * uniform();
    cached_normal_ = radius * std::sin(angle);
    has_cached_ = true;
    return radius * std::cos(angle);
}

std::uint64_t RngStream::below(std::uint64_t bound) noexcept {
    // Lemire's multiply-shift with rejection.
    std::uint64_t x = next_u64();
    auto wide = static_cast<unsigned __int128>(x) * bound;
    auto low = static_cast<std::uint64_t>(wide);
    if (low < bound) {
        const std::uint64_t threshold = (0 - bound) % bound;
        while (low < threshold) {
            x = next_u64();
            wide = static_cast<unsigned __int128>(x) * bound;
            low = static_cast<std::uint64_t>(wide);
        }
    }
    return static_cast<std::uint64_t>(wide >> 64);
}

RngStream RngStream::fork(std::uint64_t tag) const noexcept {
    return RngStream(key_ ^ mix64(counter_ + 1), tag);
}

}  // namespace cri
