#pragma once

#include <cstddef>
#include <cstdint>

namespace cri {

// Counter-based random stream keyed by (master seed, stream index).
//
// Every draw is a pure function of (seed, index, counter), computed with
// integer arithmetic only, so a given stream yields the same bits on every
// platform and no generator state is shared between streams.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t index);

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t index() const noexcept { return index_; }
    std::uint64_t key() const noexcept { return key_; }

    std::uint64_t next_u64() noexcept;

    // Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept;
    // Uniform on (0, 1].
    double uniform_pos() noexcept;
    // Standard normal via Box-Muller; the second variate of each pair is cached.
    double normal() noexcept;
    // Uniform integer in [0, bound), bound > 0, without modulo bias.
    std::uint64_t below(std::uint64_t bound) noexcept;

    // Child stream for nested experiments; deterministic in (this stream, tag).
    RngStream fork(std::uint64_t tag) const noexcept;

private:
    std::uint64_t seed_;
    std::uint64_t index_;
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    double cached_normal_ = 0.0;
    bool has_cached_ = false;
};

std::uint64_t mix64(std::uint64_t x) noexcept;

}  // namespace cri
