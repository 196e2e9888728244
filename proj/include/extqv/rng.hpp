#pragma once

#include <array>
#include <cstdint>

namespace extqv {

/// Philox4x32-10 block function (Salmon et al., SC'11).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

std::uint64_t splitmix64(std::uint64_t x);

/// Counter-based stream of standard normal draws.
///
/// Draw k of stream (master_seed, stream_index) is a pure function of the
/// triple, so the order in which streams are consumed by worker threads
/// cannot change any value. The key is derived from the master seed, the
/// 128-bit counter is (stream_index, block index).
class RngStream {
public:
    RngStream(std::uint64_t master_seed, std::uint64_t stream_index);

    double normal();
    /// Uniform on [0, 1).
    double uniform();

    std::uint64_t master_seed() const noexcept { return master_seed_; }
    std::uint64_t stream_index() const noexcept { return stream_index_; }

private:
    std::array<std::uint32_t, 4> next_block();

    std::uint64_t master_seed_;
    std::uint64_t stream_index_;
    std::array<std::uint32_t, 2> key_;
    std::uint64_t block_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

inline RngStream make_rng(std::uint64_t master_seed, std::uint64_t stream_index) {
    return RngStream(master_seed, stream_index);
}

}  // namespace extqv
