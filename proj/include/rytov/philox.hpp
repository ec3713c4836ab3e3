#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

#include "rytov/vec3.hpp"

namespace rytov {

/// Philox4x32-10 counter-based generator (Salmon et al., SC 2011). Blocks are
/// addressed by a 128-bit counter split into (block index, stream index), so
/// any draw can be produced independently of the others: ensembles stay
/// bit-identical no matter how realizations are scheduled across threads.
class Philox4x32 {
public:
    Philox4x32(std::uint64_t key, std::uint64_t stream)
        : key0_(static_cast<std::uint32_t>(key)),
          key1_(static_cast<std::uint32_t>(key >> 32)),
          stream_lo_(static_cast<std::uint32_t>(stream)),
          stream_hi_(static_cast<std::uint32_t>(stream >> 32)) {}

    std::array<std::uint32_t, 4> block(std::uint64_t counter) const {
        std::uint32_t c0 = static_cast<std::uint32_t>(counter);
        std::uint32_t c1 = static_cast<std::uint32_t>(counter >> 32);
        std::uint32_t c2 = stream_lo_;
        std::uint32_t c3 = stream_hi_;
        std::uint32_t k0 = key0_;
        std::uint32_t k1 = key1_;
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t m0 = static_cast<std::uint64_t>(kMulA) * c0;
            const std::uint64_t m1 = static_cast<std::uint64_t>(kMulB) * c2;
            const std::uint32_t lo0 = static_cast<std::uint32_t>(m0);
            const std::uint32_t hi0 = static_cast<std::uint32_t>(m0 >> 32);
            const std::uint32_t lo1 = static_cast<std::uint32_t>(m1);
            const std::uint32_t hi1 = static_cast<std::uint32_t>(m1 >> 32);
            c0 = hi1 ^ c1 ^ k0;
            c1 = lo1;
            c2 = hi0 ^ c3 ^ k1;
            c3 = lo0;
            k0 += kWeylA;
            k1 += kWeylB;
        }
        return {c0, c1, c2, c3};
    }

private:
    static constexpr std::uint32_t kMulA = 0xD2511F53u;
    static constexpr std::uint32_t kMulB = 0xCD9E8D57u;
    static constexpr std::uint32_t kWeylA = 0x9E3779B9u;
    static constexpr std::uint32_t kWeylB = 0xBB67AE85u;

    std::uint32_t key0_, key1_;
    std::uint32_t stream_lo_, stream_hi_;
};

/// Addressable stream of standard-normal 3-vectors: node i consumes Philox
/// blocks 2i and 2i+1 through a Box-Muller transform. Keyed by (seed, stream),
/// so (seed, realization index, node index) fully determines every draw.
class GaussianStream {
public:
    GaussianStream(std::uint64_t seed, std::uint64_t stream) : philox_(seed, stream) {}

    Vec3 normal3(std::uint64_t node) const {
        const auto b0 = philox_.block(2 * node);
        const auto b1 = philox_.block(2 * node + 1);
        const auto [z0, z1] = box_muller(join(b0[0], b0[1]), join(b0[2], b0[3]));
        const auto [z2, z3] = box_muller(join(b1[0], b1[1]), join(b1[2], b1[3]));
        (void)z3;
        return {z0, z1, z2};
    }

private:
    static std::uint64_t join(std::uint32_t lo, std::uint32_t hi) {
        return static_cast<std::uint64_t>(hi) << 32 | lo;
    }

    // u1 in (0, 1] so the log never sees zero; u2 in [0, 1).
    static std::pair<double, double> box_muller(std::uint64_t a, std::uint64_t b) {
        const double u1 = static_cast<double>((a >> 11) + 1) * 0x1.0p-53;
        const double u2 = static_cast<double>(b >> 11) * 0x1.0p-53;
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        return {radius * std::cos(angle), radius * std::sin(angle)};
    }

    Philox4x32 philox_;
};

}  // namespace rytov
