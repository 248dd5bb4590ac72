#pragma once

#include <array>
#include <cstdint>

namespace tstlab {

// Substream roles within one trial. V and W drive the hidden and the
// observation noise; Bridge feeds the within-step crossing refinement in
// brownian mode so that consuming bridge uniforms never shifts the
// Gaussian sequences.
enum class StreamRole : std::uint64_t { V = 0, W = 1, Bridge = 2 };

namespace detail {

struct PhiloxKey {
    std::uint64_t k0, k1;
};

// Philox4x64-10 keyed counter block cipher. Pure function of
// (key, counter); the key packs (master_seed, trial_index, role) so any
// (seed, trial, role) triple addresses a statistically independent
// stream without coordination between workers.
std::array<std::uint64_t, 4> philox4x64(PhiloxKey key, std::uint64_t counter);

}  // namespace detail

// Phi^{-1}(p) for p in (0,1) by a rational approximation accurate to
// ~1e-15 absolute. A deterministic O(1) transform: no rejection loop,
// so the variate count per trial is a fixed function of the path.
double normal_quantile(double p);

// Derives an independent child seed from (master_seed, index); used for
// sweep rows so appending rows never perturbs earlier ones.
std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index);

// One substream of i.i.d. draws, addressed by (master_seed, trial_index,
// role). Identical inputs reproduce the identical sequence bit-exactly
// regardless of worker count or call interleaving with other streams.
class NoiseStream {
public:
    NoiseStream(std::uint64_t master_seed, std::uint64_t trial_index, StreamRole role);

    std::uint64_t next_u64();

    // Uniform on the open interval (0,1).
    double next_uniform();

    // Standard normal via the inverse-CDF transform of next_uniform().
    double next_normal();

private:
    detail::PhiloxKey key_;
    std::uint64_t counter_ = 0;
    std::array<std::uint64_t, 4> block_{};
    int block_pos_ = 4;  // empty
};

}  // namespace tstlab
