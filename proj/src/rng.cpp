#include "tstlab/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace tstlab {
namespace detail {

namespace {

constexpr std::uint64_t kPhiloxM0 = 0xD2E7470EE14C6C93ull;
constexpr std::uint64_t kPhiloxM1 = 0xCA5A826395121157ull;
constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ull;
constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73Bull;

inline void mulhilo(std::uint64_t a, std::uint64_t b, std::uint64_t& hi, std::uint64_t& lo) {
    const unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
    hi = static_cast<std::uint64_t>(p >> 64);
    lo = static_cast<std::uint64_t>(p);
}

inline std::array<std::uint64_t, 4> round_once(std::array<std::uint64_t, 4> c, PhiloxKey k) {
    std::uint64_t hi0, lo0, hi1, lo1;
    mulhilo(kPhiloxM0, c[0], hi0, lo0);
    mulhilo(kPhiloxM1, c[2], hi1, lo1);
    return {hi1 ^ c[1] ^ k.k0, lo1, hi0 ^ c[3] ^ k.k1, lo0};
}

// SplitMix64 finalizer; whitens the (trial, role) words before they
// enter the Philox key so structured inputs do not produce structured keys.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

}  // namespace

std::array<std::uint64_t, 4> philox4x64(PhiloxKey key, std::uint64_t counter) {
    std::array<std::uint64_t, 4> c{counter, 0, 0, 0};
    c = round_once(c, key);
    for (int r = 1; r < 10; ++r) {
        key.k0 += kWeyl0;
        key.k1 += kWeyl1;
        c = round_once(c, key);
    }
    return c;
}

}  // namespace detail

// Rational approximations from Wichura's PPND16 algorithm (AS 241).
double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("normal_quantile: p must be in (0,1)");

    const double q = p - 0.5;
    if (std::fabs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        const double num =
            q * (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r + 6.7265770927008700853e4) * r +
                      4.5921953931549871457e4) * r + 1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
                  1.3314166789178437745e2) * r + 3.3871328727963666080e0);
        const double den =
            (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r + 3.9307895800092710610e4) * r +
                 2.1213794301586595867e4) * r + 5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
              4.2313330701600911252e1) * r + 1.0);
        return num / den;
    }

    double r = (q < 0.0) ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double value;
    if (r <= 5.0) {
        r -= 1.6;
        const double num =
            (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r + 2.41780725177450611770e-1) * r +
                 1.27045825245236838258e0) * r + 3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
              4.63033784615654529590e0) * r + 1.42343711074968357734e0);
        const double den =
            (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r + 1.51986665636164571966e-2) * r +
                 1.48103976427480074590e-1) * r + 6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
              2.05319162663775882187e0) * r + 1.0);
        value = num / den;
    } else {
        r -= 5.0;
        const double num =
            (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r + 1.24266094738807843860e-3) * r +
                 2.65321895265761230930e-2) * r + 2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
              5.46378491116411436990e0) * r + 6.65790464350110377720e0);
        const double den =
            (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r + 1.84631831751005468180e-5) * r +
                 7.86869131145613259100e-4) * r + 1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
              5.99832206555887937690e-1) * r + 1.0);
        value = num / den;
    }
    return (q < 0.0) ? -value : value;
}

std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index) {
    return detail::philox4x64({master_seed, 0x7473746C61623A31ull}, index)[0];
}

NoiseStream::NoiseStream(std::uint64_t master_seed, std::uint64_t trial_index, StreamRole role) {
    const std::uint64_t salt = detail::mix64(trial_index * 4ull + static_cast<std::uint64_t>(role));
    key_.k0 = master_seed;
    key_.k1 = salt;
}

std::uint64_t NoiseStream::next_u64() {
    if (block_pos_ == 4) {
        block_ = detail::philox4x64(key_, counter_++);
        block_pos_ = 0;
    }
    return block_[block_pos_++];
}

double NoiseStream::next_uniform() {
    // 53 random bits centered in each cell: strictly inside (0,1).
    constexpr double kScale = 0x1.0p-53;
    return (static_cast<double>(next_u64() >> 11) + 0.5) * kScale;
}

double NoiseStream::next_normal() {
    return normal_quantile(next_uniform());
}

}  // namespace tstlab
