#ifndef SSCL_RNG_HPP
#define SSCL_RNG_HPP

#include <cstdint>

namespace sscl {

// Counter-based random streams. Every draw is a pure function of a 64-bit
// key tuple, so paths can be generated in any order, on any thread, and
// merged without shared state.

// SplitMix64 finalizer: a bijection on 64-bit integers with full avalanche.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// Folds a (stream, counter, slot) key into one word. Each argument passes
// through mix64 before being combined, so neighboring keys land far apart.
constexpr std::uint64_t key_hash(std::uint64_t stream, std::uint64_t counter,
                                 std::uint64_t slot) {
    std::uint64_t h = mix64(stream);
    h = mix64(h ^ mix64(counter + 0x632BE59BD9B4E019ull));
    h = mix64(h ^ mix64(slot + 0x9E6C63D0876A9A47ull));
    return h;
}

// Uniform double in (0,1): top 53 bits of h, offset by half an ulp so the
// endpoints are never hit.
constexpr double uniform01(std::uint64_t h) {
    return (static_cast<double>(h >> 11) + 0.5) * 0x1.0p-53;
}

// Standard normal draw for a key tuple (Box-Muller, cosine branch).
double gaussian(std::uint64_t stream, std::uint64_t counter, std::uint64_t slot);

// Derivation of per-path seeds from the master seed; documented so that
// manifests can be checked externally: seed_i = mix64(master ^ mix64(i+1)).
constexpr std::uint64_t derive_path_seed(std::uint64_t master_seed, std::uint64_t index) {
    return mix64(master_seed ^ mix64(index + 1));
}

}  // namespace sscl

#endif
