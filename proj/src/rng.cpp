#include "sscl/rng.hpp"

#include <cmath>

namespace sscl {

double gaussian(std::uint64_t stream, std::uint64_t counter, std::uint64_t slot) {
    // Two independent uniforms from adjacent slot words.
    const double u1 = uniform01(key_hash(stream, counter, 2 * slot));
    const double u2 = uniform01(key_hash(stream, counter, 2 * slot + 1));
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

}  // namespace sscl
