#ifndef SSCL_VERSION_HPP
#define SSCL_VERSION_HPP

namespace sscl {
inline constexpr const char* kVersion = "0.1.0";
}

#endif
