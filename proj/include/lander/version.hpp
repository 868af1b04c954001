#ifndef LANDER_VERSION_HPP
#define LANDER_VERSION_HPP

namespace lander {
inline constexpr const char* kToolVersion = "0.1.0";
}

#endif
