#ifndef LANDER_CONSTANTS_HPP
#define LANDER_CONSTANTS_HPP

namespace lander {

inline constexpr double kGravConstant = 6.674e-11;   // m^3/(kg s^2)
inline constexpr double kStandardGravity = 9.80665;  // m/s^2, for Isp conversions

}  // namespace lander

#endif
