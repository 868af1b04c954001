#ifndef LANDER_LOG_HPP
#define LANDER_LOG_HPP

namespace lander::log {

enum Level { kError = 0, kWarn = 1, kInfo = 2, kDebug = 3 };

// Threshold comes from LANDERSIM_LOG (error|warn|info|debug), default warn.
Level threshold();

bool enabled(Level lv);

// printf-style, written to stderr with a level tag.
void write(Level lv, const char* fmt, ...);

}  // namespace lander::log

#endif
