#include "lander/log.hpp"

#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace lander::log {

Level threshold() {
    static Level cached = [] {
        const char* env = std::getenv("LANDERSIM_LOG");
        if (!env) return kWarn;
        if (std::strcmp(env, "error") == 0) return kError;
        if (std::strcmp(env, "warn") == 0) return kWarn;
        if (std::strcmp(env, "info") == 0) return kInfo;
        if (std::strcmp(env, "debug") == 0) return kDebug;
        return kWarn;
    }();
    return cached;
}

bool enabled(Level lv) { return lv <= threshold(); }

void write(Level lv, const char* fmt, ...) {
    if (!enabled(lv)) return;
    static const char* tags[] = {"error", "warn", "info", "debug"};
    std::fprintf(stderr, "[%s] ", tags[lv]);
    std::va_list args;
    va_start(args, fmt);
    std::vfprintf(stderr, fmt, args);
    va_end(args);
    std::fputc('\n', stderr);
}

}  // namespace lander::log
