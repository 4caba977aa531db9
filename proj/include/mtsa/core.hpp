#ifndef MTSA_CORE_HPP
#define MTSA_CORE_HPP

#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace mtsa {

// Geometric coincidence tolerance (meters). Far below any mesh size in use.
inline constexpr double kGeomTol = 1e-12;

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double a) const { return {x * a, y * a}; }
    double dot(const Vec2& o) const { return x * o.x + y * o.y; }
    double norm() const { return std::hypot(x, y); }
};

class Error : public std::runtime_error {
  public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

namespace log {

enum class Level { error = 0, warn = 1, info = 2, debug = 3 };

inline Level threshold() {
    static Level lvl = [] {
        const char* env = std::getenv("SOLVER_LOG");
        if (!env) return Level::warn;
        std::string s(env);
        if (s == "error") return Level::error;
        if (s == "warn") return Level::warn;
        if (s == "info") return Level::info;
        if (s == "debug") return Level::debug;
        return Level::warn;
    }();
    return lvl;
}

inline void emit(Level lvl, const char* tag, const char* fmt, va_list ap) {
    if (lvl > threshold()) return;
    std::fprintf(stderr, "[%s] ", tag);
    std::vfprintf(stderr, fmt, ap);
    std::fputc('\n', stderr);
}

#define MTSA_LOG_FN(name, level, tag)                       \
    inline void name(const char* fmt, ...) {                \
        va_list ap;                                         \
        va_start(ap, fmt);                                  \
        emit(level, tag, fmt, ap);                          \
        va_end(ap);                                         \
    }

MTSA_LOG_FN(error, Level::error, "error")
MTSA_LOG_FN(warn, Level::warn, "warn")
MTSA_LOG_FN(info, Level::info, "info")
MTSA_LOG_FN(debug, Level::debug, "debug")

#undef MTSA_LOG_FN

}  // namespace log

}  // namespace mtsa

#endif
