#pragma once

#include <string_view>

namespace grim::log {

enum class Level { debug = 0, info = 1, warn = 2, error = 3, off = 4 };

// Threshold is read once from GRIM_LOG (debug|info|warn|error|off), default warn.
Level threshold();
void set_threshold(Level level);

void write(Level level, std::string_view message);

inline void debug(std::string_view m) { write(Level::debug, m); }
inline void info(std::string_view m) { write(Level::info, m); }
inline void warn(std::string_view m) { write(Level::warn, m); }

}  // namespace grim::log
