#pragma once

#include <string_view>

namespace semrsm::log {

enum class Level { debug, info, warning, error, off };

/// Messages below this level are dropped. Defaults to warning.
void set_level(Level level);
Level level();

void write(Level level, std::string_view message);

inline void warn(std::string_view message) { write(Level::warning, message); }
inline void info(std::string_view message) { write(Level::info, message); }

}  // namespace semrsm::log
