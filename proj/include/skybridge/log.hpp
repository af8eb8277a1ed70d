// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdarg>
#include <optional>
#include <string_view>

namespace skybridge {

enum class LogLevel : int { kError = 0, kWarn = 1, kInfo = 2, kDebug = 3 };

void set_log_level(LogLevel level);
LogLevel log_level();
std::optional<LogLevel> parse_log_level(std::string_view name);

// Applies SKYBRIDGE_LOG if set, otherwise the given fallback.
void init_log_level_from_env(LogLevel fallback);

void vlogf(LogLevel level, const char* tag, const char* fmt, va_list args);

__attribute__((format(printf, 2, 3))) void log_error(const char* tag, const char* fmt, ...);
__attribute__((format(printf, 2, 3))) void log_warn(const char* tag, const char* fmt, ...);
__attribute__((format(printf, 2, 3))) void log_info(const char* tag, const char* fmt, ...);
__attribute__((format(printf, 2, 3))) void log_debug(const char* tag, const char* fmt, ...);

}  // namespace skybridge
