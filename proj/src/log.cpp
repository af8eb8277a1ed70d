// SPDX-License-Identifier: Apache-2.0
#include "skybridge/log.hpp"

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <mutex>

#include "skybridge/clock.hpp"

namespace skybridge {

namespace {

std::atomic<int> g_level{static_cast<int>(LogLevel::kInfo)};
std::mutex g_write_mutex;

const char* level_name(LogLevel level) {
  switch (level) {
    case LogLevel::kError: return "error";
    case LogLevel::kWarn: return "warn ";
    case LogLevel::kInfo: return "info ";
    case LogLevel::kDebug: return "debug";
  }
  return "?";
}

}  // namespace

void set_log_level(LogLevel level) { g_level.store(static_cast<int>(level)); }

LogLevel log_level() { return static_cast<LogLevel>(g_level.load()); }

std::optional<LogLevel> parse_log_level(std::string_view name) {
  if (name == "error") return LogLevel::kError;
  if (name == "warn") return LogLevel::kWarn;
  if (name == "info") return LogLevel::kInfo;
  if (name == "debug") return LogLevel::kDebug;
  return std::nullopt;
}

void init_log_level_from_env(LogLevel fallback) {
  if (const char* env = std::getenv("SKYBRIDGE_LOG")) {
    if (auto parsed = parse_log_level(env)) {
      set_log_level(*parsed);
      return;
    }
    std::fprintf(stderr, "skybridge: ignoring unknown SKYBRIDGE_LOG value '%s'\n", env);
  }
  set_log_level(fallback);
}

void vlogf(LogLevel level, const char* tag, const char* fmt, va_list args) {
  if (static_cast<int>(level) > g_level.load()) return;
  char message[1024];
  std::vsnprintf(message, sizeof message, fmt, args);
  const uint64_t t = wall_now_us();
  std::lock_guard lock(g_write_mutex);
  std::fprintf(stderr, "[%10llu.%06llu] [%s] [%s] %s\n",
               static_cast<unsigned long long>(t / 1000000),
               static_cast<unsigned long long>(t % 1000000), level_name(level),
               tag, message);
}

#define SKYBRIDGE_LOG_IMPL(name, level)                    \
  void name(const char* tag, const char* fmt, ...) {       \
    va_list args;                                          \
    va_start(args, fmt);                                   \
    vlogf(level, tag, fmt, args);                          \
    va_end(args);                                          \
  }

SKYBRIDGE_LOG_IMPL(log_error, LogLevel::kError)
SKYBRIDGE_LOG_IMPL(log_warn, LogLevel::kWarn)
SKYBRIDGE_LOG_IMPL(log_info, LogLevel::kInfo)
SKYBRIDGE_LOG_IMPL(log_debug, LogLevel::kDebug)

#undef SKYBRIDGE_LOG_IMPL

}  // namespace skybridge
