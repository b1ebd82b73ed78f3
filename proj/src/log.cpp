#include "kronopt/log.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <mutex>

namespace kronopt {
namespace {

LogLevel g_level = []() {
  const char* env = std::getenv("KRONOPT_LOG");
  if (!env) return LogLevel::Warn;
  if (std::strcmp(env, "quiet") == 0) return LogLevel::Quiet;
  if (std::strcmp(env, "info") == 0) return LogLevel::Info;
  if (std::strcmp(env, "debug") == 0) return LogLevel::Debug;
  return LogLevel::Warn;
}();

std::mutex g_mutex;

void vlog(const char* tag, const char* fmt, va_list args) {
  std::lock_guard<std::mutex> lock(g_mutex);
  std::fprintf(stderr, "[%s] ", tag);
  std::vfprintf(stderr, fmt, args);
  std::fputc('\n', stderr);
}

}  // namespace

LogLevel log_level() { return g_level; }
void set_log_level(LogLevel level) { g_level = level; }

void log_warn(const char* fmt, ...) {
  if (g_level < LogLevel::Warn) return;
  va_list args;
  va_start(args, fmt);
  vlog("warn", fmt, args);
  va_end(args);
}

void log_info(const char* fmt, ...) {
  if (g_level < LogLevel::Info) return;
  va_list args;
  va_start(args, fmt);
  vlog("info", fmt, args);
  va_end(args);
}

void log_debug(const char* fmt, ...) {
  if (g_level < LogLevel::Debug) return;
  va_list args;
  va_start(args, fmt);
  vlog("debug", fmt, args);
  va_end(args);
}

}  // namespace kronopt
