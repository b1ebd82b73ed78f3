#pragma once

#include <cstdarg>

namespace kronopt {

enum class LogLevel : int { Quiet = 0, Warn = 1, Info = 2, Debug = 3 };

// Level comes from the KRONOPT_LOG environment variable
// (quiet|warn|info|debug), default warn.
LogLevel log_level();
void set_log_level(LogLevel level);

void log_warn(const char* fmt, ...);
void log_info(const char* fmt, ...);
void log_debug(const char* fmt, ...);

}  // namespace kronopt
