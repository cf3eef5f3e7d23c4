#pragma once

#include <functional>
#include <string>

namespace litmeta::log {

enum class Level { error = 0, warn = 1, info = 2, debug = 3 };

/// Current threshold. Initialized from the LITMETA_LOG environment variable
/// (error|warn|info|debug); defaults to warn.
Level threshold();
void set_threshold(Level level);

/// Replace the output sink (default writes "[level] message" to stderr).
/// Tests use this to capture warnings. Pass nullptr to restore the default.
using Sink = std::function<void(Level, const std::string&)>;
void set_sink(Sink sink);

void emit(Level level, const std::string& msg);

inline void error(const std::string& msg) { emit(Level::error, msg); }
inline void warn(const std::string& msg) { emit(Level::warn, msg); }
inline void info(const std::string& msg) { emit(Level::info, msg); }
inline void debug(const std::string& msg) { emit(Level::debug, msg); }

}  // namespace litmeta::log
