#include "litmeta/log.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <mutex>

namespace litmeta::log {

namespace {

Level g_threshold = [] {
  const char* env = std::getenv("LITMETA_LOG");
  if (!env) return Level::warn;
  if (std::strcmp(env, "error") == 0) return Level::error;
  if (std::strcmp(env, "warn") == 0) return Level::warn;
  if (std::strcmp(env, "info") == 0) return Level::info;
  if (std::strcmp(env, "debug") == 0) return Level::debug;
  return Level::warn;
}();

Sink g_sink;
std::mutex g_mutex;

const char* name(Level level) {
  switch (level) {
    case Level::error: return "error";
    case Level::warn: return "warn";
    case Level::info: return "info";
    case Level::debug: return "debug";
  }
  return "?";
}

}  // namespace

Level threshold() { return g_threshold; }
void set_threshold(Level level) { g_threshold = level; }
void set_sink(Sink sink) { g_sink = std::move(sink); }

void emit(Level level, const std::string& msg) {
  if (static_cast<int>(level) > static_cast<int>(g_threshold)) return;
  std::lock_guard<std::mutex> lock(g_mutex);
  if (g_sink) {
    g_sink(level, msg);
  } else {
    std::fprintf(stderr, "[%s] %s\n", name(level), msg.c_str());
  }
}

}  // namespace litmeta::log
