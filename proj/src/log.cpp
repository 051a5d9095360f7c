#include "grim/log.hpp"

#include <atomic>
#include <cstdlib>
#include <iostream>
#include <mutex>
#include <string>

namespace grim::log {
namespace {

Level parse_env() {
  const char* raw = std::getenv("GRIM_LOG");
  if (raw == nullptr) return Level::warn;
  const std::string v(raw);
  if (v == "debug") return Level::debug;
  if (v == "info") return Level::info;
  if (v == "warn") return Level::warn;
  if (v == "error") return Level::error;
  if (v == "off") return Level::off;
  return Level::warn;
}

std::atomic<int>& current() {
  static std::atomic<int> level{static_cast<int>(parse_env())};
  return level;
}

constexpr std::string_view tag(Level level) {
  switch (level) {
    case Level::debug: return "debug";
    case Level::info: return "info";
    case Level::warn: return "warn";
    case Level::error: return "error";
    default: return "";
  }
}

}  // namespace

Level threshold() { return static_cast<Level>(current().load()); }

void set_threshold(Level level) { current().store(static_cast<int>(level)); }

void write(Level level, std::string_view message) {
  if (static_cast<int>(level) < current().load() || level == Level::off) return;
  static std::mutex mu;
  std::lock_guard lock(mu);
  std::cerr << "[grim " << tag(level) << "] " << message << '\n';
}

}  // namespace grim::log
