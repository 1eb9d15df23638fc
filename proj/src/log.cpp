#include "rem/log.hpp"

#include <cstdlib>
#include <iostream>
#include <string>

namespace rem::log {

namespace {

Level parse_level() {
    const char* env = std::getenv("REM_LOG");
    if (env == nullptr) return Level::warn;
    const std::string v(env);
    if (v == "off" || v == "0" || v == "none") return Level::off;
    if (v == "error") return Level::error;
    if (v == "warn" || v == "warning") return Level::warn;
    if (v == "info") return Level::info;
    if (v == "debug") return Level::debug;
    return Level::warn;
}

}  // namespace

Level level() {
    static const Level lvl = parse_level();
    return lvl;
}

void warn(const std::string& code, const std::string& message) {
    if (level() >= Level::warn) {
        std::cerr << "[rem] " << code << ": " << message << "\n";
    }
}

void info(const std::string& message) {
    if (level() >= Level::info) {
        std::cerr << "[rem] info: " << message << "\n";
    }
}

void debug(const std::string& message) {
    if (level() >= Level::debug) {
        std::cerr << "[rem] debug: " << message << "\n";
    }
}

}  // namespace rem::log
