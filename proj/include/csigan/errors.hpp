#pragma once

#include <stdexcept>
#include <string>

namespace csigan {

// Precondition / configuration violations. Callers that reach the CLI map
// these to exit code 1 (usage/config) vs. 2 (runtime).
inline void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

inline void ensure(bool cond, const std::string& msg) {
    if (!cond) throw std::runtime_error(msg);
}

}  // namespace csigan
