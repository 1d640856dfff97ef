#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace morl {

// Error type for all structured failures (shape mismatches, bad configs,
// malformed files). Messages are meant to be actionable as-is.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

[[noreturn]] inline void fail(const std::string& msg) { throw Error(msg); }

inline void require(bool cond, const std::string& msg) {
    if (!cond) fail(msg);
}

std::string shape_str(std::span<const int> shape);

}  // namespace morl
