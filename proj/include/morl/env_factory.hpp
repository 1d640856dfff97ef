#pragma once

#include <memory>
#include <string>

#include "morl/env.hpp"

namespace morl {

// ids: dst, minecart, minecart-deterministic
std::unique_ptr<Env> make_env(const std::string& id);

}  // namespace morl
