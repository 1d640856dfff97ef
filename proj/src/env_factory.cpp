#include "morl/env_factory.hpp"

#include "morl/dst.hpp"
#include "morl/minecart.hpp"

namespace morl {

std::unique_ptr<Env> make_env(const std::string& id) {
    if (id == "dst") return std::make_unique<DeepSeaTreasure>();
    if (id == "minecart") return std::make_unique<Minecart>(MinecartConfig::default_config(false));
    if (id == "minecart-deterministic")
        return std::make_unique<Minecart>(MinecartConfig::default_config(true));
    fail("unknown environment '" + id +
         "', expected one of dst, minecart, minecart-deterministic");
}

}  // namespace morl
