#pragma once

#include <string>

#include "glacia/config.hpp"

namespace fixture {

inline const glacia::Config& calibrated() {
    static const glacia::Config cfg =
        glacia::load_config(std::string(GLACIA_CONFIG_DIR) + "/paper-reduced.json");
    return cfg;
}

inline const glacia::Config& table1() {
    static const glacia::Config cfg =
        glacia::load_config(std::string(GLACIA_CONFIG_DIR) + "/table1.json");
    return cfg;
}

}  // namespace fixture
