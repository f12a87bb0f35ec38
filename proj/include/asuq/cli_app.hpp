#pragma once

#include <stdexcept>
#include <string>

namespace asuq {

// Configuration mistakes (unknown keys, missing or ill-typed fields) exit
// with code 2; runtime failures exit with 1.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

int run_cli(int argc, const char* const* argv);

}  // namespace asuq
