#pragma once

#include <stdexcept>
#include <string>

namespace abv {

// Base class for everything this library throws on purpose.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad user input: malformed config, invalid parameter combinations.
struct config_error : error {
    using error::error;
};

// Numerical guard tripped: spectral content touching a conjugate-axis band edge,
// a branch cut through non-negligible amplitude, step-size rejection, norm drift.
// Guards are hard errors by design; nothing wraps around silently.
struct guard_error : error {
    using error::error;
};

}  // namespace abv
