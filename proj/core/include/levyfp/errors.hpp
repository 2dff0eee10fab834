#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace levyfp {

// Raised when a model/parameter combination falls outside the regime an
// operation is defined for (e.g. asking for the relative-tail kernel when
// the negative tail index boundary case makes it degenerate).
class unsupported_regime_error : public std::invalid_argument {
public:
    explicit unsupported_regime_error(const std::string& what)
        : std::invalid_argument(what) {}
};

// Raised when a Monte Carlo routine ends up with too few accepted samples
// to produce a usable estimate.  Carries the observed count so callers can
// report or resize.
class insufficient_samples_error : public std::runtime_error {
public:
    insufficient_samples_error(const std::string& what, std::size_t observed)
        : std::runtime_error(what + " (observed " + std::to_string(observed) + ")"),
          count(observed) {}

    std::size_t count;
};

// Raised on malformed configuration input (unknown key, bad value, missing
// required field).  The CLI maps this to exit code 2.
class config_error : public std::runtime_error {
public:
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace levyfp
