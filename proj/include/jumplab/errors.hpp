#pragma once

#include <stdexcept>
#include <string>

namespace jumplab {

/// Bad inputs: missing files, malformed records, parameters out of range.
/// CLI maps this to exit code 1.
struct input_error : std::runtime_error {
    explicit input_error(const std::string& what) : std::runtime_error(what) {}
};

/// Analysis refusal: inputs were readable but the estimator declines to
/// produce a number (insufficient tail, no events, missing artifacts).
/// CLI maps this to exit code 2.
struct refusal : std::runtime_error {
    explicit refusal(const std::string& what) : std::runtime_error(what) {}
};

} // namespace jumplab
