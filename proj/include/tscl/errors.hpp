#pragma once
#include <stdexcept>
#include <string>

namespace tscl {

// Bad configuration: invalid schedules, malformed config files, unknown keys.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed on-disk data (PPM headers, truncated payloads, CSV schemas).
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Tensor shape mismatches; message names both shapes.
struct ShapeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Metric preconditions (image smaller than window, too many scales).
struct MetricError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Non-finite losses or gradients, failed numeric checks.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace tscl
