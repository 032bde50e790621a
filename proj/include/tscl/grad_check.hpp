#pragma once
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "tscl/rng.hpp"
#include "tscl/tensor.hpp"

namespace tscl {

/// Scalar-valued closure over the inputs being checked. Must rebuild its
/// graph from scratch on every call.
using GradClosure = std::function<Tensor(const std::vector<Tensor>&)>;

struct GradCheckFailure {
    int input = 0;
    std::size_t coord = 0;
    double analytic = 0.0;
    double numeric = 0.0;
    double rel_err = 0.0;
};

struct GradCheckReport {
    bool pass = false;
    double max_rel_err = 0.0;
    std::size_t coords_checked = 0;
    GradCheckFailure worst;
    std::vector<GradCheckFailure> failures;  // coordinates over tolerance or non-finite
    std::string to_string() const;
};

struct GradCheckOptions {
    double h = 1e-5;
    double tol = 1e-4;
    /// Skip a coordinate (e.g. near an activation kink). Arguments: input
    /// index, flat coordinate.
    std::function<bool(int, std::size_t)> skip;
    /// When > 0, check only this many randomly sampled coordinates per input.
    std::size_t sample_per_input = 0;
    std::uint64_t sample_seed = 0;
};

/// Central-difference gradient check: one analytic backward pass against
/// per-coordinate (f(x+h) - f(x-h)) / 2h. Relative error uses
/// |a - n| / max(|a|, |n|, 1e-4).
GradCheckReport grad_check(const GradClosure& f, std::vector<Tensor> inputs,
                           const GradCheckOptions& opts = {});

} // namespace tscl
