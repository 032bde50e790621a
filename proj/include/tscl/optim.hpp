#pragma once
#include <cstdint>
#include <vector>

#include "tscl/models.hpp"

namespace tscl {

struct AdamConfig {
    double lr = 0.001;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

/// Bias-corrected Adam over a fixed parameter list. Throws NumericError
/// (naming the parameter) on non-finite gradients; a failed step leaves all
/// parameters untouched.
class Adam {
public:
    Adam(std::vector<NamedParam> params, AdamConfig cfg = {});

    void step();
    std::uint64_t step_count() const { return step_; }
    const AdamConfig& config() const { return cfg_; }

    AdamBlob state() const;
    void load_state(const AdamBlob& blob);

private:
    AdamConfig cfg_;
    std::vector<NamedParam> params_;
    std::vector<std::vector<double>> m_, v_;
    std::uint64_t step_ = 0;
};

struct SgdConfig {
    double lr = 0.0001 / 3.0;
    double weight_decay = 1e-8;
};

/// Plain SGD with L2 weight decay: p <- p - lr * (g + weight_decay * p).
class Sgd {
public:
    Sgd(std::vector<NamedParam> params, SgdConfig cfg = {});

    void step();
    const SgdConfig& config() const { return cfg_; }

private:
    SgdConfig cfg_;
    std::vector<NamedParam> params_;
};

/// Zero the gradient buffers of every parameter in the list.
void zero_grads(std::vector<NamedParam>& params);

} // namespace tscl
