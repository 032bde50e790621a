#include "tscl/optim.hpp"

#include <cmath>

#include "tscl/errors.hpp"

namespace tscl {

namespace {

// Trainable gradients must be finite before any parameter moves.
void check_finite(const std::vector<NamedParam>& params, const char* who) {
    for (const auto& p : params) {
        if (!p.trainable || !p.tensor.has_grad()) continue;
        const double* g = p.tensor.grad();
        for (std::size_t i = 0; i < p.tensor.numel(); ++i)
            if (!std::isfinite(g[i]))
                throw NumericError(std::string(who) + ": non-finite gradient in parameter '" +
                                   p.name + "' at coordinate " + std::to_string(i));
    }
}

} // namespace

Adam::Adam(std::vector<NamedParam> params, AdamConfig cfg)
    : cfg_(cfg), params_(std::move(params)) {
    for (auto& p : params_) {
        const std::size_t n = p.trainable ? p.tensor.numel() : 0;
        m_.emplace_back(n, 0.0);
        v_.emplace_back(n, 0.0);
    }
}

void Adam::step() {
    check_finite(params_, "adam");
    ++step_;
    const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(step_));
    const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(step_));
    for (std::size_t pi = 0; pi < params_.size(); ++pi) {
        auto& p = params_[pi];
        if (!p.trainable) continue;
        double* w = p.tensor.data();
        const double* g = p.tensor.has_grad() ? p.tensor.grad() : nullptr;
        auto& m = m_[pi];
        auto& v = v_[pi];
        for (std::size_t i = 0; i < p.tensor.numel(); ++i) {
            const double gi = g ? g[i] : 0.0;
            m[i] = cfg_.beta1 * m[i] + (1.0 - cfg_.beta1) * gi;
            v[i] = cfg_.beta2 * v[i] + (1.0 - cfg_.beta2) * gi * gi;
            const double mhat = m[i] / bc1;
            const double vhat = v[i] / bc2;
            w[i] -= cfg_.lr * mhat / (std::sqrt(vhat) + cfg_.eps);
        }
    }
}

AdamBlob Adam::state() const {
    AdamBlob blob;
    blob.step = step_;
    for (std::size_t pi = 0; pi < params_.size(); ++pi) {
        if (!params_[pi].trainable) continue;
        blob.m.push_back(m_[pi]);
        blob.v.push_back(v_[pi]);
    }
    return blob;
}

void Adam::load_state(const AdamBlob& blob) {
    step_ = blob.step;
    std::size_t bi = 0;
    for (std::size_t pi = 0; pi < params_.size(); ++pi) {
        if (!params_[pi].trainable) continue;
        if (bi >= blob.m.size() || blob.m[bi].size() != m_[pi].size())
            throw ConfigError("adam: optimizer state does not match parameter list");
        m_[pi] = blob.m[bi];
        v_[pi] = blob.v[bi];
        ++bi;
    }
}

Sgd::Sgd(std::vector<NamedParam> params, SgdConfig cfg) : cfg_(cfg), params_(std::move(params)) {
    if (cfg_.lr <= 0.0) throw ConfigError("sgd: learning rate must be positive");
}

void Sgd::step() {
    check_finite(params_, "sgd");
    for (auto& p : params_) {
        if (!p.trainable) continue;
        double* w = p.tensor.data();
        const double* g = p.tensor.has_grad() ? p.tensor.grad() : nullptr;
        for (std::size_t i = 0; i < p.tensor.numel(); ++i) {
            const double gi = g ? g[i] : 0.0;
            w[i] -= cfg_.lr * (gi + cfg_.weight_decay * w[i]);
        }
    }
}

void zero_grads(std::vector<NamedParam>& params) {
    for (auto& p : params) p.tensor.zero_grad();
}

} // namespace tscl
