#include "tscl/scheduler.hpp"

#include <cmath>

#include "tscl/errors.hpp"

namespace tscl {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

const char* ramp_kind_name(RampKind k) {
    switch (k) {
        case RampKind::Sine: return "sine";
        case RampKind::Linear: return "linear";
        case RampKind::Exponential: return "exponential";
        case RampKind::Cosine: return "cosine";
    }
    return "?";
}

RampKind ramp_kind_from_name(const std::string& name) {
    if (name == "sine") return RampKind::Sine;
    if (name == "linear") return RampKind::Linear;
    if (name == "exponential") return RampKind::Exponential;
    if (name == "cosine") return RampKind::Cosine;
    throw ConfigError("unknown ramp kind '" + name +
                      "' (expected sine, linear, exponential or cosine)");
}

double unit_ramp(RampKind k, double u) {
    switch (k) {
        case RampKind::Sine: return std::sin(std::min(kPi / 2.0, u * kPi / 2.0));
        case RampKind::Linear: return u;
        case RampKind::Exponential: return std::exp(u) - 1.0;
        case RampKind::Cosine: return 1.0 - std::cos(u * kPi / 2.0);
    }
    return 0.0;
}

double ContinuousRamp::converged_weight() const {
    return a2 ? *a2 : a0 + a1 * unit_ramp(kind, 1.0);
}

bool ContinuousRamp::has_a2_override() const {
    return a2.has_value() && *a2 != a0 + a1 * unit_ramp(kind, 1.0);
}

void ContinuousRamp::validate() const {
    if (c2 <= c1)
        throw ConfigError("ramp: c2 must exceed c1, got c1=" + std::to_string(c1) +
                          " c2=" + std::to_string(c2));
    if (c1 < 0) throw ConfigError("ramp: c1 must be >= 0, got " + std::to_string(c1));
    if (a0 < 0.0 || a1 < 0.0)
        throw ConfigError("ramp: a0 and a1 must be >= 0, got a0=" + std::to_string(a0) +
                          " a1=" + std::to_string(a1));
    if (a2 && *a2 < 0.0) throw ConfigError("ramp: a2 must be >= 0, got " + std::to_string(*a2));
}

double eval_continuous(const ContinuousRamp& ramp, int epoch) {
    ramp.validate();
    if (epoch < ramp.c1) return ramp.a0;
    if (epoch >= ramp.c2) return ramp.converged_weight();
    const double u = static_cast<double>(epoch - ramp.c1) / static_cast<double>(ramp.c2 - ramp.c1);
    return ramp.a0 + ramp.a1 * unit_ramp(ramp.kind, u);
}

const char* discrete_variant_name(DiscreteVariant v) {
    switch (v) {
        case DiscreteVariant::FixedStepFixedAmp: return "fixed-step-fixed-amp";
        case DiscreteVariant::FixedStepFreeAmp: return "fixed-step-free-amp";
        case DiscreteVariant::FreeStepFixedAmp: return "free-step-fixed-amp";
        case DiscreteVariant::FreeStepFreeAmp: return "free-step-free-amp";
    }
    return "?";
}

DiscreteVariant discrete_variant_from_name(const std::string& name) {
    if (name == "fixed-step-fixed-amp") return DiscreteVariant::FixedStepFixedAmp;
    if (name == "fixed-step-free-amp") return DiscreteVariant::FixedStepFreeAmp;
    if (name == "free-step-fixed-amp") return DiscreteVariant::FreeStepFixedAmp;
    if (name == "free-step-free-amp") return DiscreteVariant::FreeStepFreeAmp;
    throw ConfigError("unknown discrete variant '" + name + "'");
}

void DiscreteScheme::validate() const {
    if (k1 < 0.0) throw ConfigError("discrete scheme: k1 must be >= 0");
    for (std::size_t i = 0; i < steps.size(); ++i) {
        if (steps[i].epoch < 0) throw ConfigError("discrete scheme: step epochs must be >= 0");
        if (i > 0 && steps[i].epoch <= steps[i - 1].epoch)
            throw ConfigError("discrete scheme: step epochs must be strictly increasing, got " +
                              std::to_string(steps[i - 1].epoch) + " then " +
                              std::to_string(steps[i].epoch));
    }
    const bool fixed_step = variant == DiscreteVariant::FixedStepFixedAmp ||
                            variant == DiscreteVariant::FixedStepFreeAmp;
    const bool fixed_amp = variant == DiscreteVariant::FixedStepFixedAmp ||
                           variant == DiscreteVariant::FreeStepFixedAmp;
    if (fixed_step && steps.size() >= 2) {
        const int stride = steps[1].epoch - steps[0].epoch;
        for (std::size_t i = 2; i < steps.size(); ++i)
            if (steps[i].epoch - steps[i - 1].epoch != stride)
                throw ConfigError(std::string("discrete scheme: variant ") +
                                  discrete_variant_name(variant) +
                                  " requires a constant step size");
    }
    if (fixed_amp) {
        for (std::size_t i = 1; i < steps.size(); ++i)
            if (steps[i].delta != steps[0].delta)
                throw ConfigError(std::string("discrete scheme: variant ") +
                                  discrete_variant_name(variant) +
                                  " requires equal adjustment amplitudes");
    }
}

double eval_discrete(const DiscreteScheme& scheme, int epoch) {
    scheme.validate();
    double w = scheme.k1;
    for (const auto& s : scheme.steps) {
        if (s.epoch > epoch) break;
        w += s.delta;
    }
    return w;
}

double eval_schedule(const LossSchedule& schedule, int epoch) {
    if (const auto* r = std::get_if<ContinuousRamp>(&schedule)) return eval_continuous(*r, epoch);
    return eval_discrete(std::get<DiscreteScheme>(schedule), epoch);
}

void CurriculumConfig::validate() const {
    const LossSchedule* all[3] = {&encode, &decode, &steganalysis};
    for (const auto* s : all) {
        if (const auto* r = std::get_if<ContinuousRamp>(s))
            r->validate();
        else
            std::get<DiscreteScheme>(*s).validate();
    }
    // Sequential windows apply to the continuous form only.
    const auto* re = std::get_if<ContinuousRamp>(&encode);
    const auto* rd = std::get_if<ContinuousRamp>(&decode);
    const auto* rs = std::get_if<ContinuousRamp>(&steganalysis);
    if (re && rd && rs) {
        if (!(re->c1 <= re->c2 && re->c2 <= rd->c1 && rd->c1 <= rd->c2 && rd->c2 <= rs->c1 &&
              rs->c1 <= rs->c2))
            throw ConfigError(
                "curriculum: ramp windows must be sequential "
                "(encode [" + std::to_string(re->c1) + "," + std::to_string(re->c2) +
                "] -> decode [" + std::to_string(rd->c1) + "," + std::to_string(rd->c2) +
                "] -> steganalysis [" + std::to_string(rs->c1) + "," + std::to_string(rs->c2) +
                "])");
    }
}

WeightVector curriculum_weights(const CurriculumConfig& config, int epoch) {
    config.validate();
    WeightVector w;
    w.encode = eval_schedule(config.encode, epoch);
    w.decode = eval_schedule(config.decode, epoch);
    w.steganalysis = eval_schedule(config.steganalysis, epoch);
    return w;
}

CurriculumConfig default_curriculum(int total_epochs) {
    if (total_epochs < 6)
        throw ConfigError("default curriculum needs at least 6 epochs, got " +
                          std::to_string(total_epochs));
    const int third1 = total_epochs / 6;
    const int third2 = total_epochs / 3;
    const int third3 = total_epochs / 2;
    auto ramp = [](int c1, int c2) {
        ContinuousRamp r;
        r.a0 = 0.2;
        r.a1 = 0.8;
        r.c1 = c1;
        r.c2 = c2;
        r.kind = RampKind::Sine;
        return r;
    };
    CurriculumConfig cfg;
    cfg.encode = ramp(0, third1);
    cfg.decode = ramp(third1, third2);
    cfg.steganalysis = ramp(third2, third3);
    return cfg;
}

} // namespace tscl
