#pragma once
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace tscl {

/// Loss weights emitted for one epoch, in task order
/// (encode, decode, steganalysis).
struct WeightVector {
    double encode = 1.0;
    double decode = 1.0;
    double steganalysis = 1.0;
};

enum class RampKind { Sine, Linear, Exponential, Cosine };

const char* ramp_kind_name(RampKind k);
RampKind ramp_kind_from_name(const std::string& name);

/// Unit ramp g(u) for u in [0, 1]:
///   sine        sin(min(pi/2, u*pi/2))   fast-to-slow
///   linear      u
///   exponential e^u - 1                  slow-to-fast, g(1) = e-1
///   cosine      1 - cos(u*pi/2)          slow-to-fast mirror of sine
double unit_ramp(RampKind k, double u);

/// One continuous per-loss weight ramp: flat at a0 before c1, ramps by
/// a1*g(.) over [c1, c2), flat at the converged weight from c2 on.
struct ContinuousRamp {
    double a0 = 0.0;
    double a1 = 0.0;
    int c1 = 0;
    int c2 = 1;
    RampKind kind = RampKind::Sine;
    /// Explicit converged weight. Defaults to a0 + a1*g(1), which keeps the
    /// curve continuous at c2; overrides are legal but reported by
    /// has_a2_override().
    std::optional<double> a2;

    double converged_weight() const;
    bool has_a2_override() const;
    void validate() const;  // throws ConfigError
};

double eval_continuous(const ContinuousRamp& ramp, int epoch);

enum class DiscreteVariant {
    FixedStepFixedAmp,
    FixedStepFreeAmp,
    FreeStepFixedAmp,
    FreeStepFreeAmp,
};

const char* discrete_variant_name(DiscreteVariant v);
DiscreteVariant discrete_variant_from_name(const std::string& name);

struct DiscreteStep {
    int epoch = 0;
    double delta = 0.0;
};

/// Step scheme: weight starts at k1 and jumps by each step's delta at the
/// step's epoch (right-continuous).
struct DiscreteScheme {
    double k1 = 0.0;
    std::vector<DiscreteStep> steps;
    DiscreteVariant variant = DiscreteVariant::FreeStepFreeAmp;

    void validate() const;  // throws ConfigError
};

double eval_discrete(const DiscreteScheme& scheme, int epoch);

using LossSchedule = std::variant<ContinuousRamp, DiscreteScheme>;

double eval_schedule(const LossSchedule& schedule, int epoch);

/// Per-loss curriculum for the three tasks. Continuous ramps must come in
/// the sequential order encode -> decode -> steganalysis (each window ends
/// before the next begins).
struct CurriculumConfig {
    LossSchedule encode;
    LossSchedule decode;
    LossSchedule steganalysis;

    void validate() const;  // throws ConfigError
};

WeightVector curriculum_weights(const CurriculumConfig& config, int epoch);

/// Preset: sine ramps 0.2 -> 1.0 for encode over [0, E/6], decode over
/// [E/6, E/3], steganalysis over [E/3, E/2].
CurriculumConfig default_curriculum(int total_epochs);

} // namespace tscl
