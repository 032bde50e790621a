#pragma once
#include <optional>
#include <vector>

#include "tscl/scheduler.hpp"

namespace tscl {

enum class LossId { Encode, Decode, Steganalysis };

/// Raw (unweighted) per-batch or per-epoch losses for the three tasks.
struct LossTriple {
    double encode = 0.0;
    double decode = 0.0;
    double steganalysis = 0.0;
};

/// Append-only per-loss trajectory of epoch-mean raw losses, one entry per
/// completed epoch; the three series always have equal length.
struct LossHistory {
    std::vector<double> encode;
    std::vector<double> decode;
    std::vector<double> steganalysis;

    void append(const LossTriple& t);
    std::size_t epochs() const { return encode.size(); }
    const std::vector<double>& series(LossId id) const;
};

/// Fixed per-task multipliers, strictly ordered encode > decode >
/// steganalysis so imperceptibility keeps dominance when tasks learn at
/// equal rates.
struct PriorCoeffs {
    double encode = 1.0;
    double decode = 0.8;
    double steganalysis = 0.4;

    void validate() const;  // throws ConfigError
    double get(LossId id) const;
};

struct DynamicsParams {
    PriorCoeffs priors;
    double ratio_min = 0.25;
    double ratio_max = 4.0;
    double epsilon = 1e-8;       // denominator guard for the decline ratio
    double weight_floor = 0.05;
    double weight_ceiling = 2.0;

    void validate() const;  // throws ConfigError
};

/// Decline ratio Loss(t-1)/Loss(t-2) for one task, clamped to
/// [ratio_min, ratio_max]; 1.0 (neutral) when fewer than two epochs of
/// history exist. The denominator is guarded by epsilon.
double loss_ratio(const LossHistory& history, LossId id, int t, const DynamicsParams& params);

/// Stage-2 weights: prior coefficient times decline ratio per task, each
/// clamped to [weight_floor, weight_ceiling].
WeightVector dynamic_weights(const LossHistory& history, const DynamicsParams& params, int t);

/// Two-stage state machine: curriculum weights before the handoff epoch,
/// loss-dynamics weights from it on. Owns the loss history fed by the
/// training loop (single writer).
struct TsclState {
    enum class Stage { Curriculum, Dynamics };

    CurriculumConfig curriculum;
    DynamicsParams dynamics;
    int handoff_epoch = 0;
    bool normalize_weights = false;
    LossHistory history;

    TsclState() = default;
    TsclState(CurriculumConfig cur, DynamicsParams dyn, int handoff, bool normalize = false);

    Stage stage(int epoch) const {
        return epoch < handoff_epoch ? Stage::Curriculum : Stage::Dynamics;
    }

    /// Appends last_epoch_losses (when present) to the history, then emits
    /// the weights for `epoch`. Every emitted component is clamped to
    /// [weight_floor, weight_ceiling].
    WeightVector next_weights(int epoch, const std::optional<LossTriple>& last_epoch_losses);
};

} // namespace tscl
