#include "tscl/dynamics.hpp"

#include <algorithm>

#include "tscl/errors.hpp"

namespace tscl {

void LossHistory::append(const LossTriple& t) {
    encode.push_back(t.encode);
    decode.push_back(t.decode);
    steganalysis.push_back(t.steganalysis);
}

const std::vector<double>& LossHistory::series(LossId id) const {
    switch (id) {
        case LossId::Encode: return encode;
        case LossId::Decode: return decode;
        case LossId::Steganalysis: return steganalysis;
    }
    return encode;
}

void PriorCoeffs::validate() const {
    if (!(encode > 0.0 && decode > 0.0 && steganalysis > 0.0))
        throw ConfigError("prior coefficients must be positive");
    if (!(encode > decode && decode > steganalysis))
        throw ConfigError("prior coefficients must satisfy encode > decode > steganalysis, got " +
                          std::to_string(encode) + ", " + std::to_string(decode) + ", " +
                          std::to_string(steganalysis));
}

double PriorCoeffs::get(LossId id) const {
    switch (id) {
        case LossId::Encode: return encode;
        case LossId::Decode: return decode;
        case LossId::Steganalysis: return steganalysis;
    }
    return encode;
}

void DynamicsParams::validate() const {
    priors.validate();
    if (!(ratio_min > 0.0 && ratio_max >= ratio_min))
        throw ConfigError("dynamics: need 0 < ratio_min <= ratio_max");
    if (!(epsilon > 0.0)) throw ConfigError("dynamics: epsilon must be positive");
    if (!(weight_floor >= 0.0 && weight_ceiling >= weight_floor))
        throw ConfigError("dynamics: need 0 <= weight_floor <= weight_ceiling");
}

double loss_ratio(const LossHistory& history, LossId id, int t, const DynamicsParams& params) {
    const auto& s = history.series(id);
    if (t < 2 || static_cast<std::size_t>(t) > s.size()) return 1.0;
    const double num = s[static_cast<std::size_t>(t) - 1];
    const double den = std::max(s[static_cast<std::size_t>(t) - 2], params.epsilon);
    return std::clamp(num / den, params.ratio_min, params.ratio_max);
}

WeightVector dynamic_weights(const LossHistory& history, const DynamicsParams& params, int t) {
    params.validate();
    auto one = [&](LossId id) {
        const double lambda = params.priors.get(id) * loss_ratio(history, id, t, params);
        return std::clamp(lambda, params.weight_floor, params.weight_ceiling);
    };
    WeightVector w;
    w.encode = one(LossId::Encode);
    w.decode = one(LossId::Decode);
    w.steganalysis = one(LossId::Steganalysis);
    return w;
}

TsclState::TsclState(CurriculumConfig cur, DynamicsParams dyn, int handoff, bool normalize)
    : curriculum(std::move(cur)), dynamics(dyn), handoff_epoch(handoff),
      normalize_weights(normalize) {
    if (handoff_epoch < 0)
        throw ConfigError("handoff epoch must be >= 0, got " + std::to_string(handoff_epoch));
    curriculum.validate();
    dynamics.validate();
}

WeightVector TsclState::next_weights(int epoch,
                                     const std::optional<LossTriple>& last_epoch_losses) {
    if (last_epoch_losses) history.append(*last_epoch_losses);
    WeightVector w = stage(epoch) == Stage::Curriculum
                         ? curriculum_weights(curriculum, epoch)
                         : dynamic_weights(history, dynamics, epoch);
    w.encode = std::clamp(w.encode, dynamics.weight_floor, dynamics.weight_ceiling);
    w.decode = std::clamp(w.decode, dynamics.weight_floor, dynamics.weight_ceiling);
    w.steganalysis = std::clamp(w.steganalysis, dynamics.weight_floor, dynamics.weight_ceiling);
    if (normalize_weights) {
        const double sum = w.encode + w.decode + w.steganalysis;
        if (sum > 0.0) {
            w.encode /= sum;
            w.decode /= sum;
            w.steganalysis /= sum;
        }
    }
    return w;
}

} // namespace tscl
