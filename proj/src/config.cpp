#include "tscl/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "tscl/errors.hpp"

using nlohmann::json;

namespace tscl {

const char* scheduler_mode_name(SchedulerMode m) {
    switch (m) {
        case SchedulerMode::FixedBaseline: return "fixed-baseline";
        case SchedulerMode::CurriculumOnly: return "curriculum-only";
        case SchedulerMode::DynamicsOnly: return "dynamics-only";
        case SchedulerMode::Tscl: return "tscl";
    }
    return "?";
}

SchedulerMode scheduler_mode_from_name(const std::string& name) {
    if (name == "fixed-baseline") return SchedulerMode::FixedBaseline;
    if (name == "curriculum-only") return SchedulerMode::CurriculumOnly;
    if (name == "dynamics-only") return SchedulerMode::DynamicsOnly;
    if (name == "tscl") return SchedulerMode::Tscl;
    throw ConfigError("unknown scheduler mode '" + name +
                      "' (expected fixed-baseline, curriculum-only, dynamics-only or tscl)");
}

namespace {

void check_keys(const json& obj, const std::string& where,
                const std::set<std::string>& allowed) {
    for (const auto& [key, _] : obj.items())
        if (!allowed.count(key))
            throw ConfigError("config: unknown key '" + where + "." + key + "'");
}

template <typename T>
T get_or(const json& obj, const char* key, T fallback) {
    if (!obj.contains(key)) return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError("config: bad value for '" + std::string(key) + "': " + e.what());
    }
}

LossSchedule parse_schedule_entry(const json& obj, const std::string& where) {
    if (!obj.is_object()) throw ConfigError("config: " + where + " must be an object");
    const std::string type = get_or<std::string>(obj, "type", "continuous");
    if (type == "continuous") {
        check_keys(obj, where, {"type", "kind", "a0", "a1", "a2", "c1", "c2"});
        ContinuousRamp r;
        r.kind = ramp_kind_from_name(get_or<std::string>(obj, "kind", "sine"));
        r.a0 = get_or<double>(obj, "a0", 0.0);
        r.a1 = get_or<double>(obj, "a1", 0.0);
        r.c1 = get_or<int>(obj, "c1", 0);
        r.c2 = get_or<int>(obj, "c2", 1);
        if (obj.contains("a2")) r.a2 = obj.at("a2").get<double>();
        r.validate();
        return r;
    }
    if (type == "discrete") {
        check_keys(obj, where, {"type", "k1", "variant", "steps"});
        DiscreteScheme s;
        s.k1 = get_or<double>(obj, "k1", 0.0);
        s.variant =
            discrete_variant_from_name(get_or<std::string>(obj, "variant", "free-step-free-amp"));
        if (obj.contains("steps")) {
            for (const auto& st : obj.at("steps")) {
                if (!st.is_array() || st.size() != 2)
                    throw ConfigError("config: " + where +
                                      ".steps entries must be [epoch, delta] pairs");
                s.steps.push_back({st.at(0).get<int>(), st.at(1).get<double>()});
            }
        }
        s.validate();
        return s;
    }
    throw ConfigError("config: " + where + ".type must be 'continuous' or 'discrete', got '" +
                      type + "'");
}

std::optional<CurriculumConfig> parse_schedule_section(const json& obj, int epochs) {
    if (!obj.is_object()) throw ConfigError("config: schedule must be an object");
    check_keys(obj, "schedule", {"preset", "encode", "decode", "steganalysis"});
    if (obj.contains("preset")) {
        const std::string preset = obj.at("preset").get<std::string>();
        if (preset != "default")
            throw ConfigError("config: unknown schedule preset '" + preset + "'");
        if (obj.size() != 1)
            throw ConfigError("config: schedule.preset cannot be combined with explicit ramps");
        return default_curriculum(epochs);
    }
    for (const char* key : {"encode", "decode", "steganalysis"})
        if (!obj.contains(key))
            throw ConfigError(std::string("config: schedule.") + key + " is required");
    CurriculumConfig cfg;
    cfg.encode = parse_schedule_entry(obj.at("encode"), "schedule.encode");
    cfg.decode = parse_schedule_entry(obj.at("decode"), "schedule.decode");
    cfg.steganalysis = parse_schedule_entry(obj.at("steganalysis"), "schedule.steganalysis");
    cfg.validate();
    return cfg;
}

} // namespace

void TrainConfig::validate() const {
    if (epochs < 4) throw ConfigError("config: epochs must be >= 4, got " +
                                      std::to_string(epochs));
    if (batch_size < 1) throw ConfigError("config: batch_size must be >= 1");
    if (steganalyzer_cadence < 1)
        throw ConfigError("config: steganalyzer_cadence must be >= 1");
    if (payload_depth < 1 || payload_depth > 3)
        throw ConfigError("config: payload depth must be 1, 2 or 3");
    if (dataset.source != "synthetic" && dataset.source != "directory")
        throw ConfigError("config: dataset.source must be 'synthetic' or 'directory'");
    if (dataset.source == "directory" && dataset.path.empty())
        throw ConfigError("config: dataset.path is required for the directory source");
    if (handoff() < 0) throw ConfigError("config: handoff_epoch must be >= 0");
    dynamics.validate();
    curriculum().validate();
    // The multi-scale term must fit the configured image size.
    const int factor = 1 << (loss_opts.msssim_scales - 1);
    if (dataset.size / factor < loss_opts.msssim_window)
        throw ConfigError("config: msssim_scales/" + std::to_string(loss_opts.msssim_scales) +
                          " with window " + std::to_string(loss_opts.msssim_window) +
                          " does not fit " + std::to_string(dataset.size) + "px images");
    if (dataset.size < loss_opts.ssim_window)
        throw ConfigError("config: ssim_window exceeds the image size");
}

TrainConfig parse_config_json(const std::string& text, const std::string& origin) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError("config " + origin + ": " + e.what());
    }
    if (!root.is_object()) throw ConfigError("config " + origin + ": top level must be an object");
    check_keys(root, "",
               {"dataset", "payload", "train", "schedule", "dynamics", "loss", "optim", "output"});

    TrainConfig cfg;

    if (root.contains("dataset")) {
        const auto& d = root.at("dataset");
        check_keys(d, "dataset", {"source", "path", "seed", "count", "size"});
        cfg.dataset.source = get_or<std::string>(d, "source", "synthetic");
        cfg.dataset.path = get_or<std::string>(d, "path", "");
        cfg.dataset.seed = get_or<std::uint64_t>(d, "seed", 1);
        cfg.dataset.count = get_or<int>(d, "count", 200);
        cfg.dataset.size = get_or<int>(d, "size", 32);
    }

    if (root.contains("payload")) {
        const auto& p = root.at("payload");
        check_keys(p, "payload", {"depth", "seed"});
        cfg.payload_depth = get_or<int>(p, "depth", 1);
        cfg.payload_seed = get_or<std::uint64_t>(p, "seed", 7);
    }

    if (root.contains("train")) {
        const auto& t = root.at("train");
        check_keys(t, "train",
                   {"batch_size", "epochs", "seed", "mode", "steganalyzer_cadence",
                    "normalize_weights"});
        cfg.batch_size = get_or<int>(t, "batch_size", 8);
        cfg.epochs = get_or<int>(t, "epochs", 40);
        cfg.seed = get_or<std::uint64_t>(t, "seed", 1);
        cfg.mode = scheduler_mode_from_name(get_or<std::string>(t, "mode", "tscl"));
        cfg.steganalyzer_cadence = get_or<int>(t, "steganalyzer_cadence", 5);
        cfg.normalize_weights = get_or<bool>(t, "normalize_weights", false);
    }

    const bool needs_schedule =
        cfg.mode == SchedulerMode::Tscl || cfg.mode == SchedulerMode::CurriculumOnly;
    const bool needs_dynamics =
        cfg.mode == SchedulerMode::Tscl || cfg.mode == SchedulerMode::DynamicsOnly;
    if (needs_schedule && !root.contains("schedule"))
        throw ConfigError(std::string("config: mode '") + scheduler_mode_name(cfg.mode) +
                          "' requires a 'schedule' section (use {\"preset\": \"default\"} for "
                          "the standard ramps)");
    if (needs_dynamics && !root.contains("dynamics"))
        throw ConfigError(std::string("config: mode '") + scheduler_mode_name(cfg.mode) +
                          "' requires a 'dynamics' section ({} accepts all defaults)");

    if (root.contains("schedule"))
        cfg.schedule = parse_schedule_section(root.at("schedule"), cfg.epochs);

    if (root.contains("dynamics")) {
        const auto& d = root.at("dynamics");
        check_keys(d, "dynamics",
                   {"priors", "handoff_epoch", "ratio_min", "ratio_max", "epsilon",
                    "weight_floor", "weight_ceiling"});
        if (d.contains("priors")) {
            const auto& p = d.at("priors");
            check_keys(p, "dynamics.priors", {"encode", "decode", "steganalysis"});
            cfg.dynamics.priors.encode = get_or<double>(p, "encode", 1.0);
            cfg.dynamics.priors.decode = get_or<double>(p, "decode", 0.8);
            cfg.dynamics.priors.steganalysis = get_or<double>(p, "steganalysis", 0.4);
        }
        if (d.contains("handoff_epoch")) cfg.handoff_epoch = d.at("handoff_epoch").get<int>();
        cfg.dynamics.ratio_min = get_or<double>(d, "ratio_min", cfg.dynamics.ratio_min);
        cfg.dynamics.ratio_max = get_or<double>(d, "ratio_max", cfg.dynamics.ratio_max);
        cfg.dynamics.epsilon = get_or<double>(d, "epsilon", cfg.dynamics.epsilon);
        cfg.dynamics.weight_floor = get_or<double>(d, "weight_floor", cfg.dynamics.weight_floor);
        cfg.dynamics.weight_ceiling =
            get_or<double>(d, "weight_ceiling", cfg.dynamics.weight_ceiling);
    }

    if (root.contains("loss")) {
        const auto& l = root.at("loss");
        check_keys(l, "loss", {"ssim_window", "ssim_sigma", "msssim_scales", "msssim_window"});
        cfg.loss_opts.ssim_window = get_or<int>(l, "ssim_window", 11);
        cfg.loss_opts.ssim_sigma = get_or<double>(l, "ssim_sigma", 1.5);
        cfg.loss_opts.msssim_scales = get_or<int>(l, "msssim_scales", 3);
        cfg.loss_opts.msssim_window = get_or<int>(l, "msssim_window", 7);
    }

    if (root.contains("optim")) {
        const auto& o = root.at("optim");
        check_keys(o, "optim",
                   {"adam_lr", "adam_beta1", "adam_beta2", "adam_eps", "sgd_lr",
                    "sgd_weight_decay"});
        cfg.adam.lr = get_or<double>(o, "adam_lr", cfg.adam.lr);
        cfg.adam.beta1 = get_or<double>(o, "adam_beta1", cfg.adam.beta1);
        cfg.adam.beta2 = get_or<double>(o, "adam_beta2", cfg.adam.beta2);
        cfg.adam.eps = get_or<double>(o, "adam_eps", cfg.adam.eps);
        cfg.sgd.lr = get_or<double>(o, "sgd_lr", cfg.sgd.lr);
        cfg.sgd.weight_decay = get_or<double>(o, "sgd_weight_decay", cfg.sgd.weight_decay);
    }

    if (root.contains("output")) {
        const auto& o = root.at("output");
        check_keys(o, "output", {"dir"});
        cfg.output_dir = get_or<std::string>(o, "dir", cfg.output_dir);
    }

    cfg.validate();
    return cfg;
}

TrainConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("config: cannot open " + path);
    std::ostringstream buf;
    buf << is.rdbuf();
    return parse_config_json(buf.str(), path);
}

} // namespace tscl
