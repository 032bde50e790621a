#pragma once
#include <optional>
#include <string>

#include "tscl/dynamics.hpp"
#include "tscl/metrics.hpp"
#include "tscl/optim.hpp"

namespace tscl {

enum class SchedulerMode { FixedBaseline, CurriculumOnly, DynamicsOnly, Tscl };

const char* scheduler_mode_name(SchedulerMode m);
SchedulerMode scheduler_mode_from_name(const std::string& name);

struct DatasetConfig {
    std::string source = "synthetic";  // "synthetic" or "directory"
    std::string path;                  // directory source
    std::uint64_t seed = 1;            // synthetic source
    int count = 200;
    int size = 32;
};

struct TrainConfig {
    DatasetConfig dataset;
    int payload_depth = 1;
    std::uint64_t payload_seed = 7;

    int batch_size = 8;
    int epochs = 40;
    std::uint64_t seed = 1;
    SchedulerMode mode = SchedulerMode::Tscl;
    int steganalyzer_cadence = 5;  // steganalyzer SGD step every N batches
    bool normalize_weights = false;

    /// Absent means the default preset (derived from epochs) where a
    /// schedule is needed.
    std::optional<CurriculumConfig> schedule;
    DynamicsParams dynamics;
    /// Absent means epochs/2.
    std::optional<int> handoff_epoch;

    MetricOpts loss_opts;
    AdamConfig adam;
    SgdConfig sgd;

    std::string output_dir = "runs/out";

    int handoff() const { return handoff_epoch ? *handoff_epoch : epochs / 2; }
    CurriculumConfig curriculum() const {
        return schedule ? *schedule : default_curriculum(epochs);
    }
    void validate() const;  // throws ConfigError
};

/// Parse a config file. The schema is fixed; unknown keys raise ConfigError
/// naming the offending key. Missing optional sections take defaults, but
/// the sections a mode requires must be present (tscl: schedule + dynamics,
/// curriculum-only: schedule, dynamics-only: dynamics).
TrainConfig load_config(const std::string& path);
TrainConfig parse_config_json(const std::string& text, const std::string& origin);

} // namespace tscl
