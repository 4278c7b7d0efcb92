#pragma once

#include <agmarl/scenario.hpp>
#include <agmarl/training.hpp>

#include <nlohmann/json_fwd.hpp>

#include <stdexcept>
#include <string>

namespace agmarl {

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Whole-run configuration. Every field has a default; unknown JSON keys are
// rejected at every nesting level.
struct GlobalConfig {
    Hyperparams hyperparams;
    SelectionConfig selection;
    ClusterConfig cluster;
    CostTable cost_table;
    StressWeights stress_weights;
    AdmissionCapConfig admission_cap;
    std::string output_dir = "out";

    int max_nodes() const { return cluster.baseline.count + cluster.stress.max; }
    TrainSetup train_setup() const;
    RunConfig run_config() const;
};

GlobalConfig config_from_json(const nlohmann::json& j);
GlobalConfig load_config(const std::string& path);

}  // namespace agmarl
