#pragma once

#include <Eigen/Dense>

#include <limits>
#include <string>
#include <vector>

namespace agmarl {

constexpr double kInfiniteLifetime = std::numeric_limits<double>::infinity();

enum class CostClass { Standard, HighMem, Spot };

const char* to_string(CostClass c);
CostClass cost_class_from_string(const std::string& s);

// Normalised hourly cost per instance class, relative to Standard = 1.0.
// A non-positive entry means the class is not configured.
struct CostTable {
    double standard = 1.0;
    double high_mem = 1.35;
    double spot = 0.35;

    double of(CostClass c) const;  // throws std::invalid_argument when <= 0
};

struct NodeState {
    int node_id = 0;
    int cpu_capacity_mcpu = 0;
    int mem_capacity_mib = 0;
    int cpu_allocated_mcpu = 0;
    int mem_allocated_mib = 0;
    bool memory_pressure = false;  // H_i
    bool disk_pressure = false;
    bool ready = true;
    std::vector<std::string> taints;  // NoSchedule taint keys
    int restarts_window = 0;          // pod restarts within the trailing window
    CostClass cost_class = CostClass::Standard;
    std::vector<std::string> pod_ids;

    int taint_count() const { return static_cast<int>(taints.size()); }
    int cpu_free_mcpu() const { return cpu_capacity_mcpu - cpu_allocated_mcpu; }
    int mem_free_mib() const { return mem_capacity_mib - mem_allocated_mib; }
};

struct FaultSpec {
    enum class Kind { None, LivenessFail, OomKill };
    Kind kind = Kind::None;
    double after_s = 0.0;    // delay before the probe failure / memory spike
    int spike_to_mib = 0;    // OomKill: total memory the pod spikes to
};

enum class PriorityClass { Normal, Batch, Burst };

const char* to_string(PriorityClass p);

struct PodSpec {
    std::string pod_id;
    std::string app_label;
    int cpu_request_mcpu = 0;
    int mem_request_mib = 0;
    double lifetime_s = kInfiniteLifetime;
    FaultSpec fault;
    PriorityClass priority = PriorityClass::Normal;
    std::vector<std::string> tolerations;  // taint keys the pod tolerates

    bool tolerates(const std::string& taint_key) const;
};

// Global state s_t. The graph is fully connected: every node neighbours every
// other node, no self loops; adjacency is implicit.
struct ClusterGraph {
    std::vector<NodeState> nodes;  // ascending, unique node_id
    double sim_time_s = 0.0;
    double stress = 0.0;  // L_t in [0,1]

    const NodeState* find(int node_id) const;
    int index_of(int node_id) const;  // -1 when absent
};

constexpr int kRawFeatureDim = 10;
using RawFeatures = Eigen::Matrix<double, kRawFeatureDim, 1>;

// Weights of the global stress computation; must sum to <= 1 so the clamp
// only engages at genuine saturation.
struct StressWeights {
    double utilisation = 0.5;
    double pressure = 0.3;
    double restarts = 0.2;
};

/// Fault-tolerance metric: (1 - H) / (1 + ln(1 + R)). The (1 - H) factor is a
/// hard constraint: a pressured node scores zero regardless of history.
double metric_ft(bool pressured, double restarts);
double metric_ft(const NodeState& node);

/// Mean of CPU and memory allocation fractions. Rejects zero capacities.
double metric_util(const NodeState& node);

/// Reciprocal of the node's normalised hourly cost.
double metric_cost(const NodeState& node, const CostTable& costs);

/// Global stress level L_t: weighted blend of mean utilisation, pressured-node
/// fraction and windowed restart volume, clamped to [0,1].
double compute_stress(const ClusterGraph& g, const StressWeights& w = {});

/// 10-entry feature vector x_{i,t}, every entry in [0,1]:
/// [cpu_alloc_frac, mem_alloc_frac, cpu_cap_norm, mem_cap_norm,
///  memory_pressure, disk_pressure, ready, taint_count_norm,
///  restarts_lognorm, global_stress].
RawFeatures raw_features(const NodeState& node, const ClusterGraph& g);

/// Feature matrix for the whole graph, one column per node in g.nodes order.
Eigen::MatrixXd raw_feature_matrix(const ClusterGraph& g);

}  // namespace agmarl
