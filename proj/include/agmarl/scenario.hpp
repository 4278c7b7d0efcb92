#pragma once

#include <agmarl/agent.hpp>
#include <agmarl/sim.hpp>
#include <agmarl/training.hpp>

#include <map>
#include <string>
#include <vector>

namespace agmarl {

struct ScenarioWorkload {
    int count = 0;
    PodSpec pod;                    // template; ids assigned per instance
    double cpu_jitter_frac = 0.0;   // uniform +-frac around the template request
    double mem_jitter_frac = 0.0;
    std::string stress_label;
};

struct ScenarioInjection {
    double at_min = 0.0;
    SimEvent::Kind kind = SimEvent::Kind::TaintNode;
    int node_id = -1;  // -1: most-utilised node at fire time
    std::string taint_key;
};

struct ScenarioPhase {
    std::string name;
    double start_min = 0.0;
    double end_min = 0.0;
    std::vector<ScenarioWorkload> workloads;
    std::vector<ScenarioInjection> injections;
};

struct ScenarioScript {
    std::string name;
    std::vector<ScenarioPhase> phases;
};

/// Cascading resource pressure test: four phases ramping a long-lived
/// baseline, a latent memory-spike wave, a heterogeneous peak, and
/// oversized batch jobs.
ScenarioScript scenario_one();

/// Volatile churn and fault injection test: liveness-failing and OOM-killed
/// pods under sustained churn, a burst-job wave, and a NoSchedule taint on
/// the most-utilised node.
ScenarioScript scenario_two();

double scenario_end_s(const ScenarioScript& script);

/// Concrete event schedule: arrival times spread over each phase with seeded
/// jitter, per-pod request jitter where the workload declares it, plus the
/// injections. Both A/B runs consume one expansion.
std::vector<SimEvent> expand_script(const ScenarioScript& script, std::uint64_t seed);

struct NodeSample {
    int node_id = 0;
    int cpu_req_mcpu = 0, mem_req_mib = 0;
    int cpu_cap_mcpu = 0, mem_cap_mib = 0;
    bool memory_pressure = false;
    long restarts_cum = 0, failures_cum = 0;
    double cost_accrued = 0.0;
    std::map<std::string, int> pods_by_app;
    std::map<std::string, int> cpu_by_app_mcpu;
};

struct ClusterSample {
    double time_s = 0.0;
    double stress = 0.0;
    int running = 0, pending = 0;
    long deferred_admissions = 0;
    double cost_accrued = 0.0;
    std::vector<NodeSample> nodes;
};

struct PodOutcome {
    std::string pod_id, app;
    PriorityClass priority = PriorityClass::Normal;
    double arrival_s = 0.0;
    double bound_s = -1.0;  // < 0: never scheduled
    int node_id = -1;
};

struct MetricsFrame {
    std::string scenario, policy;
    std::uint64_t seed = 0;
    double duration_s = 0.0;
    std::vector<ClusterSample> samples;  // fixed 10 s interval
    std::vector<ScenarioPhase> phases;
    std::vector<PodOutcome> outcomes;
    std::map<std::string, std::map<int, long>> restarts_by_app_node;
    std::map<std::string, std::map<int, long>> failures_by_app_node;
    std::map<std::string, std::map<int, int>> final_pods_by_app_node;
    std::vector<std::string> apps;  // stable order
    std::vector<int> node_ids;      // every node id that was ever active
    long deferred_admissions = 0;
    double total_cost = 0.0;
};

enum class PolicyKind { Agmarl, Baseline };

struct RunConfig {
    ClusterConfig cluster;
    CostTable costs;
    StressWeights stress_weights;
    SelectionConfig selection;
    AdmissionCapConfig admission;  // applies to the AGMARL policy only
};

MetricsFrame run_scenario(const ScenarioScript& script, const std::vector<SimEvent>& schedule,
                          PolicyKind kind, const Model* model, const RunConfig& rc,
                          std::uint64_t seed);

/// Two complete simulations over one expanded schedule, differing only in the
/// placement policy. Returns (agmarl, baseline).
std::pair<MetricsFrame, MetricsFrame> run_ab(const ScenarioScript& script, const Model& model,
                                             const RunConfig& rc, std::uint64_t seed);

}  // namespace agmarl
