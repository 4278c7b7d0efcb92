#pragma once

#include <agmarl/cluster.hpp>
#include <agmarl/lexico.hpp>

#include <nlohmann/json_fwd.hpp>

#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <queue>
#include <string>
#include <vector>

namespace agmarl {

struct SimEvent {
    enum class Kind { PodArrival, PodExit, LivenessRestart, OomSpike, TaintNode, UntaintNode, AutoscaleCheck };

    double time = 0.0;
    Kind kind = Kind::PodArrival;
    PodSpec pod;              // PodArrival
    std::string pod_id;       // PodExit / LivenessRestart / OomSpike
    int node_id = -1;         // TaintNode / UntaintNode; -1 targets the most-utilised node
    std::string taint_key;
};

const char* to_string(SimEvent::Kind k);

struct PoolConfig {
    int count = 0;
    int cpu_mcpu = 0;
    int mem_mib = 0;
    CostClass cost_class = CostClass::Standard;
};

struct StressPoolConfig {
    int min = 1;
    int max = 5;
    int cpu_mcpu = 0;
    int mem_mib = 0;
    CostClass cost_class = CostClass::HighMem;
};

struct AutoscaleConfig {
    bool enabled = true;
    double up_threshold = 0.8;
    double up_sustain_s = 60.0;
    double down_threshold = 0.3;
    double down_sustain_s = 300.0;
    double check_interval_s = 10.0;
};

struct ClusterConfig {
    PoolConfig baseline{3, 4000, 16384, CostClass::Standard};
    StressPoolConfig stress{1, 5, 4000, 32768, CostClass::HighMem};
    AutoscaleConfig autoscale;
};

// Centralised-controller admission cap: while the regime is at least High,
// pods of an app family whose restart rate exceeds the configured threshold
// are admitted only while running < ceil(fraction * submitted) for the family.
struct AdmissionCapConfig {
    bool enabled = false;
    double fraction = 0.7;
    double restart_rate_per_min = 1.0;
};

struct BindRecord {
    std::string pod_id;
    std::string app;
    PriorityClass priority = PriorityClass::Normal;
    int node_id = -1;
    double arrival_s = 0.0;
    double bound_s = 0.0;
};

struct SimStats {
    std::map<std::string, std::map<int, long>> restarts_by_app_node;
    std::map<std::string, std::map<int, long>> failures_by_app_node;
    std::map<int, long> restarts_by_node;
    std::map<int, long> failures_by_node;
    long total_restarts = 0;
    long total_failures = 0;
    long deferred_admissions = 0;
    std::vector<BindRecord> binds;
};

struct ScheduleRequest {
    PodSpec pod;
    double arrival_s = 0.0;
    int attempt = 0;
};

// Discrete-event cluster simulator. All mutation goes through bind/defer and
// the event handlers inside next_decision; a single owner drives it.
class Simulator {
public:
    static constexpr double kRetryInterval = 10.0;     // pending re-queue period
    static constexpr double kRestartWindow = 3600.0;   // trailing restart window
    static constexpr double kPressureDecay = 120.0;    // post-OOM pressure hold
    static constexpr double kPressureFreeFrac = 0.10;  // free-memory pressure floor

    Simulator(const ClusterConfig& cc, const CostTable& costs, const StressWeights& sw);

    void load_schedule(std::vector<SimEvent> events);
    void push_event(SimEvent ev);

    /// State sampler fired at every multiple of `interval_s` crossed while
    /// the simulation advances.
    void set_sampler(double interval_s, std::function<void(const Simulator&)> cb);

    /// Advances the event queue to the next scheduling decision point at or
    /// before `horizon`, applying exits, restarts, spikes, taints and
    /// autoscaling along the way. Returns the pod awaiting placement, or
    /// nullopt once nothing schedulable remains before the horizon.
    std::optional<ScheduleRequest> next_decision(double horizon);

    /// Processes remaining internal events up to t (arrivals must have been
    /// consumed first) and advances the clock to exactly t.
    void run_until(double t);

    std::vector<int> feasible_candidates(const PodSpec& pod) const;
    void bind(const ScheduleRequest& req, int node_id);
    void defer(const ScheduleRequest& req);

    ClusterGraph snapshot() const;
    double sim_time() const { return now_; }
    const SimStats& stats() const { return stats_; }
    const CostTable& costs() const { return costs_; }

    int running_count() const;
    int pending_count() const { return static_cast<int>(pending_.size()); }
    int running_count(const std::string& app) const;
    int submitted_count(const std::string& app) const;
    double family_restart_rate_per_min(const std::string& app) const;
    void note_deferred_admission() { ++stats_.deferred_admissions; }

    /// Node-hours cost accrued so far: sum over elapsed time of the active
    /// nodes' normalised hourly cost.
    double cost_accrued() const { return cost_accrued_; }

private:
    struct NodeSlot {
        int node_id;
        int cpu_capacity, mem_capacity;
        CostClass cost_class;
        bool stress_pool;
        bool active = false;
        bool ready = true;
        int cpu_alloc = 0, mem_alloc = 0;
        std::vector<std::string> taints;
        std::vector<std::string> pods;
        std::deque<double> restart_times;
        double pressure_until = -1.0;  // post-OOM pressure deadline
    };

    struct RunningPod {
        PodSpec spec;
        int node_id = -1;
        double bound_s = 0.0;
        int mem_extra = 0;  // memory consumed beyond the request (OOM spike)
    };

    struct PendingPod {
        ScheduleRequest req;
        double next_retry = 0.0;
        long seq = 0;
    };

    void advance_to(double t);
    void apply(const SimEvent& ev);
    void record_restart(const std::string& app, int node_id);
    void unbind(const std::string& pod_id);
    bool node_pressured(const NodeSlot& n) const;
    int node_restarts_window(const NodeSlot& n) const;
    double mean_util() const;
    void autoscale_check();
    int resolve_taint_target(int node_id) const;

    ClusterConfig config_;
    CostTable costs_;
    StressWeights stress_weights_;

    std::vector<NodeSlot> slots_;
    std::map<std::string, RunningPod> pods_;
    std::map<std::string, int> running_by_app_;
    std::map<std::string, int> submitted_by_app_;
    std::map<std::string, std::deque<double>> app_restart_times_;

    struct EventOrder {
        bool operator()(const std::pair<SimEvent, long>& a, const std::pair<SimEvent, long>& b) const {
            if (a.first.time != b.first.time) return a.first.time > b.first.time;
            return a.second > b.second;
        }
    };
    std::priority_queue<std::pair<SimEvent, long>, std::vector<std::pair<SimEvent, long>>, EventOrder> events_;
    std::vector<PendingPod> pending_;
    long event_seq_ = 0;
    long pending_seq_ = 0;

    double now_ = 0.0;
    double cost_accrued_ = 0.0;
    double above_since_ = -1.0;
    double below_since_ = -1.0;

    double sample_interval_ = 0.0;
    double next_sample_ = 0.0;
    std::function<void(const Simulator&)> sampler_;

    SimStats stats_;
};

/// Hard-constraint feasibility: enough free CPU and memory, node ready, and
/// every NoSchedule taint tolerated.
std::vector<int> feasible_candidates(const ClusterGraph& g, const PodSpec& pod);

/// Least-requested spreading baseline: feasible node with the greatest mean
/// free fraction, lowest id on ties. Throws NoFeasibleNode when none fits.
int baseline_policy(const ClusterGraph& g, const PodSpec& pod);

bool admission_allows(const Simulator& sim, const PodSpec& pod, const AdmissionCapConfig& cfg,
                      StressRegime regime);

// JSON codecs for the external interfaces: event schedules and snapshots.
nlohmann::json pod_to_json(const PodSpec& p);
PodSpec pod_from_json(const nlohmann::json& j);
nlohmann::json events_to_json(const std::vector<SimEvent>& evs);
std::vector<SimEvent> events_from_json(const nlohmann::json& j);
nlohmann::json snapshot_to_json(const ClusterGraph& g);
ClusterGraph snapshot_from_json(const nlohmann::json& j);

}  // namespace agmarl
