#include <agmarl/sim.hpp>

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace agmarl {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

const char* to_string(SimEvent::Kind k) {
    switch (k) {
        case SimEvent::Kind::PodArrival: return "PodArrival";
        case SimEvent::Kind::PodExit: return "PodExit";
        case SimEvent::Kind::LivenessRestart: return "LivenessRestart";
        case SimEvent::Kind::OomSpike: return "OomSpike";
        case SimEvent::Kind::TaintNode: return "TaintNode";
        case SimEvent::Kind::UntaintNode: return "UntaintNode";
        case SimEvent::Kind::AutoscaleCheck: return "AutoscaleCheck";
    }
    return "?";
}

Simulator::Simulator(const ClusterConfig& cc, const CostTable& costs, const StressWeights& sw)
    : config_(cc), costs_(costs), stress_weights_(sw) {
    if (cc.baseline.count <= 0 || cc.baseline.cpu_mcpu <= 0 || cc.baseline.mem_mib <= 0) {
        throw std::invalid_argument("ClusterConfig: baseline pool must be non-empty with positive capacities");
    }
    if (cc.stress.min > cc.stress.max || cc.stress.min < 0) {
        throw std::invalid_argument("ClusterConfig: stress pool bounds invalid");
    }
    if (cc.stress.max > 0 && (cc.stress.cpu_mcpu <= 0 || cc.stress.mem_mib <= 0)) {
        throw std::invalid_argument("ClusterConfig: stress pool capacities must be positive");
    }
    int id = 0;
    for (int i = 0; i < cc.baseline.count; ++i, ++id) {
        NodeSlot s{};
        s.node_id = id;
        s.cpu_capacity = cc.baseline.cpu_mcpu;
        s.mem_capacity = cc.baseline.mem_mib;
        s.cost_class = cc.baseline.cost_class;
        s.stress_pool = false;
        s.active = true;
        slots_.push_back(std::move(s));
    }
    for (int i = 0; i < cc.stress.max; ++i, ++id) {
        NodeSlot s{};
        s.node_id = id;
        s.cpu_capacity = cc.stress.cpu_mcpu;
        s.mem_capacity = cc.stress.mem_mib;
        s.cost_class = cc.stress.cost_class;
        s.stress_pool = true;
        s.active = i < cc.stress.min;
        slots_.push_back(std::move(s));
    }
    if (cc.autoscale.enabled && cc.stress.max > cc.stress.min) {
        SimEvent check;
        check.kind = SimEvent::Kind::AutoscaleCheck;
        check.time = cc.autoscale.check_interval_s;
        push_event(std::move(check));
    }
}

void Simulator::load_schedule(std::vector<SimEvent> events) {
    for (SimEvent& ev : events) {
        push_event(std::move(ev));
    }
}

void Simulator::push_event(SimEvent ev) {
    if (ev.time < now_) {
        throw std::invalid_argument("push_event: event time precedes sim_time");
    }
    events_.push({std::move(ev), event_seq_++});
}

void Simulator::set_sampler(double interval_s, std::function<void(const Simulator&)> cb) {
    sample_interval_ = interval_s;
    next_sample_ = std::ceil(now_ / interval_s) * interval_s;
    if (next_sample_ <= now_) next_sample_ = now_ + interval_s;
    sampler_ = std::move(cb);
}

void Simulator::advance_to(double t) {
    if (t < now_) {
        throw std::logic_error("advance_to: time going backwards");
    }
    while (sampler_ && next_sample_ <= t) {
        const double dt = next_sample_ - now_;
        for (const NodeSlot& s : slots_) {
            if (s.active) cost_accrued_ += dt / 3600.0 * costs_.of(s.cost_class);
        }
        now_ = next_sample_;
        sampler_(*this);
        next_sample_ += sample_interval_;
    }
    const double dt = t - now_;
    for (const NodeSlot& s : slots_) {
        if (s.active) cost_accrued_ += dt / 3600.0 * costs_.of(s.cost_class);
    }
    now_ = t;
}

std::optional<ScheduleRequest> Simulator::next_decision(double horizon) {
    while (true) {
        const double t_event = events_.empty() ? kInf : events_.top().first.time;
        double t_pending = kInf;
        std::size_t best_idx = pending_.size();
        for (std::size_t i = 0; i < pending_.size(); ++i) {
            const PendingPod& p = pending_[i];
            if (p.next_retry < t_pending ||
                (p.next_retry == t_pending && best_idx < pending_.size() && p.seq < pending_[best_idx].seq)) {
                t_pending = p.next_retry;
                best_idx = i;
            }
        }
        if (t_pending == kInf && pods_.empty() && !events_.empty() &&
            events_.top().first.kind == SimEvent::Kind::AutoscaleCheck) {
            // with no pods and no pending queue, nothing but self-rescheduling
            // checks can fire; do not let them keep the run alive
            auto copy = events_;
            bool only_checks = true;
            while (!copy.empty()) {
                if (copy.top().first.kind != SimEvent::Kind::AutoscaleCheck) {
                    only_checks = false;
                    break;
                }
                copy.pop();
            }
            if (only_checks) return std::nullopt;
        }
        const double t = std::min(t_event, t_pending);
        if (t == kInf || t > horizon) {
            return std::nullopt;
        }
        if (t_event <= t_pending) {
            SimEvent ev = events_.top().first;
            events_.pop();
            advance_to(ev.time);
            if (ev.kind == SimEvent::Kind::PodArrival) {
                submitted_by_app_[ev.pod.app_label] += 1;
                return ScheduleRequest{std::move(ev.pod), now_, 0};
            }
            apply(ev);
        } else {
            advance_to(t_pending);
            ScheduleRequest req = std::move(pending_[best_idx].req);
            ++req.attempt;
            pending_.erase(pending_.begin() + static_cast<std::ptrdiff_t>(best_idx));
            return req;
        }
    }
}

void Simulator::run_until(double t) {
    while (!events_.empty() && events_.top().first.time <= t) {
        SimEvent ev = events_.top().first;
        events_.pop();
        advance_to(ev.time);
        if (ev.kind == SimEvent::Kind::PodArrival) {
            throw std::logic_error("run_until: unconsumed pod arrival in schedule");
        }
        apply(ev);
    }
    advance_to(t);
}

void Simulator::apply(const SimEvent& ev) {
    switch (ev.kind) {
        case SimEvent::Kind::PodArrival:
            break;  // handled in next_decision
        case SimEvent::Kind::PodExit: {
            if (pods_.count(ev.pod_id)) unbind(ev.pod_id);
            break;
        }
        case SimEvent::Kind::LivenessRestart: {
            auto it = pods_.find(ev.pod_id);
            if (it == pods_.end()) break;
            record_restart(it->second.spec.app_label, it->second.node_id);
            SimEvent next;
            next.kind = SimEvent::Kind::LivenessRestart;
            next.time = now_ + it->second.spec.fault.after_s;
            next.pod_id = ev.pod_id;
            push_event(std::move(next));
            break;
        }
        case SimEvent::Kind::OomSpike: {
            auto it = pods_.find(ev.pod_id);
            if (it == pods_.end()) break;
            RunningPod& pod = it->second;
            NodeSlot& node = slots_[static_cast<std::size_t>(pod.node_id)];
            const int want = pod.spec.fault.spike_to_mib - (pod.spec.mem_request_mib + pod.mem_extra);
            if (want <= 0) break;
            if (want <= node.mem_capacity - node.mem_alloc) {
                node.mem_alloc += want;
                pod.mem_extra += want;
            } else {
                // spike exceeds free memory: the container is OOM-killed and
                // restarts at its request size, spiking again after the same
                // delay; the node holds MemoryPressure for the decay window
                record_restart(pod.spec.app_label, pod.node_id);
                node.mem_alloc -= pod.mem_extra;
                pod.mem_extra = 0;
                node.pressure_until = now_ + kPressureDecay;
                SimEvent next;
                next.kind = SimEvent::Kind::OomSpike;
                next.time = now_ + pod.spec.fault.after_s;
                next.pod_id = ev.pod_id;
                push_event(std::move(next));
            }
            break;
        }
        case SimEvent::Kind::TaintNode: {
            const int target = resolve_taint_target(ev.node_id);
            if (target >= 0) {
                NodeSlot& node = slots_[static_cast<std::size_t>(target)];
                if (std::find(node.taints.begin(), node.taints.end(), ev.taint_key) == node.taints.end()) {
                    node.taints.push_back(ev.taint_key);
                }
            }
            break;
        }
        case SimEvent::Kind::UntaintNode: {
            if (ev.node_id >= 0 && ev.node_id < static_cast<int>(slots_.size())) {
                auto& taints = slots_[static_cast<std::size_t>(ev.node_id)].taints;
                taints.erase(std::remove(taints.begin(), taints.end(), ev.taint_key), taints.end());
            }
            break;
        }
        case SimEvent::Kind::AutoscaleCheck: {
            autoscale_check();
            SimEvent next;
            next.kind = SimEvent::Kind::AutoscaleCheck;
            next.time = now_ + config_.autoscale.check_interval_s;
            push_event(std::move(next));
            break;
        }
    }
}

void Simulator::record_restart(const std::string& app, int node_id) {
    slots_[static_cast<std::size_t>(node_id)].restart_times.push_back(now_);
    app_restart_times_[app].push_back(now_);
    stats_.restarts_by_app_node[app][node_id] += 1;
    stats_.failures_by_app_node[app][node_id] += 1;
    stats_.restarts_by_node[node_id] += 1;
    stats_.failures_by_node[node_id] += 1;
    stats_.total_restarts += 1;
    stats_.total_failures += 1;
}

void Simulator::unbind(const std::string& pod_id) {
    auto it = pods_.find(pod_id);
    if (it == pods_.end()) return;
    const RunningPod& pod = it->second;
    NodeSlot& node = slots_[static_cast<std::size_t>(pod.node_id)];
    node.cpu_alloc -= pod.spec.cpu_request_mcpu;
    node.mem_alloc -= pod.spec.mem_request_mib + pod.mem_extra;
    node.pods.erase(std::remove(node.pods.begin(), node.pods.end(), pod_id), node.pods.end());
    running_by_app_[pod.spec.app_label] -= 1;
    pods_.erase(it);
}

bool Simulator::node_pressured(const NodeSlot& n) const {
    if (now_ < n.pressure_until) return true;
    return static_cast<double>(n.mem_capacity - n.mem_alloc) < kPressureFreeFrac * n.mem_capacity;
}

int Simulator::node_restarts_window(const NodeSlot& n) const {
    int count = 0;
    for (auto it = n.restart_times.rbegin(); it != n.restart_times.rend(); ++it) {
        if (*it <= now_ - kRestartWindow) break;
        ++count;
    }
    return count;
}

double Simulator::mean_util() const {
    double sum = 0.0;
    int n = 0;
    for (const NodeSlot& s : slots_) {
        if (!s.active) continue;
        sum += 0.5 * (static_cast<double>(s.cpu_alloc) / s.cpu_capacity +
                      static_cast<double>(s.mem_alloc) / s.mem_capacity);
        ++n;
    }
    return n > 0 ? sum / n : 0.0;
}

void Simulator::autoscale_check() {
    const double util = mean_util();
    int active_stress = 0;
    for (const NodeSlot& s : slots_) {
        if (s.stress_pool && s.active) ++active_stress;
    }

    if (util > config_.autoscale.up_threshold) {
        if (above_since_ < 0.0) above_since_ = now_;
    } else {
        above_since_ = -1.0;
    }
    if (util < config_.autoscale.down_threshold) {
        if (below_since_ < 0.0) below_since_ = now_;
    } else {
        below_since_ = -1.0;
    }

    if (above_since_ >= 0.0 && now_ - above_since_ >= config_.autoscale.up_sustain_s &&
        active_stress < config_.stress.max) {
        for (NodeSlot& s : slots_) {
            if (s.stress_pool && !s.active) {
                s.active = true;
                break;
            }
        }
        above_since_ = -1.0;
    } else if (below_since_ >= 0.0 && now_ - below_since_ >= config_.autoscale.down_sustain_s &&
               active_stress > config_.stress.min) {
        // drain-free scale-down: only an empty stress node is removed
        for (auto it = slots_.rbegin(); it != slots_.rend(); ++it) {
            if (it->stress_pool && it->active) {
                if (it->pods.empty()) {
                    it->active = false;
                    it->taints.clear();
                    it->restart_times.clear();
                    it->pressure_until = -1.0;
                    below_since_ = -1.0;
                }
                break;
            }
        }
    }
}

int Simulator::resolve_taint_target(int node_id) const {
    if (node_id >= 0) {
        return node_id < static_cast<int>(slots_.size()) && slots_[static_cast<std::size_t>(node_id)].active
                   ? node_id
                   : -1;
    }
    // -1 targets the most-utilised active node at fire time
    int best = -1;
    double best_util = -1.0;
    for (const NodeSlot& s : slots_) {
        if (!s.active || !s.ready) continue;
        const double u = 0.5 * (static_cast<double>(s.cpu_alloc) / s.cpu_capacity +
                                static_cast<double>(s.mem_alloc) / s.mem_capacity);
        if (u > best_util) {
            best_util = u;
            best = s.node_id;
        }
    }
    return best;
}

std::vector<int> Simulator::feasible_candidates(const PodSpec& pod) const {
    return agmarl::feasible_candidates(snapshot(), pod);
}

void Simulator::bind(const ScheduleRequest& req, int node_id) {
    const std::vector<int> feasible = feasible_candidates(req.pod);
    if (std::find(feasible.begin(), feasible.end(), node_id) == feasible.end()) {
        throw std::logic_error("bind: node " + std::to_string(node_id) + " is not feasible for " + req.pod.pod_id);
    }
    NodeSlot& node = slots_[static_cast<std::size_t>(node_id)];
    node.cpu_alloc += req.pod.cpu_request_mcpu;
    node.mem_alloc += req.pod.mem_request_mib;
    node.pods.push_back(req.pod.pod_id);

    RunningPod pod;
    pod.spec = req.pod;
    pod.node_id = node_id;
    pod.bound_s = now_;
    pods_[req.pod.pod_id] = std::move(pod);
    running_by_app_[req.pod.app_label] += 1;

    stats_.binds.push_back({req.pod.pod_id, req.pod.app_label, req.pod.priority, node_id, req.arrival_s, now_});

    if (std::isfinite(req.pod.lifetime_s)) {
        SimEvent exit_ev;
        exit_ev.kind = SimEvent::Kind::PodExit;
        exit_ev.time = now_ + req.pod.lifetime_s;
        exit_ev.pod_id = req.pod.pod_id;
        push_event(std::move(exit_ev));
    }
    if (req.pod.fault.kind == FaultSpec::Kind::LivenessFail) {
        SimEvent probe;
        probe.kind = SimEvent::Kind::LivenessRestart;
        probe.time = now_ + req.pod.fault.after_s;
        probe.pod_id = req.pod.pod_id;
        push_event(std::move(probe));
    } else if (req.pod.fault.kind == FaultSpec::Kind::OomKill) {
        SimEvent spike;
        spike.kind = SimEvent::Kind::OomSpike;
        spike.time = now_ + req.pod.fault.after_s;
        spike.pod_id = req.pod.pod_id;
        push_event(std::move(spike));
    }
}

void Simulator::defer(const ScheduleRequest& req) {
    PendingPod p;
    p.req = req;
    p.next_retry = now_ + kRetryInterval;
    p.seq = pending_seq_++;
    pending_.push_back(std::move(p));
}

ClusterGraph Simulator::snapshot() const {
    ClusterGraph g;
    g.sim_time_s = now_;
    for (const NodeSlot& s : slots_) {
        if (!s.active) continue;
        NodeState n;
        n.node_id = s.node_id;
        n.cpu_capacity_mcpu = s.cpu_capacity;
        n.mem_capacity_mib = s.mem_capacity;
        n.cpu_allocated_mcpu = s.cpu_alloc;
        n.mem_allocated_mib = s.mem_alloc;
        n.memory_pressure = node_pressured(s);
        n.disk_pressure = false;
        n.ready = s.ready;
        n.taints = s.taints;
        n.restarts_window = node_restarts_window(s);
        n.cost_class = s.cost_class;
        n.pod_ids = s.pods;
        g.nodes.push_back(std::move(n));
    }
    g.stress = compute_stress(g, stress_weights_);
    return g;
}

int Simulator::running_count() const { return static_cast<int>(pods_.size()); }

int Simulator::running_count(const std::string& app) const {
    auto it = running_by_app_.find(app);
    return it == running_by_app_.end() ? 0 : it->second;
}

int Simulator::submitted_count(const std::string& app) const {
    auto it = submitted_by_app_.find(app);
    return it == submitted_by_app_.end() ? 0 : it->second;
}

double Simulator::family_restart_rate_per_min(const std::string& app) const {
    auto it = app_restart_times_.find(app);
    if (it == app_restart_times_.end()) return 0.0;
    int count = 0;
    for (auto r = it->second.rbegin(); r != it->second.rend(); ++r) {
        if (*r <= now_ - 60.0) break;
        ++count;
    }
    return static_cast<double>(count);
}

std::vector<int> feasible_candidates(const ClusterGraph& g, const PodSpec& pod) {
    std::vector<int> out;
    for (const NodeState& n : g.nodes) {
        if (!n.ready) continue;
        if (n.cpu_free_mcpu() < pod.cpu_request_mcpu) continue;
        if (n.mem_free_mib() < pod.mem_request_mib) continue;
        bool tolerated = true;
        for (const std::string& key : n.taints) {
            if (!pod.tolerates(key)) {
                tolerated = false;
                break;
            }
        }
        if (!tolerated) continue;
        out.push_back(n.node_id);
    }
    return out;
}

int baseline_policy(const ClusterGraph& g, const PodSpec& pod) {
    const std::vector<int> feasible = feasible_candidates(g, pod);
    if (feasible.empty()) {
        throw NoFeasibleNode();
    }
    int best = -1;
    double best_free = -1.0;
    for (int id : feasible) {
        const NodeState& n = *g.find(id);
        const double free_frac = 0.5 * (static_cast<double>(n.cpu_free_mcpu()) / n.cpu_capacity_mcpu +
                                        static_cast<double>(n.mem_free_mib()) / n.mem_capacity_mib);
        if (free_frac > best_free) {
            best_free = free_frac;
            best = id;
        }
    }
    return best;
}

bool admission_allows(const Simulator& sim, const PodSpec& pod, const AdmissionCapConfig& cfg,
                      StressRegime regime) {
    if (!cfg.enabled) return true;
    if (regime < StressRegime::High) return true;
    if (sim.family_restart_rate_per_min(pod.app_label) <= cfg.restart_rate_per_min) return true;
    const double cap = std::ceil(cfg.fraction * sim.submitted_count(pod.app_label));
    return sim.running_count(pod.app_label) < static_cast<int>(cap);
}

namespace {

nlohmann::json fault_to_json(const FaultSpec& f) {
    switch (f.kind) {
        case FaultSpec::Kind::None:
            return {{"kind", "None"}};
        case FaultSpec::Kind::LivenessFail:
            return {{"kind", "LivenessFail"}, {"after_s", f.after_s}};
        case FaultSpec::Kind::OomKill:
            return {{"kind", "OomKill"}, {"after_s", f.after_s}, {"spike_to_mib", f.spike_to_mib}};
    }
    return {};
}

FaultSpec fault_from_json(const nlohmann::json& j) {
    FaultSpec f;
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "None") {
        f.kind = FaultSpec::Kind::None;
    } else if (kind == "LivenessFail") {
        f.kind = FaultSpec::Kind::LivenessFail;
        f.after_s = j.at("after_s").get<double>();
    } else if (kind == "OomKill") {
        f.kind = FaultSpec::Kind::OomKill;
        f.after_s = j.at("after_s").get<double>();
        f.spike_to_mib = j.at("spike_to_mib").get<int>();
    } else {
        throw std::invalid_argument("unknown fault kind: " + kind);
    }
    return f;
}

PriorityClass priority_from_string(const std::string& s) {
    if (s == "Normal") return PriorityClass::Normal;
    if (s == "Batch") return PriorityClass::Batch;
    if (s == "Burst") return PriorityClass::Burst;
    throw std::invalid_argument("unknown priority class: " + s);
}

}  // namespace

nlohmann::json pod_to_json(const PodSpec& p) {
    nlohmann::json j;
    j["pod_id"] = p.pod_id;
    j["app_label"] = p.app_label;
    j["cpu_request_mcpu"] = p.cpu_request_mcpu;
    j["mem_request_mib"] = p.mem_request_mib;
    if (std::isfinite(p.lifetime_s)) {
        j["lifetime_s"] = p.lifetime_s;
    } else {
        j["lifetime_s"] = nullptr;
    }
    j["fault"] = fault_to_json(p.fault);
    j["priority"] = to_string(p.priority);
    j["tolerations"] = p.tolerations;
    return j;
}

PodSpec pod_from_json(const nlohmann::json& j) {
    PodSpec p;
    p.pod_id = j.at("pod_id").get<std::string>();
    p.app_label = j.at("app_label").get<std::string>();
    p.cpu_request_mcpu = j.at("cpu_request_mcpu").get<int>();
    p.mem_request_mib = j.at("mem_request_mib").get<int>();
    if (j.at("lifetime_s").is_null()) {
        p.lifetime_s = kInfiniteLifetime;
    } else {
        p.lifetime_s = j.at("lifetime_s").get<double>();
    }
    p.fault = fault_from_json(j.at("fault"));
    p.priority = priority_from_string(j.at("priority").get<std::string>());
    p.tolerations = j.at("tolerations").get<std::vector<std::string>>();
    return p;
}

nlohmann::json events_to_json(const std::vector<SimEvent>& evs) {
    nlohmann::json arr = nlohmann::json::array();
    for (const SimEvent& ev : evs) {
        nlohmann::json j;
        j["time"] = ev.time;
        j["kind"] = to_string(ev.kind);
        switch (ev.kind) {
            case SimEvent::Kind::PodArrival:
                j["pod"] = pod_to_json(ev.pod);
                break;
            case SimEvent::Kind::PodExit:
            case SimEvent::Kind::LivenessRestart:
            case SimEvent::Kind::OomSpike:
                j["pod_id"] = ev.pod_id;
                break;
            case SimEvent::Kind::TaintNode:
            case SimEvent::Kind::UntaintNode:
                j["node_id"] = ev.node_id;
                j["taint_key"] = ev.taint_key;
                break;
            case SimEvent::Kind::AutoscaleCheck:
                break;
        }
        arr.push_back(std::move(j));
    }
    return arr;
}

std::vector<SimEvent> events_from_json(const nlohmann::json& arr) {
    std::vector<SimEvent> out;
    for (const nlohmann::json& j : arr) {
        SimEvent ev;
        ev.time = j.at("time").get<double>();
        const std::string kind = j.at("kind").get<std::string>();
        if (kind == "PodArrival") {
            ev.kind = SimEvent::Kind::PodArrival;
            ev.pod = pod_from_json(j.at("pod"));
        } else if (kind == "PodExit") {
            ev.kind = SimEvent::Kind::PodExit;
            ev.pod_id = j.at("pod_id").get<std::string>();
        } else if (kind == "LivenessRestart") {
            ev.kind = SimEvent::Kind::LivenessRestart;
            ev.pod_id = j.at("pod_id").get<std::string>();
        } else if (kind == "OomSpike") {
            ev.kind = SimEvent::Kind::OomSpike;
            ev.pod_id = j.at("pod_id").get<std::string>();
        } else if (kind == "TaintNode") {
            ev.kind = SimEvent::Kind::TaintNode;
            ev.node_id = j.at("node_id").get<int>();
            ev.taint_key = j.at("taint_key").get<std::string>();
        } else if (kind == "UntaintNode") {
            ev.kind = SimEvent::Kind::UntaintNode;
            ev.node_id = j.at("node_id").get<int>();
            ev.taint_key = j.at("taint_key").get<std::string>();
        } else if (kind == "AutoscaleCheck") {
            ev.kind = SimEvent::Kind::AutoscaleCheck;
        } else {
            throw std::invalid_argument("unknown event kind: " + kind);
        }
        out.push_back(std::move(ev));
    }
    return out;
}

nlohmann::json snapshot_to_json(const ClusterGraph& g) {
    nlohmann::json j;
    j["sim_time_s"] = g.sim_time_s;
    j["stress"] = g.stress;
    nlohmann::json nodes = nlohmann::json::array();
    for (const NodeState& n : g.nodes) {
        nodes.push_back({{"node_id", n.node_id},
                         {"cpu_capacity_mcpu", n.cpu_capacity_mcpu},
                         {"mem_capacity_mib", n.mem_capacity_mib},
                         {"cpu_allocated_mcpu", n.cpu_allocated_mcpu},
                         {"mem_allocated_mib", n.mem_allocated_mib},
                         {"memory_pressure", n.memory_pressure},
                         {"disk_pressure", n.disk_pressure},
                         {"ready", n.ready},
                         {"taints", n.taints},
                         {"restarts_window", n.restarts_window},
                         {"cost_class", to_string(n.cost_class)},
                         {"pod_ids", n.pod_ids}});
    }
    j["nodes"] = std::move(nodes);
    return j;
}

ClusterGraph snapshot_from_json(const nlohmann::json& j) {
    ClusterGraph g;
    g.sim_time_s = j.at("sim_time_s").get<double>();
    g.stress = j.at("stress").get<double>();
    for (const nlohmann::json& nj : j.at("nodes")) {
        NodeState n;
        n.node_id = nj.at("node_id").get<int>();
        n.cpu_capacity_mcpu = nj.at("cpu_capacity_mcpu").get<int>();
        n.mem_capacity_mib = nj.at("mem_capacity_mib").get<int>();
        n.cpu_allocated_mcpu = nj.at("cpu_allocated_mcpu").get<int>();
        n.mem_allocated_mib = nj.at("mem_allocated_mib").get<int>();
        n.memory_pressure = nj.at("memory_pressure").get<bool>();
        n.disk_pressure = nj.at("disk_pressure").get<bool>();
        n.ready = nj.at("ready").get<bool>();
        n.taints = nj.at("taints").get<std::vector<std::string>>();
        n.restarts_window = nj.at("restarts_window").get<int>();
        n.cost_class = cost_class_from_string(nj.at("cost_class").get<std::string>());
        n.pod_ids = nj.at("pod_ids").get<std::vector<std::string>>();
        g.nodes.push_back(std::move(n));
    }
    return g;
}

}  // namespace agmarl
