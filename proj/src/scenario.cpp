#include <agmarl/scenario.hpp>

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace agmarl {

namespace {

PodSpec pod_template(const std::string& app, int cpu, int mem, double lifetime_s,
                     PriorityClass prio = PriorityClass::Normal) {
    PodSpec p;
    p.app_label = app;
    p.cpu_request_mcpu = cpu;
    p.mem_request_mib = mem;
    p.lifetime_s = lifetime_s;
    p.priority = prio;
    return p;
}

}  // namespace

ScenarioScript scenario_one() {
    ScenarioScript s;
    s.name = "s1";

    ScenarioPhase p1;
    p1.name = "I";
    p1.start_min = 0;
    p1.end_min = 10;
    p1.workloads.push_back({100, pod_template("nginx-baseline", 100, 128, kInfiniteLifetime), 0.0, 0.0, "Low"});
    s.phases.push_back(std::move(p1));

    ScenarioPhase p2;
    p2.name = "II";
    p2.start_min = 10;
    p2.end_min = 20;
    PodSpec growth = pod_template("app-growth", 250, 512, 600.0);
    growth.fault.kind = FaultSpec::Kind::OomKill;
    growth.fault.after_s = 300.0;  // latent spike after 5 min
    growth.fault.spike_to_mib = 1024;
    p2.workloads.push_back({75, std::move(growth), 0.0, 0.0, "Medium"});
    s.phases.push_back(std::move(p2));

    ScenarioPhase p3;
    p3.name = "III";
    p3.start_min = 20;
    p3.end_min = 30;
    p3.workloads.push_back({150, pod_template("peak-demand", 500, 800, 240.0), 0.5, 0.5, "High"});
    s.phases.push_back(std::move(p3));

    ScenarioPhase p4;
    p4.name = "IV";
    p4.start_min = 30;
    p4.end_min = 40;
    p4.workloads.push_back({20, pod_template("batch-jobs", 1500, 2048, 300.0, PriorityClass::Batch), 0.0, 0.0, "Extreme"});
    s.phases.push_back(std::move(p4));

    return s;
}

ScenarioScript scenario_two() {
    ScenarioScript s;
    s.name = "s2";

    ScenarioPhase p1;
    p1.name = "I";
    p1.start_min = 0;
    p1.end_min = 30;
    PodSpec liveness = pod_template("liveness-fail", 100, 128, kInfiniteLifetime);
    liveness.fault.kind = FaultSpec::Kind::LivenessFail;
    liveness.fault.after_s = 60.0;
    p1.workloads.push_back({150, std::move(liveness), 0.0, 0.0, "High"});
    PodSpec oom = pod_template("oom-fail", 250, 512, kInfiniteLifetime);
    oom.fault.kind = FaultSpec::Kind::OomKill;
    oom.fault.after_s = 60.0;
    oom.fault.spike_to_mib = 2048;
    p1.workloads.push_back({120, std::move(oom), 0.0, 0.0, "High"});
    s.phases.push_back(std::move(p1));

    ScenarioPhase p2;
    p2.name = "II";
    p2.start_min = 15;
    p2.end_min = 30;
    p2.workloads.push_back({50, pod_template("burst-batch", 1000, 1024, 90.0, PriorityClass::Burst), 0.0, 0.0, "Extreme"});
    s.phases.push_back(std::move(p2));

    ScenarioPhase p3;
    p3.name = "III";
    p3.start_min = 30;
    p3.end_min = 45;
    p3.injections.push_back({30.0, SimEvent::Kind::TaintNode, -1, "failure-sim"});
    s.phases.push_back(std::move(p3));

    return s;
}

double scenario_end_s(const ScenarioScript& script) {
    double end = 0.0;
    for (const ScenarioPhase& p : script.phases) {
        end = std::max(end, p.end_min * 60.0);
    }
    return end;
}

std::vector<SimEvent> expand_script(const ScenarioScript& script, std::uint64_t seed) {
    Rng rng(derive_seed(seed, kSeedEnv));
    std::vector<SimEvent> events;
    for (const ScenarioPhase& phase : script.phases) {
        const double start_s = phase.start_min * 60.0;
        const double span_s = (phase.end_min - phase.start_min) * 60.0;
        for (std::size_t w = 0; w < phase.workloads.size(); ++w) {
            const ScenarioWorkload& wl = phase.workloads[w];
            if (wl.count <= 0) {
                throw std::invalid_argument("scenario workload count must be positive");
            }
            const double slot = span_s / wl.count;
            for (int k = 0; k < wl.count; ++k) {
                PodSpec pod = wl.pod;
                pod.pod_id = wl.pod.app_label + "-" + std::to_string(k);
                if (wl.cpu_jitter_frac > 0.0) {
                    pod.cpu_request_mcpu = std::max(
                        1, static_cast<int>(std::lround(pod.cpu_request_mcpu *
                                                        (1.0 + wl.cpu_jitter_frac * rng.uniform(-1.0, 1.0)))));
                }
                if (wl.mem_jitter_frac > 0.0) {
                    pod.mem_request_mib = std::max(
                        1, static_cast<int>(std::lround(pod.mem_request_mib *
                                                        (1.0 + wl.mem_jitter_frac * rng.uniform(-1.0, 1.0)))));
                }
                SimEvent ev;
                ev.kind = SimEvent::Kind::PodArrival;
                ev.time = start_s + (k + rng.uniform()) * slot;
                ev.pod = std::move(pod);
                events.push_back(std::move(ev));
            }
        }
        for (const ScenarioInjection& inj : phase.injections) {
            SimEvent ev;
            ev.kind = inj.kind;
            ev.time = inj.at_min * 60.0;
            ev.node_id = inj.node_id;
            ev.taint_key = inj.taint_key;
            events.push_back(std::move(ev));
        }
    }
    std::sort(events.begin(), events.end(), [](const SimEvent& a, const SimEvent& b) {
        return a.time < b.time;
    });
    return events;
}

namespace {

void record_sample(MetricsFrame& frame, const Simulator& sim,
                   const std::map<std::string, const PodSpec*>& pod_specs,
                   std::map<int, double>& node_cost, double interval_s) {
    const ClusterGraph g = sim.snapshot();
    ClusterSample cs;
    cs.time_s = sim.sim_time();
    cs.stress = g.stress;
    cs.running = sim.running_count();
    cs.pending = sim.pending_count();
    cs.deferred_admissions = sim.stats().deferred_admissions;
    // cost accrual: sum over samples of interval x active node costs
    double rate_sum = 0.0;
    for (const NodeState& n : g.nodes) {
        rate_sum += sim.costs().of(n.cost_class);
    }
    const double prev = frame.samples.empty() ? 0.0 : frame.samples.back().cost_accrued;
    cs.cost_accrued = prev + interval_s / 3600.0 * rate_sum;
    for (const NodeState& n : g.nodes) {
        NodeSample ns;
        ns.node_id = n.node_id;
        ns.cpu_req_mcpu = n.cpu_allocated_mcpu;
        ns.mem_req_mib = n.mem_allocated_mib;
        ns.cpu_cap_mcpu = n.cpu_capacity_mcpu;
        ns.mem_cap_mib = n.mem_capacity_mib;
        ns.memory_pressure = n.memory_pressure;
        auto rit = sim.stats().restarts_by_node.find(n.node_id);
        ns.restarts_cum = rit == sim.stats().restarts_by_node.end() ? 0 : rit->second;
        auto fit = sim.stats().failures_by_node.find(n.node_id);
        ns.failures_cum = fit == sim.stats().failures_by_node.end() ? 0 : fit->second;
        node_cost[n.node_id] += interval_s / 3600.0 * sim.costs().of(n.cost_class);
        ns.cost_accrued = node_cost[n.node_id];
        for (const std::string& pod_id : n.pod_ids) {
            auto it = pod_specs.find(pod_id);
            if (it == pod_specs.end()) continue;
            ns.pods_by_app[it->second->app_label] += 1;
            ns.cpu_by_app_mcpu[it->second->app_label] += it->second->cpu_request_mcpu;
        }
        cs.nodes.push_back(std::move(ns));
    }
    frame.samples.push_back(std::move(cs));
}

}  // namespace

MetricsFrame run_scenario(const ScenarioScript& script, const std::vector<SimEvent>& schedule,
                          PolicyKind kind, const Model* model, const RunConfig& rc,
                          std::uint64_t seed) {
    constexpr double kSampleInterval = 10.0;
    if (kind == PolicyKind::Agmarl) {
        if (model == nullptr) {
            throw std::invalid_argument("run_scenario: AGMARL policy requires a model");
        }
        const int max_node = rc.cluster.baseline.count + rc.cluster.stress.max;
        if (model->agent_count() < max_node) {
            throw std::invalid_argument("run_scenario: model has " + std::to_string(model->agent_count()) +
                                        " agents but the cluster may grow to " + std::to_string(max_node) +
                                        " nodes");
        }
    }

    MetricsFrame frame;
    frame.scenario = script.name;
    frame.policy = kind == PolicyKind::Agmarl ? "agmarl" : "baseline";
    frame.seed = seed;
    frame.duration_s = scenario_end_s(script);
    frame.phases = script.phases;

    std::map<std::string, const PodSpec*> pod_specs;
    std::map<std::string, double> arrivals;
    std::vector<std::string> app_order;
    for (const SimEvent& ev : schedule) {
        if (ev.kind != SimEvent::Kind::PodArrival) continue;
        pod_specs[ev.pod.pod_id] = &ev.pod;
        arrivals[ev.pod.pod_id] = ev.time;
        if (std::find(app_order.begin(), app_order.end(), ev.pod.app_label) == app_order.end()) {
            app_order.push_back(ev.pod.app_label);
        }
    }
    frame.apps = app_order;

    Simulator env(rc.cluster, rc.costs, rc.stress_weights);
    env.load_schedule(schedule);

    std::map<int, double> node_cost;
    std::set<int> seen_nodes;
    env.set_sampler(kSampleInterval, [&](const Simulator& sim) {
        record_sample(frame, sim, pod_specs, node_cost, kSampleInterval);
        for (const NodeSample& ns : frame.samples.back().nodes) {
            seen_nodes.insert(ns.node_id);
        }
    });

    const double end_s = frame.duration_s;
    while (std::optional<ScheduleRequest> req = env.next_decision(end_s)) {
        const ClusterGraph g = env.snapshot();
        const std::vector<int> feasible = feasible_candidates(g, req->pod);
        if (feasible.empty()) {
            env.defer(*req);
            continue;
        }
        if (kind == PolicyKind::Baseline) {
            env.bind(*req, baseline_policy(g, req->pod));
            continue;
        }
        if (!admission_allows(env, req->pod, rc.admission, regime_of(g.stress))) {
            env.note_deferred_admission();
            env.defer(*req);
            continue;
        }
        const JointScores joint = score_cluster(*model, g);
        std::map<int, ActionScores> cand;
        for (int id : feasible) cand.emplace(id, joint.scores.at(id));
        env.bind(*req, lex_select(cand, g.stress, rc.selection));
    }
    env.run_until(end_s);

    // outcomes: every arrival, bound or not
    std::map<std::string, const BindRecord*> bound;
    for (const BindRecord& b : env.stats().binds) {
        bound[b.pod_id] = &b;
    }
    for (const auto& [pod_id, spec] : pod_specs) {
        PodOutcome o;
        o.pod_id = pod_id;
        o.app = spec->app_label;
        o.priority = spec->priority;
        o.arrival_s = arrivals.at(pod_id);
        auto it = bound.find(pod_id);
        if (it != bound.end()) {
            o.bound_s = it->second->bound_s;
            o.node_id = it->second->node_id;
        }
        frame.outcomes.push_back(std::move(o));
    }

    frame.restarts_by_app_node = env.stats().restarts_by_app_node;
    frame.failures_by_app_node = env.stats().failures_by_app_node;
    frame.deferred_admissions = env.stats().deferred_admissions;
    frame.total_cost = frame.samples.empty() ? 0.0 : frame.samples.back().cost_accrued;

    const ClusterGraph final_g = env.snapshot();
    for (const NodeState& n : final_g.nodes) {
        seen_nodes.insert(n.node_id);
        for (const std::string& pod_id : n.pod_ids) {
            auto it = pod_specs.find(pod_id);
            if (it != pod_specs.end()) {
                frame.final_pods_by_app_node[it->second->app_label][n.node_id] += 1;
            }
        }
    }
    frame.node_ids.assign(seen_nodes.begin(), seen_nodes.end());
    return frame;
}

std::pair<MetricsFrame, MetricsFrame> run_ab(const ScenarioScript& script, const Model& model,
                                             const RunConfig& rc, std::uint64_t seed) {
    const std::vector<SimEvent> schedule = expand_script(script, seed);
    MetricsFrame agmarl = run_scenario(script, schedule, PolicyKind::Agmarl, &model, rc, seed);
    MetricsFrame baseline = run_scenario(script, schedule, PolicyKind::Baseline, nullptr, rc, seed);
    return {std::move(agmarl), std::move(baseline)};
}

}  // namespace agmarl
