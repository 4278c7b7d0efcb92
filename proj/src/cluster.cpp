#include <agmarl/cluster.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace agmarl {

const char* to_string(CostClass c) {
    switch (c) {
        case CostClass::Standard: return "Standard";
        case CostClass::HighMem: return "HighMem";
        case CostClass::Spot: return "Spot";
    }
    return "?";
}

CostClass cost_class_from_string(const std::string& s) {
    if (s == "Standard") return CostClass::Standard;
    if (s == "HighMem") return CostClass::HighMem;
    if (s == "Spot") return CostClass::Spot;
    throw std::invalid_argument("unknown cost class: " + s);
}

const char* to_string(PriorityClass p) {
    switch (p) {
        case PriorityClass::Normal: return "Normal";
        case PriorityClass::Batch: return "Batch";
        case PriorityClass::Burst: return "Burst";
    }
    return "?";
}

double CostTable::of(CostClass c) const {
    double v = 0.0;
    switch (c) {
        case CostClass::Standard: v = standard; break;
        case CostClass::HighMem: v = high_mem; break;
        case CostClass::Spot: v = spot; break;
    }
    if (v <= 0.0) {
        throw std::invalid_argument(std::string("cost class not configured: ") + to_string(c));
    }
    return v;
}

bool PodSpec::tolerates(const std::string& taint_key) const {
    return std::find(tolerations.begin(), tolerations.end(), taint_key) != tolerations.end();
}

const NodeState* ClusterGraph::find(int node_id) const {
    const int idx = index_of(node_id);
    return idx < 0 ? nullptr : &nodes[idx];
}

int ClusterGraph::index_of(int node_id) const {
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (nodes[i].node_id == node_id) return static_cast<int>(i);
    }
    return -1;
}

double metric_ft(bool pressured, double restarts) {
    if (pressured) return 0.0;
    return 1.0 / (1.0 + std::log(1.0 + restarts));
}

double metric_ft(const NodeState& node) {
    return metric_ft(node.memory_pressure, static_cast<double>(node.restarts_window));
}

double metric_util(const NodeState& node) {
    if (node.cpu_capacity_mcpu <= 0 || node.mem_capacity_mib <= 0) {
        throw std::invalid_argument("metric_util: node has zero capacity");
    }
    const double cpu = static_cast<double>(node.cpu_allocated_mcpu) / node.cpu_capacity_mcpu;
    const double mem = static_cast<double>(node.mem_allocated_mib) / node.mem_capacity_mib;
    return 0.5 * (cpu + mem);
}

double metric_cost(const NodeState& node, const CostTable& costs) {
    return 1.0 / costs.of(node.cost_class);
}

double compute_stress(const ClusterGraph& g, const StressWeights& w) {
    if (g.nodes.empty()) {
        throw std::invalid_argument("compute_stress: empty cluster");
    }
    double util_sum = 0.0;
    double pressured = 0.0;
    double restarts = 0.0;
    for (const NodeState& n : g.nodes) {
        util_sum += metric_util(n);
        if (n.memory_pressure || n.disk_pressure) pressured += 1.0;
        restarts += static_cast<double>(n.restarts_window);
    }
    const double n = static_cast<double>(g.nodes.size());
    const double restart_term = std::min(1.0, restarts / (10.0 * n));
    const double raw = w.utilisation * (util_sum / n) + w.pressure * (pressured / n) + w.restarts * restart_term;
    return std::clamp(raw, 0.0, 1.0);
}

RawFeatures raw_features(const NodeState& node, const ClusterGraph& g) {
    int max_cpu = 0;
    int max_mem = 0;
    for (const NodeState& n : g.nodes) {
        max_cpu = std::max(max_cpu, n.cpu_capacity_mcpu);
        max_mem = std::max(max_mem, n.mem_capacity_mib);
    }
    constexpr double kRestartCap = 100.0;
    const double r = std::min(static_cast<double>(node.restarts_window), kRestartCap);

    RawFeatures x;
    x[0] = static_cast<double>(node.cpu_allocated_mcpu) / node.cpu_capacity_mcpu;
    x[1] = static_cast<double>(node.mem_allocated_mib) / node.mem_capacity_mib;
    x[2] = max_cpu > 0 ? static_cast<double>(node.cpu_capacity_mcpu) / max_cpu : 0.0;
    x[3] = max_mem > 0 ? static_cast<double>(node.mem_capacity_mib) / max_mem : 0.0;
    x[4] = node.memory_pressure ? 1.0 : 0.0;
    x[5] = node.disk_pressure ? 1.0 : 0.0;
    x[6] = node.ready ? 1.0 : 0.0;
    x[7] = std::min(1.0, node.taint_count() / 5.0);
    x[8] = std::log(1.0 + r) / std::log(1.0 + kRestartCap);
    x[9] = g.stress;
    return x;
}

Eigen::MatrixXd raw_feature_matrix(const ClusterGraph& g) {
    Eigen::MatrixXd feats(kRawFeatureDim, static_cast<Eigen::Index>(g.nodes.size()));
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        feats.col(static_cast<Eigen::Index>(i)) = raw_features(g.nodes[i], g);
    }
    return feats;
}

}  // namespace agmarl
