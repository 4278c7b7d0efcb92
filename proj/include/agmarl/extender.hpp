#pragma once

#include <agmarl/agent.hpp>
#include <agmarl/lexico.hpp>
#include <agmarl/sim.hpp>

#include <nlohmann/json_fwd.hpp>

#include <map>
#include <memory>
#include <mutex>
#include <string>

namespace agmarl {

// Node-name registry backing the service; tests feed it from the simulator,
// a deployment would plug in a live state source.
struct NodeRegistry {
    std::map<std::string, NodeState> nodes;

    /// Sorted by node_id; node ids must be unique.
    ClusterGraph to_graph() const;
    static NodeRegistry from_graph(const ClusterGraph& g, const std::string& name_prefix = "node");
};

NodeRegistry registry_from_json(const nlohmann::json& j);
nlohmann::json registry_to_json(const NodeRegistry& reg);

struct ExtenderConfig {
    double ft_floor = 0.05;  // score_FT filter floor under High/Extreme stress
    SelectionConfig selection;
    CostTable costs;
    StressWeights stress_weights;
};

// Parsed POST body of the scheduler-extender verbs. Wire casing follows the
// upstream convention: "Pod", "Nodes", "NodeNames".
struct ExtenderArgs {
    std::string pod_name;
    int cpu_request_mcpu = 0;
    int mem_request_mib = 0;
    std::vector<std::string> tolerations;
    std::vector<std::string> node_names;
};

/// Throws std::invalid_argument on malformed bodies (mapped to HTTP 400).
ExtenderArgs parse_extender_args(const nlohmann::json& body);

/// Kubernetes resource quantities: "250m" / "1.5" CPU, "128Mi" / "1Gi" memory.
int parse_cpu_mcpu(const std::string& q);
int parse_mem_mib(const std::string& q);

/// Filter verb: drops infeasible nodes and, when the regime is High or worse,
/// nodes whose actor score_FT falls below the configured floor. The response
/// carries "NodeNames", "FailedNodes" (name -> reason) and "Error".
nlohmann::json handle_filter(const nlohmann::json& body, const Model& model,
                             const NodeRegistry& registry, const ExtenderConfig& cfg);

/// Prioritize verb: lexicographic survivor depth mapped onto the integer
/// band {1,4,7,10}; the winner scores 10. Response is a host-priority list
/// in request order with "Host" / "Score" entries.
nlohmann::json handle_prioritize(const nlohmann::json& body, const Model& model,
                                 const NodeRegistry& registry, const ExtenderConfig& cfg);

// HTTP service: POST /filter, POST /prioritize, POST /reload, GET /healthz.
// Handlers run against an immutable (model, registry) pair swapped atomically
// on reload; a failed reload keeps the previous model serving.
class ExtenderService {
public:
    ExtenderService(std::shared_ptr<const Model> model, NodeRegistry registry, ExtenderConfig cfg,
                    std::string weights_path);
    ~ExtenderService();

    /// Blocks until stop(); returns false if the port cannot be bound.
    bool serve(int port);
    void stop();

    /// Swaps the model from `path` (empty: the original weights path).
    /// Returns an error message on failure, empty string on success.
    std::string reload(const std::string& path);

    std::shared_ptr<const Model> current_model() const;

private:
    mutable std::mutex mutex_;
    std::shared_ptr<const Model> model_;
    NodeRegistry registry_;
    ExtenderConfig cfg_;
    std::string weights_path_;
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace agmarl
