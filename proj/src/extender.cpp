#include <agmarl/extender.hpp>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace agmarl {

ClusterGraph NodeRegistry::to_graph() const {
    std::vector<const NodeState*> ordered;
    ordered.reserve(nodes.size());
    std::set<int> ids;
    for (const auto& [name, state] : nodes) {
        if (!ids.insert(state.node_id).second) {
            throw std::invalid_argument("NodeRegistry: duplicate node_id " + std::to_string(state.node_id));
        }
        ordered.push_back(&state);
    }
    std::sort(ordered.begin(), ordered.end(),
              [](const NodeState* a, const NodeState* b) { return a->node_id < b->node_id; });
    ClusterGraph g;
    for (const NodeState* n : ordered) g.nodes.push_back(*n);
    if (!g.nodes.empty()) {
        g.stress = compute_stress(g);
    }
    return g;
}

NodeRegistry NodeRegistry::from_graph(const ClusterGraph& g, const std::string& name_prefix) {
    NodeRegistry reg;
    for (const NodeState& n : g.nodes) {
        reg.nodes[name_prefix + std::to_string(n.node_id)] = n;
    }
    return reg;
}

NodeRegistry registry_from_json(const nlohmann::json& j) {
    NodeRegistry reg;
    const ClusterGraph g = snapshot_from_json(j);
    return NodeRegistry::from_graph(g);
}

nlohmann::json registry_to_json(const NodeRegistry& reg) {
    return snapshot_to_json(reg.to_graph());
}

int parse_cpu_mcpu(const std::string& q) {
    if (q.empty()) throw std::invalid_argument("empty cpu quantity");
    try {
        if (q.back() == 'm') {
            return std::stoi(q.substr(0, q.size() - 1));
        }
        return static_cast<int>(std::lround(std::stod(q) * 1000.0));
    } catch (const std::exception&) {
        throw std::invalid_argument("bad cpu quantity: " + q);
    }
}

int parse_mem_mib(const std::string& q) {
    if (q.empty()) throw std::invalid_argument("empty memory quantity");
    try {
        auto suffixed = [&](const char* suffix) {
            const std::size_t n = std::string(suffix).size();
            return q.size() > n && q.compare(q.size() - n, n, suffix) == 0;
        };
        if (suffixed("Ki")) return static_cast<int>(std::lround(std::stod(q.substr(0, q.size() - 2)) / 1024.0));
        if (suffixed("Mi")) return static_cast<int>(std::lround(std::stod(q.substr(0, q.size() - 2))));
        if (suffixed("Gi")) return static_cast<int>(std::lround(std::stod(q.substr(0, q.size() - 2)) * 1024.0));
        return static_cast<int>(std::lround(std::stod(q) / (1024.0 * 1024.0)));  // plain bytes
    } catch (const std::invalid_argument&) {
        throw;
    } catch (const std::exception&) {
        throw std::invalid_argument("bad memory quantity: " + q);
    }
}

ExtenderArgs parse_extender_args(const nlohmann::json& body) {
    if (!body.is_object()) {
        throw std::invalid_argument("request body must be a JSON object");
    }
    ExtenderArgs args;
    if (!body.contains("Pod")) {
        throw std::invalid_argument("missing Pod");
    }
    const nlohmann::json& pod = body.at("Pod");
    if (pod.contains("metadata") && pod.at("metadata").contains("name")) {
        args.pod_name = pod.at("metadata").at("name").get<std::string>();
    }
    if (pod.contains("spec")) {
        const nlohmann::json& spec = pod.at("spec");
        if (spec.contains("containers")) {
            for (const nlohmann::json& c : spec.at("containers")) {
                if (!c.contains("resources") || !c.at("resources").contains("requests")) continue;
                const nlohmann::json& req = c.at("resources").at("requests");
                if (req.contains("cpu")) args.cpu_request_mcpu += parse_cpu_mcpu(req.at("cpu").get<std::string>());
                if (req.contains("memory")) args.mem_request_mib += parse_mem_mib(req.at("memory").get<std::string>());
            }
        }
        if (spec.contains("tolerations")) {
            for (const nlohmann::json& t : spec.at("tolerations")) {
                if (t.contains("key")) args.tolerations.push_back(t.at("key").get<std::string>());
            }
        }
    }
    if (body.contains("NodeNames") && !body.at("NodeNames").is_null()) {
        args.node_names = body.at("NodeNames").get<std::vector<std::string>>();
    } else if (body.contains("Nodes") && !body.at("Nodes").is_null()) {
        const nlohmann::json& nodes = body.at("Nodes");
        if (nodes.contains("items")) {
            for (const nlohmann::json& item : nodes.at("items")) {
                args.node_names.push_back(item.at("metadata").at("name").get<std::string>());
            }
        }
    }
    if (args.node_names.empty()) {
        throw std::invalid_argument("request names no nodes");
    }
    return args;
}

namespace {

PodSpec pod_from_args(const ExtenderArgs& args) {
    PodSpec p;
    p.pod_id = args.pod_name;
    p.app_label = args.pod_name;
    p.cpu_request_mcpu = args.cpu_request_mcpu;
    p.mem_request_mib = args.mem_request_mib;
    p.tolerations = args.tolerations;
    return p;
}

struct Scored {
    ClusterGraph graph;
    JointScores joint;
    std::map<std::string, const NodeState*> by_name;
};

Scored score_registry(const Model& model, const NodeRegistry& registry, const ExtenderConfig& cfg) {
    Scored s;
    s.graph = registry.to_graph();
    s.graph.stress = compute_stress(s.graph, cfg.stress_weights);
    s.joint = score_cluster(model, s.graph);
    for (const auto& [name, state] : registry.nodes) {
        s.by_name[name] = &state;
    }
    return s;
}

}  // namespace

nlohmann::json handle_filter(const nlohmann::json& body, const Model& model,
                             const NodeRegistry& registry, const ExtenderConfig& cfg) {
    const ExtenderArgs args = parse_extender_args(body);
    const PodSpec pod = pod_from_args(args);
    const Scored s = score_registry(model, registry, cfg);
    const StressRegime regime = regime_of(s.graph.stress);

    nlohmann::json surviving = nlohmann::json::array();
    nlohmann::json failed = nlohmann::json::object();
    for (const std::string& name : args.node_names) {
        auto it = s.by_name.find(name);
        if (it == s.by_name.end()) {
            failed[name] = "unknown-node";
            continue;
        }
        const NodeState& n = *it->second;
        if (!n.ready) {
            failed[name] = "not-ready";
            continue;
        }
        bool untolerated = false;
        for (const std::string& key : n.taints) {
            if (!pod.tolerates(key)) {
                untolerated = true;
                break;
            }
        }
        if (untolerated) {
            failed[name] = "untolerated-taint";
            continue;
        }
        if (n.cpu_free_mcpu() < pod.cpu_request_mcpu || n.mem_free_mib() < pod.mem_request_mib) {
            failed[name] = "insufficient-resources";
            continue;
        }
        if (regime >= StressRegime::High && s.joint.scores.at(n.node_id)[kObjFt] < cfg.ft_floor) {
            failed[name] = "low-fault-tolerance-score";
            continue;
        }
        surviving.push_back(name);
    }
    nlohmann::json out;
    out["NodeNames"] = std::move(surviving);
    out["FailedNodes"] = std::move(failed);
    out["Error"] = "";
    return out;
}

nlohmann::json handle_prioritize(const nlohmann::json& body, const Model& model,
                                 const NodeRegistry& registry, const ExtenderConfig& cfg) {
    const ExtenderArgs args = parse_extender_args(body);
    const Scored s = score_registry(model, registry, cfg);

    std::map<int, ActionScores> candidates;
    std::map<std::string, int> name_to_id;
    for (const std::string& name : args.node_names) {
        auto it = s.by_name.find(name);
        if (it == s.by_name.end()) continue;
        name_to_id[name] = it->second->node_id;
        candidates.emplace(it->second->node_id, s.joint.scores.at(it->second->node_id));
    }

    std::map<int, int> band;  // node_id -> score
    if (!candidates.empty()) {
        const LexTrace trace = lex_select_trace(candidates, s.graph.stress, cfg.selection);
        for (const auto& [id, scores] : candidates) band[id] = 1;
        for (int id : trace.stages[1]) band[id] = 4;
        for (int id : trace.stages[2]) band[id] = 7;
        band[trace.winner] = 10;
    }

    nlohmann::json out = nlohmann::json::array();
    for (const std::string& name : args.node_names) {
        nlohmann::json hp;
        hp["Host"] = name;
        auto it = name_to_id.find(name);
        hp["Score"] = it == name_to_id.end() ? 1 : band.at(it->second);
        out.push_back(std::move(hp));
    }
    return out;
}

struct ExtenderService::Impl {
    httplib::Server server;
};

ExtenderService::ExtenderService(std::shared_ptr<const Model> model, NodeRegistry registry,
                                 ExtenderConfig cfg, std::string weights_path)
    : model_(std::move(model)),
      registry_(std::move(registry)),
      cfg_(std::move(cfg)),
      weights_path_(std::move(weights_path)),
      impl_(std::make_unique<Impl>()) {}

ExtenderService::~ExtenderService() = default;

std::shared_ptr<const Model> ExtenderService::current_model() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return model_;
}

std::string ExtenderService::reload(const std::string& path) {
    const std::string target = path.empty() ? weights_path_ : path;
    try {
        auto fresh = std::make_shared<const Model>(load_model(target));
        std::lock_guard<std::mutex> lock(mutex_);
        model_ = std::move(fresh);
        return "";
    } catch (const std::exception& e) {
        return e.what();  // previous model keeps serving
    }
}

bool ExtenderService::serve(int port) {
    httplib::Server& server = impl_->server;

    auto json_handler = [this](bool filter_verb) {
        return [this, filter_verb](const httplib::Request& req, httplib::Response& res) {
            std::shared_ptr<const Model> model = current_model();
            try {
                const nlohmann::json body = nlohmann::json::parse(req.body);
                const nlohmann::json out = filter_verb ? handle_filter(body, *model, registry_, cfg_)
                                                       : handle_prioritize(body, *model, registry_, cfg_);
                res.set_content(out.dump(), "application/json");
            } catch (const std::exception& e) {
                res.status = 400;
                nlohmann::json err;
                err["Error"] = e.what();
                res.set_content(err.dump(), "application/json");
            }
        };
    };
    server.Post("/filter", json_handler(true));
    server.Post("/prioritize", json_handler(false));
    server.Post("/reload", [this](const httplib::Request& req, httplib::Response& res) {
        std::string path;
        if (!req.body.empty()) {
            try {
                const nlohmann::json body = nlohmann::json::parse(req.body);
                if (body.contains("path")) path = body.at("path").get<std::string>();
            } catch (const std::exception& e) {
                res.status = 400;
                res.set_content(nlohmann::json{{"status", "error"}, {"error", e.what()}}.dump(),
                                "application/json");
                return;
            }
        }
        const std::string err = reload(path);
        if (err.empty()) {
            res.set_content(nlohmann::json{{"status", "ok"}}.dump(), "application/json");
        } else {
            res.status = 500;
            res.set_content(nlohmann::json{{"status", "error"}, {"error", err}}.dump(), "application/json");
        }
    });
    server.Get("/healthz", [](const httplib::Request&, httplib::Response& res) {
        res.set_content("ok", "text/plain");
    });

    return server.listen("0.0.0.0", port);
}

void ExtenderService::stop() {
    impl_->server.stop();
}

}  // namespace agmarl
