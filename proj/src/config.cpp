#include <agmarl/config.hpp>

#include <nlohmann/json.hpp>

#include <fstream>
#include <set>

namespace agmarl {

namespace {

void check_keys(const nlohmann::json& j, const std::set<std::string>& known, const std::string& where) {
    if (!j.is_object()) {
        throw ConfigError(where + ": expected an object");
    }
    for (const auto& [key, value] : j.items()) {
        if (!known.count(key)) {
            throw ConfigError(where + ": unknown key \"" + key + "\"");
        }
    }
}

template <typename T>
void get_if(const nlohmann::json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

ObjectiveOrder order_from_json(const nlohmann::json& j, const std::string& where) {
    const std::vector<std::string> names = j.get<std::vector<std::string>>();
    if (names.size() != 3) {
        throw ConfigError(where + ": ordering must list exactly three objectives");
    }
    ObjectiveOrder order{};
    std::set<Objective> seen;
    for (std::size_t i = 0; i < 3; ++i) {
        order[i] = objective_from_string(names[i]);
        seen.insert(order[i]);
    }
    if (seen.size() != 3) {
        throw ConfigError(where + ": ordering must be a permutation of FT/UTIL/COST");
    }
    return order;
}

Hyperparams hyperparams_from_json(const nlohmann::json& j) {
    check_keys(j, {"gamma", "tau", "bonus", "batch_size", "buffer_capacity", "actor_lr", "critic_lr",
                   "noise_sigma", "noise_decay", "episodes", "steps"},
               "hyperparams");
    Hyperparams hp;
    get_if(j, "gamma", hp.gamma);
    get_if(j, "tau", hp.tau);
    get_if(j, "bonus", hp.bonus);
    get_if(j, "batch_size", hp.batch_size);
    get_if(j, "buffer_capacity", hp.buffer_capacity);
    get_if(j, "actor_lr", hp.actor_lr);
    get_if(j, "critic_lr", hp.critic_lr);
    get_if(j, "noise_sigma", hp.noise_sigma);
    get_if(j, "noise_decay", hp.noise_decay);
    get_if(j, "episodes", hp.episodes);
    get_if(j, "steps", hp.steps);
    if (!(hp.gamma >= 0.0 && hp.gamma < 1.0)) throw ConfigError("hyperparams: gamma must be in [0,1)");
    if (!(hp.tau > 0.0 && hp.tau <= 1.0)) throw ConfigError("hyperparams: tau must be in (0,1]");
    if (hp.bonus < 0.0) throw ConfigError("hyperparams: bonus must be >= 0");
    if (hp.batch_size <= 0 || hp.episodes <= 0 || hp.steps <= 0) {
        throw ConfigError("hyperparams: batch_size/episodes/steps must be positive");
    }
    if (hp.buffer_capacity == 0) throw ConfigError("hyperparams: buffer_capacity must be positive");
    return hp;
}

SelectionConfig selection_from_json(const nlohmann::json& j) {
    check_keys(j, {"delta_lex", "ordering"}, "selection");
    SelectionConfig sc;
    get_if(j, "delta_lex", sc.delta_lex);
    if (!(sc.delta_lex >= 0.0 && sc.delta_lex < 1.0)) {
        throw ConfigError("selection: delta_lex must be in [0,1)");
    }
    if (j.contains("ordering")) {
        const nlohmann::json& o = j.at("ordering");
        check_keys(o, {"Low", "Medium", "High", "Extreme"}, "selection.ordering");
        if (o.contains("Low")) sc.ordering.low = order_from_json(o.at("Low"), "selection.ordering.Low");
        if (o.contains("Medium")) sc.ordering.medium = order_from_json(o.at("Medium"), "selection.ordering.Medium");
        if (o.contains("High")) sc.ordering.high = order_from_json(o.at("High"), "selection.ordering.High");
        if (o.contains("Extreme")) sc.ordering.extreme = order_from_json(o.at("Extreme"), "selection.ordering.Extreme");
    }
    return sc;
}

ClusterConfig cluster_from_json(const nlohmann::json& j) {
    check_keys(j, {"baseline_pool", "stress_pool", "autoscale"}, "cluster");
    ClusterConfig cc;
    if (j.contains("baseline_pool")) {
        const nlohmann::json& b = j.at("baseline_pool");
        check_keys(b, {"count", "cpu_mcpu", "mem_mib", "cost_class"}, "cluster.baseline_pool");
        get_if(b, "count", cc.baseline.count);
        get_if(b, "cpu_mcpu", cc.baseline.cpu_mcpu);
        get_if(b, "mem_mib", cc.baseline.mem_mib);
        if (b.contains("cost_class")) cc.baseline.cost_class = cost_class_from_string(b.at("cost_class"));
    }
    if (j.contains("stress_pool")) {
        const nlohmann::json& s = j.at("stress_pool");
        check_keys(s, {"min", "max", "cpu_mcpu", "mem_mib", "cost_class"}, "cluster.stress_pool");
        get_if(s, "min", cc.stress.min);
        get_if(s, "max", cc.stress.max);
        get_if(s, "cpu_mcpu", cc.stress.cpu_mcpu);
        get_if(s, "mem_mib", cc.stress.mem_mib);
        if (s.contains("cost_class")) cc.stress.cost_class = cost_class_from_string(s.at("cost_class"));
    }
    if (j.contains("autoscale")) {
        const nlohmann::json& a = j.at("autoscale");
        check_keys(a, {"enabled", "up_threshold", "up_sustain_s", "down_threshold", "down_sustain_s",
                       "check_interval_s"},
                   "cluster.autoscale");
        get_if(a, "enabled", cc.autoscale.enabled);
        get_if(a, "up_threshold", cc.autoscale.up_threshold);
        get_if(a, "up_sustain_s", cc.autoscale.up_sustain_s);
        get_if(a, "down_threshold", cc.autoscale.down_threshold);
        get_if(a, "down_sustain_s", cc.autoscale.down_sustain_s);
        get_if(a, "check_interval_s", cc.autoscale.check_interval_s);
    }
    if (cc.baseline.count <= 0 || cc.baseline.cpu_mcpu <= 0 || cc.baseline.mem_mib <= 0) {
        throw ConfigError("cluster: baseline pool needs positive count and capacities");
    }
    if (cc.stress.min < 0 || cc.stress.min > cc.stress.max) {
        throw ConfigError("cluster: stress pool bounds invalid (need 0 <= min <= max)");
    }
    return cc;
}

}  // namespace

GlobalConfig config_from_json(const nlohmann::json& j) {
    check_keys(j, {"hyperparams", "selection", "cluster", "cost_table", "stress_weights",
                   "admission_cap", "output_dir"},
               "config");
    GlobalConfig cfg;
    if (j.contains("hyperparams")) cfg.hyperparams = hyperparams_from_json(j.at("hyperparams"));
    if (j.contains("selection")) cfg.selection = selection_from_json(j.at("selection"));
    if (j.contains("cluster")) cfg.cluster = cluster_from_json(j.at("cluster"));
    if (j.contains("cost_table")) {
        const nlohmann::json& c = j.at("cost_table");
        check_keys(c, {"Standard", "HighMem", "Spot"}, "cost_table");
        get_if(c, "Standard", cfg.cost_table.standard);
        get_if(c, "HighMem", cfg.cost_table.high_mem);
        get_if(c, "Spot", cfg.cost_table.spot);
        if (cfg.cost_table.standard <= 0.0 || cfg.cost_table.high_mem <= 0.0 || cfg.cost_table.spot <= 0.0) {
            throw ConfigError("cost_table: every configured cost must be positive");
        }
    }
    if (j.contains("stress_weights")) {
        const nlohmann::json& w = j.at("stress_weights");
        check_keys(w, {"utilisation", "pressure", "restarts"}, "stress_weights");
        get_if(w, "utilisation", cfg.stress_weights.utilisation);
        get_if(w, "pressure", cfg.stress_weights.pressure);
        get_if(w, "restarts", cfg.stress_weights.restarts);
        if (cfg.stress_weights.utilisation < 0.0 || cfg.stress_weights.pressure < 0.0 ||
            cfg.stress_weights.restarts < 0.0) {
            throw ConfigError("stress_weights: weights must be >= 0");
        }
    }
    if (j.contains("admission_cap")) {
        const nlohmann::json& a = j.at("admission_cap");
        check_keys(a, {"enabled", "fraction", "restart_rate_per_min"}, "admission_cap");
        get_if(a, "enabled", cfg.admission_cap.enabled);
        get_if(a, "fraction", cfg.admission_cap.fraction);
        get_if(a, "restart_rate_per_min", cfg.admission_cap.restart_rate_per_min);
        if (!(cfg.admission_cap.fraction > 0.0 && cfg.admission_cap.fraction <= 1.0)) {
            throw ConfigError("admission_cap: fraction must be in (0,1]");
        }
    }
    if (j.contains("output_dir")) cfg.output_dir = j.at("output_dir").get<std::string>();
    return cfg;
}

GlobalConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) {
        throw ConfigError("cannot open config: " + path);
    }
    nlohmann::json j;
    try {
        is >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config parse error in " + path + ": " + e.what());
    }
    return config_from_json(j);
}

TrainSetup GlobalConfig::train_setup() const {
    TrainSetup s;
    s.hp = hyperparams;
    s.selection = selection;
    s.cluster = cluster;
    s.costs = cost_table;
    s.stress_weights = stress_weights;
    s.admission = admission_cap;
    return s;
}

RunConfig GlobalConfig::run_config() const {
    RunConfig r;
    r.cluster = cluster;
    r.costs = cost_table;
    r.stress_weights = stress_weights;
    r.selection = selection;
    r.admission = admission_cap;
    return r;
}

}  // namespace agmarl
