#include <agmarl/commands.hpp>

#include <agmarl/analysis.hpp>
#include <agmarl/config.hpp>
#include <agmarl/extender.hpp>
#include <agmarl/weights_io.hpp>

#include <nlohmann/json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace agmarl {

bool log_enabled() {
    const char* v = std::getenv("AGMARL_LOG");
    return v != nullptr && std::string(v) != "" && std::string(v) != "quiet";
}

void log_info(const std::string& msg) {
    if (log_enabled()) {
        std::cerr << "[agmarl] " << msg << "\n";
    }
}

int cmd_train(const std::string& config_path, std::uint64_t seed, const std::string& out_weights) {
    GlobalConfig cfg;
    try {
        cfg = load_config(config_path);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    }
    try {
        Model model = make_model(cfg.max_nodes(), seed);
        Trainer trainer(model, cfg.train_setup(), seed);
        log_info("training " + std::to_string(cfg.hyperparams.episodes) + " episodes on up to " +
                 std::to_string(cfg.max_nodes()) + " nodes");
        const TrainResult result = trainer.run();
        save_model(model, out_weights);
        write_train_log_csv(out_weights + ".train.csv", result.log);
        if (!result.log.empty()) {
            const EpisodeLog& last = result.log.back();
            log_info("final episode mean reward " + std::to_string(last.mean_reward) + ", mse " +
                     std::to_string(last.mse_term));
        }
        return kExitOk;
    } catch (const TrainingDivergence& e) {
        std::cerr << "training diverged: " << e.what() << "\n";
        return kExitDiverged;
    } catch (const std::exception& e) {
        std::cerr << "train failed: " << e.what() << "\n";
        return kExitConfig;
    }
}

int cmd_evaluate(int scenario, const std::string& weights_path, std::uint64_t seed,
                 const std::string& outdir, const std::string& config_path, int n_seeds,
                 double time_scale) {
    if (scenario != 1 && scenario != 2) {
        std::cerr << "scenario must be 1 or 2\n";
        return kExitUsage;
    }
    if (n_seeds < 1) {
        std::cerr << "--seeds must be >= 1\n";
        return kExitUsage;
    }
    (void)time_scale;
    GlobalConfig cfg;
    try {
        if (!config_path.empty()) cfg = load_config(config_path);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    }
    try {
        const Model model = load_model(weights_path);
        std::filesystem::create_directories(outdir);
        const ScenarioScript script = scenario == 1 ? scenario_one() : scenario_two();
        for (int k = 0; k < n_seeds; ++k) {
            const std::uint64_t s = seed + static_cast<std::uint64_t>(k);
            log_info("running " + script.name + " A/B with seed " + std::to_string(s));
            const auto [agmarl_frame, baseline_frame] = run_ab(script, model, cfg.run_config(), s);
            const AnalysisBundle agmarl_bundle = analyze(agmarl_frame);
            const AnalysisBundle baseline_bundle = analyze(baseline_frame);
            write_bundle(outdir, agmarl_frame, agmarl_bundle);
            write_bundle(outdir, baseline_frame, baseline_bundle);

            nlohmann::json summary;
            summary["scenario"] = script.name;
            summary["seed"] = s;
            summary["agmarl"] = scalars_to_json(agmarl_bundle.scalars);
            summary["baseline"] = scalars_to_json(baseline_bundle.scalars);
            const std::string path = outdir + "/" + script.name + "_summary_" + std::to_string(s) + ".json";
            std::ofstream os(path, std::ios::trunc);
            if (!os) throw std::runtime_error("cannot open for write: " + path);
            os << summary.dump(2) << "\n";
        }
        return kExitOk;
    } catch (const WeightsError& e) {
        std::cerr << "weights error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "evaluate failed: " << e.what() << "\n";
        return kExitConfig;
    }
}

int cmd_serve(const std::string& weights_path, int port, const std::string& config_path,
              const std::string& registry_path) {
    GlobalConfig cfg;
    try {
        if (!config_path.empty()) cfg = load_config(config_path);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    }
    try {
        auto model = std::make_shared<const Model>(load_model(weights_path));

        NodeRegistry registry;
        if (!registry_path.empty()) {
            std::ifstream is(registry_path);
            if (!is) throw std::runtime_error("cannot open registry snapshot: " + registry_path);
            nlohmann::json j;
            is >> j;
            registry = registry_from_json(j);
        } else {
            // empty nodes in the configured topology
            Simulator sim(cfg.cluster, cfg.cost_table, cfg.stress_weights);
            registry = NodeRegistry::from_graph(sim.snapshot());
        }
        for (const auto& [name, state] : registry.nodes) {
            if (state.node_id < 0 || state.node_id >= model->agent_count()) {
                throw std::runtime_error("registry node " + name + " has no trained agent");
            }
        }

        ExtenderConfig ecfg;
        ecfg.selection = cfg.selection;
        ecfg.costs = cfg.cost_table;
        ecfg.stress_weights = cfg.stress_weights;

        ExtenderService service(std::move(model), std::move(registry), std::move(ecfg), weights_path);
        log_info("serving extender on port " + std::to_string(port));
        if (!service.serve(port)) {
            std::cerr << "cannot bind port " << port << "\n";
            return kExitPortBusy;
        }
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "serve failed: " << e.what() << "\n";
        return kExitConfig;
    }
}

namespace {

// numeric leaves -> {mean, stdev}; arrays are skipped
void aggregate_json(const std::vector<nlohmann::json>& runs, nlohmann::json& out) {
    if (runs.empty()) return;
    if (runs.front().is_object()) {
        for (const auto& [key, value] : runs.front().items()) {
            std::vector<nlohmann::json> sub;
            sub.reserve(runs.size());
            bool all_have = true;
            for (const nlohmann::json& r : runs) {
                if (!r.contains(key)) {
                    all_have = false;
                    break;
                }
                sub.push_back(r.at(key));
            }
            if (!all_have) continue;
            nlohmann::json child;
            aggregate_json(sub, child);
            if (!child.is_null()) out[key] = std::move(child);
        }
        return;
    }
    if (runs.front().is_number()) {
        double sum = 0.0;
        for (const nlohmann::json& r : runs) sum += r.get<double>();
        const double mean = sum / static_cast<double>(runs.size());
        double var = 0.0;
        for (const nlohmann::json& r : runs) {
            const double d = r.get<double>() - mean;
            var += d * d;
        }
        var /= static_cast<double>(runs.size());
        out["mean"] = mean;
        out["stdev"] = std::sqrt(var);
        out["n"] = runs.size();
    }
}

}  // namespace

int cmd_report(const std::string& metrics_dir) {
    try {
        std::map<std::string, std::vector<nlohmann::json>> by_scenario;
        std::vector<std::filesystem::path> files;
        if (!std::filesystem::is_directory(metrics_dir)) {
            std::cerr << "not a directory: " << metrics_dir << "\n";
            return kExitConfig;
        }
        for (const auto& entry : std::filesystem::directory_iterator(metrics_dir)) {
            const std::string name = entry.path().filename().string();
            if (name.find("_summary_") != std::string::npos && entry.path().extension() == ".json") {
                files.push_back(entry.path());
            }
        }
        std::sort(files.begin(), files.end());
        if (files.empty()) {
            std::cerr << "no summary files under " << metrics_dir << "\n";
            return kExitConfig;
        }
        for (const std::filesystem::path& p : files) {
            std::ifstream is(p);
            nlohmann::json j;
            is >> j;
            by_scenario[j.at("scenario").get<std::string>()].push_back(std::move(j));
        }
        nlohmann::json report;
        for (const auto& [scenario, runs] : by_scenario) {
            nlohmann::json entry;
            entry["runs"] = runs.size();
            nlohmann::json seeds = nlohmann::json::array();
            std::vector<nlohmann::json> agmarl_runs, baseline_runs;
            for (const nlohmann::json& r : runs) {
                seeds.push_back(r.at("seed"));
                agmarl_runs.push_back(r.at("agmarl"));
                baseline_runs.push_back(r.at("baseline"));
            }
            entry["seeds"] = std::move(seeds);
            aggregate_json(agmarl_runs, entry["agmarl"]);
            aggregate_json(baseline_runs, entry["baseline"]);
            report[scenario] = std::move(entry);
        }
        const std::string out_path = metrics_dir + "/report.json";
        std::ofstream os(out_path, std::ios::trunc);
        os << report.dump(2) << "\n";
        std::cout << report.dump(2) << "\n";
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "report failed: " << e.what() << "\n";
        return kExitConfig;
    }
}

}  // namespace agmarl
