#include <agmarl/commands.hpp>

#include <CLI11.hpp>

#include <cstdint>
#include <string>

int main(int argc, char** argv) {
    CLI::App app{"AGMARL-DKS scheduling stack: train, evaluate, serve, report"};
    app.require_subcommand(1);

    std::string config_path;
    std::string weights_path;
    std::string out_path;
    std::string outdir = "out";
    std::string registry_path;
    std::string metrics_dir;
    std::uint64_t seed = 0;
    int scenario = 1;
    int port = 8888;
    int n_seeds = 1;
    double time_scale = 0.0;

    CLI::App* train = app.add_subcommand("train", "train agents and write an AGMW weights container");
    train->add_option("--config", config_path, "global config JSON")->required();
    train->add_option("--seed", seed, "run seed");
    train->add_option("--out", out_path, "output weights path (.agmw)")->required();

    CLI::App* evaluate = app.add_subcommand("evaluate", "run a scenario A/B comparison and analysis");
    evaluate->add_option("--scenario", scenario, "scenario number")->required()->check(CLI::IsMember({1, 2}));
    evaluate->add_option("--weights", weights_path, "trained AGMW container")->required();
    evaluate->add_option("--seed", seed, "base seed");
    evaluate->add_option("--outdir", outdir, "output directory");
    evaluate->add_option("--config", config_path, "global config JSON (defaults apply when omitted)");
    evaluate->add_option("--seeds", n_seeds, "number of consecutive seeds to sweep");
    evaluate->add_option("--time-scale", time_scale,
                         "wall-clock compression factor; event order never changes");

    CLI::App* serve = app.add_subcommand("serve", "serve the scheduler-extender HTTP endpoints");
    serve->add_option("--weights", weights_path, "trained AGMW container")->required();
    serve->add_option("--port", port, "listen port");
    serve->add_option("--config", config_path, "global config JSON");
    serve->add_option("--registry", registry_path, "cluster snapshot JSON for the node registry");

    CLI::App* report = app.add_subcommand("report", "aggregate evaluation summaries across seeds");
    report->add_option("--metrics-dir", metrics_dir, "directory with *_summary_*.json files")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : agmarl::kExitUsage;
    }

    if (train->parsed()) {
        return agmarl::cmd_train(config_path, seed, out_path);
    }
    if (evaluate->parsed()) {
        return agmarl::cmd_evaluate(scenario, weights_path, seed, outdir, config_path, n_seeds, time_scale);
    }
    if (serve->parsed()) {
        return agmarl::cmd_serve(weights_path, port, config_path, registry_path);
    }
    if (report->parsed()) {
        return agmarl::cmd_report(metrics_dir);
    }
    return agmarl::kExitUsage;
}
