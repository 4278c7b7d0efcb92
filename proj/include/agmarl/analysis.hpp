#pragma once

#include <agmarl/scenario.hpp>

#include <nlohmann/json_fwd.hpp>

#include <string>
#include <vector>

namespace agmarl {

struct LabeledMatrix {
    std::vector<std::string> rows, cols;
    Eigen::MatrixXd values;
};

struct AnalysisScalars {
    std::map<std::string, double> util_stddev_by_phase;  // packing index per phase
    double util_stddev_overall = 0.0;
    std::map<std::string, long> max_restarts_by_app;     // worst node per app
    double burst_clearance_s = 0.0;  // worst queueing delay over Burst pods
    double total_cost = 0.0;
    long total_restarts = 0;
    long total_failures = 0;
    long deferred_admissions = 0;
};

// Columns of the correlation matrix / pairplot data, one row per
// (sample, node) pair.
inline const std::vector<std::string>& pair_columns() {
    static const std::vector<std::string> cols = {"cpu_requested", "mem_requested_gb", "failures",
                                                  "restarts", "cost"};
    return cols;
}

struct AnalysisBundle {
    LabeledMatrix distribution;     // app x node, running pods at scenario end
    LabeledMatrix cpu_by_app;       // node x app, requested mCPU at scenario end
    std::vector<std::pair<std::string, LabeledMatrix>> phase_util;  // per phase-end snapshot
    LabeledMatrix restarts_heatmap;  // app x node
    LabeledMatrix correlation;       // 5 x 5; NaN marks undefined entries
    Eigen::MatrixXd pair_data;       // rows x 5
    AnalysisScalars scalars;
};

/// Pearson r; NaN when either column has zero variance.
double pearson(const std::vector<double>& x, const std::vector<double>& y);

AnalysisBundle analyze(const MetricsFrame& frame);

/// Per-node mean utilisation over the samples inside [start_s, end_s), then
/// the population standard deviation across nodes.
double util_stddev_in_window(const MetricsFrame& frame, double start_s, double end_s);

nlohmann::json scalars_to_json(const AnalysisScalars& s);

// File emission. Prefix follows {scenario}_{policy}_{seed}.
void write_frame_csv(const std::string& path, const MetricsFrame& frame);
void write_outcomes_csv(const std::string& path, const MetricsFrame& frame);
void write_matrix_csv(const std::string& path, const LabeledMatrix& m);
void write_pairdata_csv(const std::string& path, const Eigen::MatrixXd& data);
void write_bundle(const std::string& outdir, const MetricsFrame& frame, const AnalysisBundle& bundle);

// Self-contained SVG charts.
std::string svg_heatmap(const LabeledMatrix& m, const std::string& title);
std::string svg_stacked_bars(const LabeledMatrix& m, const std::string& title);
std::string svg_pair_grid(const Eigen::MatrixXd& data, const std::vector<std::string>& cols,
                          const std::string& title);

}  // namespace agmarl
