#pragma once

#include <cstdint>
#include <string>

namespace agmarl {

// Exit codes shared by the CLI surface.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;     // bad config / bad inputs
inline constexpr int kExitDiverged = 3;   // training produced non-finite losses
inline constexpr int kExitPortBusy = 4;
inline constexpr int kExitUsage = 64;

/// Trains with the given config and writes the AGMW container (plus a JSON
/// mirror) and the per-episode training-log CSV next to it.
int cmd_train(const std::string& config_path, std::uint64_t seed, const std::string& out_weights);

/// Runs the A/B comparison for scenario 1 or 2 over `n_seeds` consecutive
/// seeds, emitting the analysis bundle files and one summary JSON per seed
/// into outdir. time_scale is accepted for interface compatibility; the
/// simulation always runs uncompressed event order at full speed.
int cmd_evaluate(int scenario, const std::string& weights_path, std::uint64_t seed,
                 const std::string& outdir, const std::string& config_path, int n_seeds,
                 double time_scale);

/// Serves the extender endpoints until interrupted.
int cmd_serve(const std::string& weights_path, int port, const std::string& config_path,
              const std::string& registry_path);

/// Aggregates every *_summary_*.json under metrics_dir into per-scenario,
/// per-policy mean and stdev for each scalar; writes report.json there.
int cmd_report(const std::string& metrics_dir);

bool log_enabled();
void log_info(const std::string& msg);

}  // namespace agmarl
