#pragma once

#include <agmarl/agent.hpp>
#include <agmarl/sim.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace agmarl {

struct Hyperparams {
    double gamma = 0.99;            // discount
    double tau = 0.01;              // Polyak rate
    double bonus = 0.1;             // success bonus B
    int batch_size = 64;
    std::size_t buffer_capacity = 50000;
    double actor_lr = 1e-3;
    double critic_lr = 1e-3;
    double noise_sigma = 0.1;       // exploration noise, decays per episode
    double noise_decay = 0.999;
    int episodes = 500;             // E_max
    int steps = 200;                // T_max placements per episode
};

// Replay record. Snapshots are raw (pre-GNN); embeddings are recomputed at
// training time so the encoder always sees current weights.
struct Transition {
    ClusterGraph state;
    std::map<int, ActionScores> joint_scores;  // every active agent's executed scores
    int winner = -1;
    PodSpec pod;
    double reward = 0.0;  // shared R_t, broadcast to every agent
    ClusterGraph next_state;
    double stress = 0.0;
};

// Fixed-capacity ring with uniform without-replacement batch sampling.
class ReplayBuffer {
public:
    ReplayBuffer(std::size_t capacity, std::uint64_t seed);

    void push(Transition t);
    std::vector<std::size_t> sample_indices(std::size_t batch);
    const Transition& at(std::size_t i) const { return ring_[i]; }
    std::size_t size() const { return ring_.size(); }
    std::size_t capacity() const { return capacity_; }

private:
    std::vector<Transition> ring_;
    std::size_t capacity_;
    std::size_t write_ = 0;
    Rng rng_;
};

/// Shared reward R_t = -(1/3) sum_j (a_j - m*_j)^2 + B.
double compute_reward(const ActionScores& winner_scores, const Eigen::Vector3d& realized, double bonus);

/// Post-placement ground truth m*_t at the winning node:
/// [metric_ft, metric_util, metric_cost normalised by the cluster max] so all
/// three components share the actor's (0,1) codomain.
Eigen::Vector3d realized_metrics(const ClusterGraph& g_next, int winner, const CostTable& costs);

/// Independent zero-mean Gaussian noise per component, clamped to
/// [0.001, 0.999]; lexicographic selection still runs on the result.
ActionScores explore_scores(const ActionScores& scores, double sigma, Rng& rng);

/// Halves the effective rate whenever a 20-episode reward window fails to
/// improve on the previous one by at least 1e-3; floored at base/16.
double adaptive_lr(double base_lr, const std::vector<double>& episode_rewards);

struct EpisodeLog {
    int episode = 0;
    double mean_reward = 0.0;
    double mse_term = 0.0;  // accuracy penalty of R_t
    double critic_loss = 0.0;
    double stress_mean = 0.0;
    double lr = 0.0;
};

struct TrainResult {
    std::vector<EpisodeLog> log;
    long transitions = 0;
};

struct TrainingDivergence : std::runtime_error {
    explicit TrainingDivergence(const std::string& what) : std::runtime_error(what) {}
};

struct TrainSetup {
    Hyperparams hp;
    SelectionConfig selection;
    ClusterConfig cluster;
    CostTable costs;
    StressWeights stress_weights;
    AdmissionCapConfig admission;  // honoured while scheduling if enabled
};

// Precomputed per-batch inputs shared by every agent's update within one
// training iteration: observations through the online GNN and next-state
// target-actor actions.
struct BatchContext {
    std::vector<const Transition*> batch;
    std::vector<Eigen::MatrixXd> feats;                      // per sample, state features
    std::vector<std::vector<Observation>> obs;               // per sample, per state node index
    std::vector<std::vector<Observation>> next_obs;          // per sample, per next-state node index
    std::vector<std::map<int, ActionScores>> next_actions;   // per sample, target-actor actions
};

// MADDPG training driver: one critic TD regression and one deterministic
// policy-gradient step per agent per environment step, soft target updates,
// shared replay. The GNN receives gradients from the actor losses only.
class Trainer {
public:
    Trainer(Model& model, const TrainSetup& setup, std::uint64_t seed);

    TrainResult run();

    BatchContext make_batch_context(const std::vector<std::size_t>& indices) const;

    double td_target(int agent_id, const BatchContext& ctx, std::size_t sample) const;

    /// TD regression over the batch; steps the agent's critic optimizer and
    /// returns the batch loss.
    double critic_update(int agent_id, const BatchContext& ctx, double lr);

    /// Policy-gradient ascent on the batch-mean Q; steps the agent's actor
    /// optimizer. Gradients for the shared GNN accumulate in its store and
    /// are applied by step_gnn().
    double actor_update(int agent_id, const BatchContext& ctx, double lr);

    void step_gnn(double lr);
    void soft_update_targets();

    /// Straight-line recomputation of the critic batch loss through the
    /// non-tape forward path; test oracle for critic_update's loss.
    double critic_loss_reference(int agent_id, const BatchContext& ctx) const;

    /// Tape builders, exposed for gradient-fidelity checks.
    Tape::Node build_critic_loss(Tape& tape, int agent_id, const BatchContext& ctx,
                                 const std::vector<double>& targets);
    Tape::Node build_actor_loss(Tape& tape, int agent_id, const BatchContext& ctx);

    ReplayBuffer& buffer() { return buffer_; }
    Model& model() { return model_; }

private:
    Model& model_;
    TrainSetup setup_;
    std::uint64_t seed_;
    ReplayBuffer buffer_;
    Rng noise_rng_;
    std::vector<Adam> actor_opt_;
    std::vector<Adam> critic_opt_;
    Adam gnn_opt_;
};

/// Seeded synthetic workload for one training episode: `steps` arrivals with
/// mixed service/worker/batch profiles and a slice of fault-injected pods.
/// Returns the events plus the episode horizon.
std::pair<std::vector<SimEvent>, double> training_workload(int steps, std::uint64_t seed);

void write_train_log_csv(const std::string& path, const std::vector<EpisodeLog>& log);

}  // namespace agmarl
