#include <agmarl/training.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

namespace agmarl {

ReplayBuffer::ReplayBuffer(std::size_t capacity, std::uint64_t seed)
    : capacity_(capacity), rng_(seed) {
    if (capacity_ == 0) {
        throw std::invalid_argument("ReplayBuffer: capacity must be positive");
    }
    ring_.reserve(capacity_);
}

void ReplayBuffer::push(Transition t) {
    if (ring_.size() < capacity_) {
        ring_.push_back(std::move(t));
    } else {
        ring_[write_] = std::move(t);
    }
    write_ = (write_ + 1) % capacity_;
}

std::vector<std::size_t> ReplayBuffer::sample_indices(std::size_t batch) {
    if (batch > ring_.size()) {
        throw std::invalid_argument("ReplayBuffer: batch larger than buffer");
    }
    // partial Fisher-Yates over [0, size)
    std::vector<std::size_t> idx(ring_.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::vector<std::size_t> out;
    out.reserve(batch);
    for (std::size_t k = 0; k < batch; ++k) {
        const std::size_t pick = k + static_cast<std::size_t>(
            rng_.uniform() * static_cast<double>(idx.size() - k));
        std::swap(idx[k], idx[pick]);
        out.push_back(idx[k]);
    }
    return out;
}

double compute_reward(const ActionScores& winner_scores, const Eigen::Vector3d& realized, double bonus) {
    const Eigen::Vector3d diff = winner_scores - realized;
    return -diff.squaredNorm() / 3.0 + bonus;
}

Eigen::Vector3d realized_metrics(const ClusterGraph& g_next, int winner, const CostTable& costs) {
    const NodeState* node = g_next.find(winner);
    if (node == nullptr) {
        throw std::invalid_argument("realized_metrics: winner not in next state");
    }
    double max_cost_metric = 0.0;
    for (const NodeState& n : g_next.nodes) {
        max_cost_metric = std::max(max_cost_metric, metric_cost(n, costs));
    }
    return {metric_ft(*node), metric_util(*node), metric_cost(*node, costs) / max_cost_metric};
}

ActionScores explore_scores(const ActionScores& scores, double sigma, Rng& rng) {
    if (sigma < 0.0) {
        throw std::invalid_argument("explore_scores: sigma must be >= 0");
    }
    ActionScores out;
    for (int i = 0; i < 3; ++i) {
        out[i] = std::clamp(scores[i] + sigma * rng.normal(), 0.001, 0.999);
    }
    return out;
}

double adaptive_lr(double base_lr, const std::vector<double>& episode_rewards) {
    constexpr int kWindow = 20;
    constexpr double kMinImprovement = 1e-3;
    int halvings = 0;
    for (std::size_t k = 2 * kWindow; k <= episode_rewards.size(); k += kWindow) {
        double prev = 0.0;
        double cur = 0.0;
        for (std::size_t i = k - 2 * kWindow; i < k - kWindow; ++i) prev += episode_rewards[i];
        for (std::size_t i = k - kWindow; i < k; ++i) cur += episode_rewards[i];
        prev /= kWindow;
        cur /= kWindow;
        if (cur - prev < kMinImprovement) ++halvings;
    }
    double lr = base_lr * std::pow(0.5, halvings);
    return std::max(lr, base_lr / 16.0);
}

Trainer::Trainer(Model& model, const TrainSetup& setup, std::uint64_t seed)
    : model_(model),
      setup_(setup),
      seed_(seed),
      buffer_(setup.hp.buffer_capacity, derive_seed(seed, kSeedSample)),
      noise_rng_(derive_seed(seed, kSeedNoise)) {
    actor_opt_.resize(model_.agents.size());
    critic_opt_.resize(model_.agents.size());
}

BatchContext Trainer::make_batch_context(const std::vector<std::size_t>& indices) const {
    BatchContext ctx;
    ctx.batch.reserve(indices.size());
    for (std::size_t i : indices) {
        ctx.batch.push_back(&buffer_.at(i));
    }
    ctx.feats.reserve(ctx.batch.size());
    ctx.obs.reserve(ctx.batch.size());
    ctx.next_obs.reserve(ctx.batch.size());
    ctx.next_actions.reserve(ctx.batch.size());
    for (const Transition* t : ctx.batch) {
        Eigen::MatrixXd feats = raw_feature_matrix(t->state);
        Eigen::MatrixXd emb = gnn_forward(model_.gnn, feats);
        std::vector<Observation> obs;
        obs.reserve(t->state.nodes.size());
        for (const NodeState& n : t->state.nodes) {
            obs.push_back(build_observation(n.node_id, t->state, feats, emb));
        }

        Eigen::MatrixXd nfeats = raw_feature_matrix(t->next_state);
        Eigen::MatrixXd nemb = gnn_forward(model_.gnn, nfeats);
        std::vector<Observation> nobs;
        std::map<int, ActionScores> nact;
        nobs.reserve(t->next_state.nodes.size());
        for (std::size_t j = 0; j < t->next_state.nodes.size(); ++j) {
            const int id = t->next_state.nodes[j].node_id;
            nobs.push_back(build_observation(id, t->next_state, nfeats, nemb));
            nact.emplace(id, actor_forward(model_.agents[static_cast<std::size_t>(id)].target_actor, nobs.back()));
        }

        ctx.feats.push_back(std::move(feats));
        ctx.obs.push_back(std::move(obs));
        ctx.next_obs.push_back(std::move(nobs));
        ctx.next_actions.push_back(std::move(nact));
    }
    return ctx;
}

double Trainer::td_target(int agent_id, const BatchContext& ctx, std::size_t sample) const {
    const Transition& t = *ctx.batch[sample];
    const int nidx = t.next_state.index_of(agent_id);
    if (nidx < 0) {
        // agent's node left the cluster before s': no bootstrap term
        return t.reward;
    }
    std::vector<std::pair<Observation, ActionScores>> others;
    others.reserve(t.next_state.nodes.size());
    for (std::size_t j = 0; j < t.next_state.nodes.size(); ++j) {
        const int id = t.next_state.nodes[j].node_id;
        if (id == agent_id) continue;
        others.emplace_back(ctx.next_obs[sample][j], ctx.next_actions[sample].at(id));
    }
    const AgentBundle& agent = model_.agents[static_cast<std::size_t>(agent_id)];
    const double q = critic_forward(agent.target_critic, ctx.next_obs[sample][static_cast<std::size_t>(nidx)],
                                    ctx.next_actions[sample].at(agent_id), others);
    return t.reward + setup_.hp.gamma * q;
}

Tape::Node Trainer::build_critic_loss(Tape& tape, int agent_id, const BatchContext& ctx,
                                      const std::vector<double>& targets) {
    AgentBundle& agent = model_.agents[static_cast<std::size_t>(agent_id)];
    std::vector<Tape::Node> terms;
    terms.reserve(ctx.batch.size());
    for (std::size_t s = 0; s < ctx.batch.size(); ++s) {
        const Transition& t = *ctx.batch[s];
        const int idx = t.state.index_of(agent_id);
        if (idx < 0) continue;
        Tape::Node own_obs = tape.constant(ctx.obs[s][static_cast<std::size_t>(idx)]);
        Tape::Node own_act = tape.constant(t.joint_scores.at(agent_id));
        std::vector<std::pair<Tape::Node, Tape::Node>> others;
        for (std::size_t j = 0; j < t.state.nodes.size(); ++j) {
            const int id = t.state.nodes[j].node_id;
            if (id == agent_id) continue;
            others.emplace_back(tape.constant(ctx.obs[s][j]), tape.constant(t.joint_scores.at(id)));
        }
        Tape::Node q = critic_forward_tape(tape, agent.critic, own_obs, own_act, others, true);
        Eigen::VectorXd y(1);
        y[0] = targets[s];
        terms.push_back(tape.squared_error(q, y));
    }
    if (terms.empty()) {
        return tape.constant(Eigen::VectorXd::Zero(1));
    }
    return tape.mean(terms);
}

Tape::Node Trainer::build_actor_loss(Tape& tape, int agent_id, const BatchContext& ctx) {
    AgentBundle& agent = model_.agents[static_cast<std::size_t>(agent_id)];
    std::vector<Tape::Node> terms;
    terms.reserve(ctx.batch.size());
    for (std::size_t s = 0; s < ctx.batch.size(); ++s) {
        const Transition& t = *ctx.batch[s];
        const int idx = t.state.index_of(agent_id);
        if (idx < 0) continue;
        // actor input: embeddings on the tape so the shared GNN trains
        // through the policy; critic inputs are detached constants
        std::vector<Tape::Node> emb = gnn_forward_tape(tape, model_.gnn, ctx.feats[s], true);
        Tape::Node own_raw = tape.constant(ctx.feats[s].col(idx));
        Tape::Node own_obs_live = tape.concat({own_raw, emb[static_cast<std::size_t>(idx)]});
        Tape::Node action = actor_forward_tape(tape, agent.actor, own_obs_live, true);

        Tape::Node own_obs_const = tape.constant(ctx.obs[s][static_cast<std::size_t>(idx)]);
        std::vector<std::pair<Tape::Node, Tape::Node>> others;
        for (std::size_t j = 0; j < t.state.nodes.size(); ++j) {
            const int id = t.state.nodes[j].node_id;
            if (id == agent_id) continue;
            others.emplace_back(tape.constant(ctx.obs[s][j]), tape.constant(t.joint_scores.at(id)));
        }
        terms.push_back(critic_forward_tape(tape, agent.critic, own_obs_const, action, others, false));
    }
    if (terms.empty()) {
        return tape.constant(Eigen::VectorXd::Zero(1));
    }
    return tape.negate_scalar(tape.mean(terms));
}

double Trainer::critic_update(int agent_id, const BatchContext& ctx, double lr) {
    std::vector<double> targets(ctx.batch.size(), 0.0);
    for (std::size_t s = 0; s < ctx.batch.size(); ++s) {
        if (ctx.batch[s]->state.index_of(agent_id) >= 0) {
            targets[s] = td_target(agent_id, ctx, s);
        }
    }
    Tape tape;
    Tape::Node loss = build_critic_loss(tape, agent_id, ctx, targets);
    const double value = tape.scalar(loss);
    tape.backward(loss);
    critic_opt_[static_cast<std::size_t>(agent_id)].step(
        model_.agents[static_cast<std::size_t>(agent_id)].critic.params, lr);
    return value;
}

double Trainer::actor_update(int agent_id, const BatchContext& ctx, double lr) {
    Tape tape;
    Tape::Node loss = build_actor_loss(tape, agent_id, ctx);
    const double value = tape.scalar(loss);
    tape.backward(loss);
    actor_opt_[static_cast<std::size_t>(agent_id)].step(
        model_.agents[static_cast<std::size_t>(agent_id)].actor.params, lr);
    return value;
}

void Trainer::step_gnn(double lr) {
    gnn_opt_.step(model_.gnn.params, lr);
}

void Trainer::soft_update_targets() {
    for (AgentBundle& a : model_.agents) {
        soft_update(a.actor.params, a.target_actor.params, setup_.hp.tau);
        soft_update(a.critic.params, a.target_critic.params, setup_.hp.tau);
    }
}

double Trainer::critic_loss_reference(int agent_id, const BatchContext& ctx) const {
    const AgentBundle& agent = model_.agents[static_cast<std::size_t>(agent_id)];
    double sum = 0.0;
    int n = 0;
    for (std::size_t s = 0; s < ctx.batch.size(); ++s) {
        const Transition& t = *ctx.batch[s];
        const int idx = t.state.index_of(agent_id);
        if (idx < 0) continue;
        std::vector<std::pair<Observation, ActionScores>> others;
        for (std::size_t j = 0; j < t.state.nodes.size(); ++j) {
            const int id = t.state.nodes[j].node_id;
            if (id == agent_id) continue;
            others.emplace_back(ctx.obs[s][j], t.joint_scores.at(id));
        }
        const double q = critic_forward(agent.critic, ctx.obs[s][static_cast<std::size_t>(idx)],
                                        t.joint_scores.at(agent_id), others);
        const double y = td_target(agent_id, ctx, s);
        sum += (q - y) * (q - y);
        ++n;
    }
    return n > 0 ? sum / n : 0.0;
}

namespace {

ClusterGraph strip_pod_lists(ClusterGraph g) {
    for (NodeState& n : g.nodes) {
        n.pod_ids.clear();
    }
    return g;
}

}  // namespace

TrainResult Trainer::run() {
    const Hyperparams& hp = setup_.hp;
    TrainResult result;
    std::vector<double> reward_history;

    for (int ep = 0; ep < hp.episodes; ++ep) {
        const double lr_actor = adaptive_lr(hp.actor_lr, reward_history);
        const double lr_critic = adaptive_lr(hp.critic_lr, reward_history);
        const double sigma = hp.noise_sigma * std::pow(hp.noise_decay, ep);

        Simulator env(setup_.cluster, setup_.costs, setup_.stress_weights);
        auto [events, horizon] = training_workload(hp.steps, derive_seed(seed_, kSeedEnv, static_cast<std::uint64_t>(ep)));
        env.load_schedule(std::move(events));

        double reward_sum = 0.0, mse_sum = 0.0, closs_sum = 0.0, stress_sum = 0.0;
        int placed = 0;
        long updates = 0;
        int attempts = 0;
        const int attempt_cap = hp.steps * 4;

        while (placed < hp.steps && attempts < attempt_cap) {
            std::optional<ScheduleRequest> req = env.next_decision(horizon);
            if (!req) break;
            ++attempts;

            ClusterGraph g = env.snapshot();
            JointScores joint = score_cluster(model_, g);
            std::map<int, ActionScores> noisy;
            for (const auto& [id, scores] : joint.scores) {
                noisy.emplace(id, explore_scores(scores, sigma, noise_rng_));
            }

            std::vector<int> feasible = feasible_candidates(g, req->pod);
            if (feasible.empty()) {
                env.defer(*req);
                continue;
            }
            if (!admission_allows(env, req->pod, setup_.admission, regime_of(g.stress))) {
                env.note_deferred_admission();
                env.defer(*req);
                continue;
            }
            std::map<int, ActionScores> cand;
            for (int id : feasible) cand.emplace(id, noisy.at(id));
            const int winner = lex_select(cand, g.stress, setup_.selection);

            env.bind(*req, winner);
            ClusterGraph g_next = env.snapshot();
            const Eigen::Vector3d m = realized_metrics(g_next, winner, setup_.costs);
            const double reward = compute_reward(noisy.at(winner), m, hp.bonus);

            const double step_stress = g.stress;
            Transition t;
            t.state = strip_pod_lists(std::move(g));
            t.joint_scores = std::move(noisy);
            t.winner = winner;
            t.pod = req->pod;
            t.reward = reward;
            t.next_state = strip_pod_lists(std::move(g_next));
            t.stress = step_stress;
            buffer_.push(std::move(t));

            ++placed;
            reward_sum += reward;
            mse_sum += hp.bonus - reward;
            stress_sum += step_stress;

            if (buffer_.size() >= static_cast<std::size_t>(hp.batch_size)) {
                const std::vector<std::size_t> idx = buffer_.sample_indices(static_cast<std::size_t>(hp.batch_size));
                BatchContext ctx = make_batch_context(idx);
                for (int a = 0; a < model_.agent_count(); ++a) {
                    const double closs = critic_update(a, ctx, lr_critic);
                    if (!std::isfinite(closs)) {
                        throw TrainingDivergence("non-finite critic loss at episode " + std::to_string(ep));
                    }
                    closs_sum += closs;
                    const double aloss = actor_update(a, ctx, lr_actor);
                    if (!std::isfinite(aloss)) {
                        throw TrainingDivergence("non-finite actor loss at episode " + std::to_string(ep));
                    }
                }
                step_gnn(lr_actor);
                soft_update_targets();
                ++updates;
            }
        }

        EpisodeLog log;
        log.episode = ep;
        log.mean_reward = placed > 0 ? reward_sum / placed : 0.0;
        log.mse_term = placed > 0 ? mse_sum / placed : 0.0;
        log.critic_loss = updates > 0 ? closs_sum / (static_cast<double>(updates) * model_.agent_count()) : 0.0;
        log.stress_mean = placed > 0 ? stress_sum / placed : 0.0;
        log.lr = lr_actor;
        result.log.push_back(log);
        result.transitions += placed;
        reward_history.push_back(log.mean_reward);
    }
    return result;
}

std::pair<std::vector<SimEvent>, double> training_workload(int steps, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<SimEvent> events;
    events.reserve(static_cast<std::size_t>(steps));
    double t = 0.0;
    for (int k = 0; k < steps; ++k) {
        t += rng.uniform(4.0, 12.0);
        PodSpec pod;
        pod.pod_id = "train-" + std::to_string(k);

        const double profile = rng.uniform();
        if (profile < 0.55) {
            pod.app_label = "web";
            pod.cpu_request_mcpu = rng.uniform_int(100, 500);
            pod.mem_request_mib = rng.uniform_int(128, 768);
            pod.lifetime_s = rng.uniform() < 0.15 ? kInfiniteLifetime : rng.uniform(60.0, 300.0);
        } else if (profile < 0.80) {
            pod.app_label = "worker";
            pod.cpu_request_mcpu = rng.uniform_int(400, 1000);
            pod.mem_request_mib = rng.uniform_int(512, 2048);
            pod.lifetime_s = rng.uniform(120.0, 420.0);
        } else {
            pod.app_label = "batch";
            pod.cpu_request_mcpu = rng.uniform_int(1000, 2000);
            pod.mem_request_mib = rng.uniform_int(1024, 4096);
            pod.lifetime_s = rng.uniform(120.0, 360.0);
            pod.priority = PriorityClass::Batch;
        }

        const double fault = rng.uniform();
        if (fault < 0.12) {
            pod.app_label = "flaky-live";
            pod.fault.kind = FaultSpec::Kind::LivenessFail;
            pod.fault.after_s = rng.uniform(30.0, 120.0);
        } else if (fault < 0.20) {
            pod.app_label = "flaky-oom";
            pod.fault.kind = FaultSpec::Kind::OomKill;
            pod.fault.after_s = rng.uniform(20.0, 90.0);
            pod.fault.spike_to_mib = pod.mem_request_mib * rng.uniform_int(2, 4);
        }

        SimEvent ev;
        ev.kind = SimEvent::Kind::PodArrival;
        ev.time = t;
        ev.pod = std::move(pod);
        events.push_back(std::move(ev));
    }
    return {std::move(events), t + 240.0};
}

void write_train_log_csv(const std::string& path, const std::vector<EpisodeLog>& log) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) {
        throw std::runtime_error("cannot open for write: " + path);
    }
    os << "episode,mean_reward,mse_term,critic_loss,stress_mean,lr\n";
    char buf[256];
    for (const EpisodeLog& e : log) {
        std::snprintf(buf, sizeof(buf), "%d,%.12g,%.12g,%.12g,%.12g,%.12g\n", e.episode, e.mean_reward,
                      e.mse_term, e.critic_loss, e.stress_mean, e.lr);
        os << buf;
    }
}

}  // namespace agmarl
