#include <agmarl/agent.hpp>

#include <agmarl/weights_io.hpp>

#include <regex>
#include <set>
#include <stdexcept>

namespace agmarl {

const char* objective_name(Objective o) {
    switch (o) {
        case kObjFt: return "FT";
        case kObjUtil: return "UTIL";
        case kObjCost: return "COST";
    }
    return "?";
}

Objective objective_from_string(const std::string& s) {
    if (s == "FT") return kObjFt;
    if (s == "UTIL") return kObjUtil;
    if (s == "COST") return kObjCost;
    throw std::invalid_argument("unknown objective: " + s);
}

Actor make_actor(const std::string& prefix, Rng& rng) {
    Actor a;
    a.net.l1 = make_dense(a.params, prefix + ".l1", kObservationDim, 128, Activation::ReLU, rng);
    a.net.l2 = make_dense(a.params, prefix + ".l2", 128, 64, Activation::ReLU, rng);
    a.net.l3 = make_dense(a.params, prefix + ".l3", 64, kActionDim, Activation::Sigmoid, rng);
    return a;
}

Critic make_critic(const std::string& prefix, Rng& rng) {
    Critic c;
    const int pair_dim = kObservationDim + kActionDim;  // 29
    c.net.enc1 = make_dense(c.params, prefix + ".enc1", pair_dim, 64, Activation::ReLU, rng);
    c.net.enc2 = make_dense(c.params, prefix + ".enc2", 64, kPooledDim, Activation::Identity, rng);
    c.net.main1 = make_dense(c.params, prefix + ".main1", pair_dim + kPooledDim, 128, Activation::ReLU, rng);
    c.net.main2 = make_dense(c.params, prefix + ".main2", 128, 64, Activation::ReLU, rng);
    c.net.main3 = make_dense(c.params, prefix + ".main3", 64, 1, Activation::Identity, rng);
    return c;
}

AgentBundle make_agent(int agent_id, std::uint64_t seed) {
    const std::string base = "agent" + std::to_string(agent_id);
    Rng actor_rng(derive_seed(seed, kSeedInit, 2ULL * static_cast<std::uint64_t>(agent_id) + 1));
    Rng critic_rng(derive_seed(seed, kSeedInit, 2ULL * static_cast<std::uint64_t>(agent_id) + 2));

    AgentBundle b;
    b.actor = make_actor(base + ".actor", actor_rng);
    b.critic = make_critic(base + ".critic", critic_rng);

    b.target_actor = b.actor;
    for (ParamStore::Entry& e : b.target_actor.params.entries()) {
        e.name = base + ".target_actor" + e.name.substr((base + ".actor").size());
    }
    b.target_critic = b.critic;
    for (ParamStore::Entry& e : b.target_critic.params.entries()) {
        e.name = base + ".target_critic" + e.name.substr((base + ".critic").size());
    }
    return b;
}

ActionScores actor_forward(const Actor& actor, const Observation& obs) {
    if (obs.size() != kObservationDim) {
        throw std::invalid_argument("actor_forward: observation must have length 26");
    }
    Eigen::VectorXd h1 = forward_dense(actor.params, actor.net.l1, obs);
    Eigen::VectorXd h2 = forward_dense(actor.params, actor.net.l2, h1);
    Eigen::VectorXd out = forward_dense(actor.params, actor.net.l3, h2);
    return ActionScores(out[0], out[1], out[2]);
}

Tape::Node actor_forward_tape(Tape& tape, Actor& actor, Tape::Node obs, bool train) {
    Tape::Node h1 = tape.dense(actor.params, actor.net.l1, obs, train);
    Tape::Node h2 = tape.dense(actor.params, actor.net.l2, h1, train);
    return tape.dense(actor.params, actor.net.l3, h2, train);
}

double critic_forward(const Critic& critic, const Observation& own_obs, const ActionScores& own_act,
                      const std::vector<std::pair<Observation, ActionScores>>& others) {
    if (own_obs.size() != kObservationDim) {
        throw std::invalid_argument("critic_forward: observation must have length 26");
    }
    Eigen::VectorXd pooled = Eigen::VectorXd::Zero(kPooledDim);
    if (!others.empty()) {
        for (const auto& [obs_j, act_j] : others) {
            Eigen::VectorXd pair(kObservationDim + kActionDim);
            pair << obs_j, act_j;
            Eigen::VectorXd z = forward_dense(critic.params, critic.net.enc2,
                                              forward_dense(critic.params, critic.net.enc1, pair));
            pooled += z;
        }
        pooled /= static_cast<double>(others.size());
    }
    Eigen::VectorXd joint(kObservationDim + kActionDim + kPooledDim);
    joint << own_obs, own_act, pooled;
    Eigen::VectorXd h1 = forward_dense(critic.params, critic.net.main1, joint);
    Eigen::VectorXd h2 = forward_dense(critic.params, critic.net.main2, h1);
    return forward_dense(critic.params, critic.net.main3, h2)[0];
}

Tape::Node critic_forward_tape(Tape& tape, Critic& critic, Tape::Node own_obs, Tape::Node own_act,
                               const std::vector<std::pair<Tape::Node, Tape::Node>>& others, bool train) {
    Tape::Node pooled;
    if (!others.empty()) {
        std::vector<Tape::Node> zs;
        zs.reserve(others.size());
        for (const auto& [obs_j, act_j] : others) {
            Tape::Node pair = tape.concat({obs_j, act_j});
            Tape::Node z = tape.dense(critic.params, critic.net.enc2,
                                      tape.dense(critic.params, critic.net.enc1, pair, train), train);
            zs.push_back(z);
        }
        pooled = tape.mean(zs);
    } else {
        pooled = tape.constant(Eigen::VectorXd::Zero(kPooledDim));
    }
    Tape::Node joint = tape.concat({own_obs, own_act, pooled});
    Tape::Node h1 = tape.dense(critic.params, critic.net.main1, joint, train);
    Tape::Node h2 = tape.dense(critic.params, critic.net.main2, h1, train);
    return tape.dense(critic.params, critic.net.main3, h2, train);
}

Model make_model(int n_agents, std::uint64_t seed) {
    Model m;
    m.gnn = make_gnn(seed);
    m.agents.reserve(static_cast<std::size_t>(n_agents));
    for (int i = 0; i < n_agents; ++i) {
        m.agents.push_back(make_agent(i, seed));
    }
    return m;
}

void save_model(const Model& model, const std::string& path, bool json_mirror) {
    TensorMap tensors;
    collect_tensors(model.gnn.params, tensors);
    for (const AgentBundle& a : model.agents) {
        collect_tensors(a.actor.params, tensors);
        collect_tensors(a.critic.params, tensors);
        collect_tensors(a.target_actor.params, tensors);
        collect_tensors(a.target_critic.params, tensors);
    }
    save_weights(path, tensors);
    if (json_mirror) {
        save_weights_json(path + ".json", tensors);
    }
}

Model load_model(const std::string& path) {
    const TensorMap tensors = load_weights(path);
    int max_agent = -1;
    const std::regex re("^agent([0-9]+)\\.");
    for (const auto& [name, t] : tensors) {
        std::smatch m;
        if (std::regex_search(name, m, re)) {
            max_agent = std::max(max_agent, std::stoi(m[1].str()));
        }
    }
    if (max_agent < 0) {
        throw WeightsError(WeightsError::Kind::BadShape, "container holds no agent tensors");
    }
    Model model = make_model(max_agent + 1, 0);
    restore_tensors(model.gnn.params, tensors);
    for (AgentBundle& a : model.agents) {
        restore_tensors(a.actor.params, tensors);
        restore_tensors(a.critic.params, tensors);
        restore_tensors(a.target_actor.params, tensors);
        restore_tensors(a.target_critic.params, tensors);
    }
    return model;
}

JointScores score_cluster(const Model& model, const ClusterGraph& g) {
    JointScores out;
    out.features = raw_feature_matrix(g);
    out.embeddings = gnn_forward(model.gnn, out.features);
    out.observations.reserve(g.nodes.size());
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        const int id = g.nodes[i].node_id;
        if (id < 0 || id >= model.agent_count()) {
            throw std::invalid_argument("score_cluster: no agent for node " + std::to_string(id));
        }
        Observation obs = build_observation(id, g, out.features, out.embeddings);
        out.scores.emplace(id, actor_forward(model.agents[static_cast<std::size_t>(id)].actor, obs));
        out.observations.push_back(std::move(obs));
    }
    return out;
}

}  // namespace agmarl
