#pragma once

#include <agmarl/cluster.hpp>
#include <agmarl/diff.hpp>
#include <agmarl/gnn.hpp>

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace agmarl {

// a_{i,t} = [score_FT, score_UTIL, score_COST], each in (0,1).
using ActionScores = Eigen::Vector3d;

enum Objective : int { kObjFt = 0, kObjUtil = 1, kObjCost = 2 };

const char* objective_name(Objective o);
Objective objective_from_string(const std::string& s);

constexpr int kActionDim = 3;
constexpr int kPooledDim = 128;  // mean-pooled other-agent embedding width

// 26 -> 128 ReLU -> 64 ReLU -> 3 Sigmoid
struct ActorNet {
    DenseLayer l1, l2, l3;
};

// other encoder: (26+3) -> 64 ReLU -> 128 Identity
// main head: (26+3+128) -> 128 ReLU -> 64 ReLU -> 1 Identity
struct CriticNet {
    DenseLayer enc1, enc2;
    DenseLayer main1, main2, main3;
};

struct Actor {
    ParamStore params;
    ActorNet net;
};

struct Critic {
    ParamStore params;
    CriticNet net;
};

// One node agent: independent online and target networks. No parameter is
// shared across agents except the GNN.
struct AgentBundle {
    Actor actor;
    Critic critic;
    Actor target_actor;
    Critic target_critic;
};

Actor make_actor(const std::string& prefix, Rng& rng);
Critic make_critic(const std::string& prefix, Rng& rng);

/// Targets start as exact copies of the online networks.
AgentBundle make_agent(int agent_id, std::uint64_t seed);

/// Deterministic scores in (0,1)^3 for a 26-dim observation.
ActionScores actor_forward(const Actor& actor, const Observation& obs);

Tape::Node actor_forward_tape(Tape& tape, Actor& actor, Tape::Node obs, bool train);

/// Centralised Q-value. `others` holds the remaining agents'
/// (observation, action) pairs; their encodings are mean-pooled so the input
/// width is independent of the agent count. Empty `others` pools the zero
/// vector (single-agent clusters).
double critic_forward(const Critic& critic, const Observation& own_obs, const ActionScores& own_act,
                      const std::vector<std::pair<Observation, ActionScores>>& others);

Tape::Node critic_forward_tape(Tape& tape, Critic& critic, Tape::Node own_obs, Tape::Node own_act,
                               const std::vector<std::pair<Tape::Node, Tape::Node>>& others, bool train);

// Full inference stack: the shared encoder plus one bundle per node id.
struct Model {
    Gnn gnn;
    std::vector<AgentBundle> agents;

    int agent_count() const { return static_cast<int>(agents.size()); }
};

Model make_model(int n_agents, std::uint64_t seed);

void save_model(const Model& model, const std::string& path, bool json_mirror = true);

/// Rebuilds a model from an AGMW container; agent count is inferred from the
/// stored names, shapes are validated.
Model load_model(const std::string& path);

// Per-step joint inference over a cluster snapshot.
struct JointScores {
    Eigen::MatrixXd features;                 // 10 x N, g.nodes order
    Eigen::MatrixXd embeddings;               // 16 x N
    std::vector<Observation> observations;    // per g.nodes index
    std::map<int, ActionScores> scores;       // node_id -> a_{i,t}
};

/// Runs the shared GNN once and every present node's online actor.
JointScores score_cluster(const Model& model, const ClusterGraph& g);

}  // namespace agmarl
