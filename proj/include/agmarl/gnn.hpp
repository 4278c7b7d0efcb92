#pragma once

#include <agmarl/cluster.hpp>
#include <agmarl/diff.hpp>

#include <vector>

namespace agmarl {

constexpr int kEmbeddingDim = 16;
constexpr int kObservationDim = kRawFeatureDim + kEmbeddingDim;  // 26

// o_{i,t} = concat(x_{i,t}, e_{i,t}); first 10 entries are the raw features.
using Observation = Eigen::VectorXd;

struct GnnLayer {
    int w_self = -1;   // transforms the node's own representation
    int w_neigh = -1;  // transforms the aggregated neighbour message
};

// Shared K-layer message-passing encoder, dims 10 -> 32 -> 16, ReLU.
// The neighbour set of a node is every other node (fully connected graph,
// self excluded); a single-node graph aggregates the zero vector.
struct Gnn {
    ParamStore params;
    std::vector<GnnLayer> layers;
    std::vector<int> dims;
};

Gnn make_gnn(std::uint64_t seed);

/// Per-node embeddings; feats is d0 x N (one column per node), result dK x N.
Eigen::MatrixXd gnn_forward(const Gnn& gnn, const Eigen::MatrixXd& feats);

/// Tape variant; returns one node per graph node, in column order.
std::vector<Tape::Node> gnn_forward_tape(Tape& tape, Gnn& gnn, const Eigen::MatrixXd& feats, bool train);

/// 26-vector for one node: raw features then embedding. Throws when node_id
/// is not part of g.
Observation build_observation(int node_id, const ClusterGraph& g,
                              const Eigen::MatrixXd& feats, const Eigen::MatrixXd& embeddings);

}  // namespace agmarl
