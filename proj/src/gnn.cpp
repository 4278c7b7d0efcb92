#include <agmarl/gnn.hpp>

#include <stdexcept>
#include <string>

namespace agmarl {

Gnn make_gnn(std::uint64_t seed) {
    Gnn g;
    g.dims = {kRawFeatureDim, 32, kEmbeddingDim};
    Rng rng(derive_seed(seed, kSeedInit, 0));
    for (std::size_t k = 0; k + 1 < g.dims.size(); ++k) {
        GnnLayer layer;
        const std::string prefix = "gnn.layer" + std::to_string(k);
        layer.w_self = g.params.add_matrix(prefix + ".w_self", g.dims[k + 1], g.dims[k], rng);
        layer.w_neigh = g.params.add_matrix(prefix + ".w_neigh", g.dims[k + 1], g.dims[k], rng);
        g.layers.push_back(layer);
    }
    return g;
}

Eigen::MatrixXd gnn_forward(const Gnn& gnn, const Eigen::MatrixXd& feats) {
    if (feats.rows() != gnn.dims.front()) {
        throw std::invalid_argument("gnn_forward: feature dimension mismatch");
    }
    const Eigen::Index n = feats.cols();
    Eigen::MatrixXd h = feats;
    for (std::size_t k = 0; k < gnn.layers.size(); ++k) {
        const Eigen::MatrixXd& ws = gnn.params.at(gnn.layers[k].w_self).value;
        const Eigen::MatrixXd& wn = gnn.params.at(gnn.layers[k].w_neigh).value;
        Eigen::MatrixXd next(ws.rows(), n);
        for (Eigen::Index i = 0; i < n; ++i) {
            Eigen::VectorXd msg = Eigen::VectorXd::Zero(h.rows());
            if (n > 1) {
                for (Eigen::Index j = 0; j < n; ++j) {
                    if (j != i) msg += h.col(j);
                }
                msg /= static_cast<double>(n - 1);
            }
            Eigen::VectorXd own = ws * h.col(i);
            Eigen::VectorXd agg = wn * msg;
            next.col(i) = (own + agg).cwiseMax(0.0);
        }
        h = std::move(next);
    }
    return h;
}

std::vector<Tape::Node> gnn_forward_tape(Tape& tape, Gnn& gnn, const Eigen::MatrixXd& feats, bool train) {
    if (feats.rows() != gnn.dims.front()) {
        throw std::invalid_argument("gnn_forward_tape: feature dimension mismatch");
    }
    const Eigen::Index n = feats.cols();
    std::vector<Tape::Node> h;
    h.reserve(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        h.push_back(tape.constant(feats.col(i)));
    }
    for (std::size_t k = 0; k < gnn.layers.size(); ++k) {
        std::vector<Tape::Node> next;
        next.reserve(h.size());
        for (Eigen::Index i = 0; i < n; ++i) {
            Tape::Node msg;
            if (n > 1) {
                std::vector<Tape::Node> neigh;
                neigh.reserve(static_cast<std::size_t>(n - 1));
                for (Eigen::Index j = 0; j < n; ++j) {
                    if (j != i) neigh.push_back(h[static_cast<std::size_t>(j)]);
                }
                msg = tape.mean(neigh);
            } else {
                msg = tape.constant(Eigen::VectorXd::Zero(tape.value(h[0]).size()));
            }
            Tape::Node own = tape.matvec(gnn.params, gnn.layers[k].w_self, h[static_cast<std::size_t>(i)], train);
            Tape::Node agg = tape.matvec(gnn.params, gnn.layers[k].w_neigh, msg, train);
            next.push_back(tape.relu(tape.add(own, agg)));
        }
        h = std::move(next);
    }
    return h;
}

Observation build_observation(int node_id, const ClusterGraph& g,
                              const Eigen::MatrixXd& feats, const Eigen::MatrixXd& embeddings) {
    const int idx = g.index_of(node_id);
    if (idx < 0) {
        throw std::invalid_argument("build_observation: unknown node " + std::to_string(node_id));
    }
    if (feats.cols() != static_cast<Eigen::Index>(g.nodes.size()) ||
        embeddings.cols() != static_cast<Eigen::Index>(g.nodes.size())) {
        throw std::invalid_argument("build_observation: stale feature/embedding snapshot");
    }
    Observation o(feats.rows() + embeddings.rows());
    o.head(feats.rows()) = feats.col(idx);
    o.tail(embeddings.rows()) = embeddings.col(idx);
    return o;
}

}  // namespace agmarl
