#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <agmarl/gnn.hpp>

using namespace agmarl;

namespace {

Eigen::MatrixXd random_feats(int n, Rng& rng) {
    Eigen::MatrixXd f(kRawFeatureDim, n);
    for (Eigen::Index c = 0; c < f.cols(); ++c) {
        for (Eigen::Index r = 0; r < f.rows(); ++r) {
            f(r, c) = rng.uniform();
        }
    }
    return f;
}

// one hand-built 2->2 layer on a 3-node graph
Gnn tiny_gnn(const Eigen::MatrixXd& w_self, const Eigen::MatrixXd& w_neigh) {
    Gnn g;
    g.dims = {2, 2};
    GnnLayer layer;
    layer.w_self = g.params.add("gnn.layer0.w_self", w_self, 2);
    layer.w_neigh = g.params.add("gnn.layer0.w_neigh", w_neigh, 2);
    g.layers.push_back(layer);
    return g;
}

}  // namespace

TEST_CASE("zero weights produce zero embeddings") {
    Gnn gnn = make_gnn(1);
    for (auto& e : gnn.params.entries()) e.value.setZero();
    Rng rng(2);
    const Eigen::MatrixXd emb = gnn_forward(gnn, random_feats(4, rng));
    REQUIRE(emb.rows() == kEmbeddingDim);
    REQUIRE(emb.cols() == 4);
    CHECK(emb.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("identical node features give identical embeddings") {
    Gnn gnn = make_gnn(7);
    Eigen::MatrixXd feats(kRawFeatureDim, 5);
    Rng rng(3);
    Eigen::VectorXd one(kRawFeatureDim);
    for (int i = 0; i < kRawFeatureDim; ++i) one[i] = rng.uniform();
    for (int c = 0; c < 5; ++c) feats.col(c) = one;
    const Eigen::MatrixXd emb = gnn_forward(gnn, feats);
    for (int c = 1; c < 5; ++c) {
        CHECK((emb.col(c) - emb.col(0)).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("hand-computed single layer on 3 nodes") {
    Eigen::MatrixXd ws(2, 2), wn(2, 2);
    ws << 0.5, -1.0, 2.0, 0.25;
    wn << 1.0, 1.0, -0.5, 0.75;
    Gnn gnn = tiny_gnn(ws, wn);

    Eigen::MatrixXd h(2, 3);
    h << 1.0, 0.2, -0.4,
         0.0, 0.6, 1.0;
    const Eigen::MatrixXd emb = gnn_forward(gnn, h);

    for (int i = 0; i < 3; ++i) {
        Eigen::VectorXd msg = Eigen::VectorXd::Zero(2);
        for (int j = 0; j < 3; ++j) {
            if (j != i) msg += h.col(j);
        }
        msg /= 2.0;
        const Eigen::VectorXd expect = (ws * h.col(i) + wn * msg).cwiseMax(0.0);
        CHECK((emb.col(i) - expect).cwiseAbs().maxCoeff() == doctest::Approx(0.0).epsilon(1e-15));
    }
}

TEST_CASE("single-node graph aggregates the zero message") {
    Eigen::MatrixXd ws = Eigen::MatrixXd::Identity(2, 2);
    Eigen::MatrixXd wn = Eigen::MatrixXd::Constant(2, 2, 100.0);  // must not contribute
    Gnn gnn = tiny_gnn(ws, wn);
    Eigen::MatrixXd h(2, 1);
    h << 0.3, -0.7;
    const Eigen::MatrixXd emb = gnn_forward(gnn, h);
    CHECK(emb(0, 0) == 0.3);
    CHECK(emb(1, 0) == 0.0);  // relu
}

TEST_CASE("permutation equivariance") {
    Gnn gnn = make_gnn(11);
    Rng rng(4);
    const Eigen::MatrixXd feats = random_feats(6, rng);
    const Eigen::MatrixXd emb = gnn_forward(gnn, feats);

    const std::vector<int> perm = {3, 0, 5, 1, 4, 2};
    Eigen::MatrixXd shuffled(kRawFeatureDim, 6);
    for (int c = 0; c < 6; ++c) shuffled.col(c) = feats.col(perm[c]);
    const Eigen::MatrixXd emb_shuffled = gnn_forward(gnn, shuffled);
    for (int c = 0; c < 6; ++c) {
        CHECK((emb_shuffled.col(c) - emb.col(perm[c])).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("every node's features reach every embedding") {
    Gnn gnn = make_gnn(13);
    Rng rng(6);
    Eigen::MatrixXd feats = random_feats(4, rng);
    const Eigen::MatrixXd base = gnn_forward(gnn, feats);
    feats(2, 3) += 0.25;  // perturb node 3 only
    const Eigen::MatrixXd bumped = gnn_forward(gnn, feats);
    for (int c = 0; c < 4; ++c) {
        CHECK((bumped.col(c) - base.col(c)).cwiseAbs().maxCoeff() > 0.0);
    }
}

TEST_CASE("tape forward matches the straight-line forward") {
    Gnn gnn = make_gnn(17);
    Rng rng(8);
    const Eigen::MatrixXd feats = random_feats(5, rng);
    const Eigen::MatrixXd plain = gnn_forward(gnn, feats);
    Tape tape;
    const std::vector<Tape::Node> nodes = gnn_forward_tape(tape, gnn, feats, false);
    REQUIRE(nodes.size() == 5);
    for (int c = 0; c < 5; ++c) {
        CHECK((tape.value(nodes[static_cast<std::size_t>(c)]) - plain.col(c)).cwiseAbs().maxCoeff() <
              1e-15);
    }
}

TEST_CASE("gradients through the encoder pass the finite-difference check") {
    Gnn gnn = make_gnn(19);
    Rng rng(9);
    const Eigen::MatrixXd feats = random_feats(3, rng);
    const double err = grad_check(
        [&](Tape& tape) {
            const std::vector<Tape::Node> emb = gnn_forward_tape(tape, gnn, feats, true);
            return tape.squared_error(tape.concat(emb),
                                      Eigen::VectorXd::Constant(3 * kEmbeddingDim, 0.1));
        },
        gnn.params, 1e-5);
    CHECK(err < 1e-4);
}

TEST_CASE("dimension mismatch rejected") {
    Gnn gnn = make_gnn(23);
    CHECK_THROWS_AS(gnn_forward(gnn, Eigen::MatrixXd::Zero(7, 3)), std::invalid_argument);
}

TEST_CASE("build_observation spec points") {
    ClusterGraph g;
    for (int i = 0; i < 3; ++i) {
        NodeState n;
        n.node_id = i;
        n.cpu_capacity_mcpu = 4000;
        n.mem_capacity_mib = 16384;
        g.nodes.push_back(n);
    }
    SUBCASE("all zeros") {
        const Eigen::MatrixXd feats = Eigen::MatrixXd::Zero(kRawFeatureDim, 3);
        const Eigen::MatrixXd emb = Eigen::MatrixXd::Zero(kEmbeddingDim, 3);
        const Observation o = build_observation(1, g, feats, emb);
        REQUIRE(o.size() == kObservationDim);
        CHECK(o.cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("raw features first, embedding second") {
        const Eigen::MatrixXd feats = Eigen::MatrixXd::Constant(kRawFeatureDim, 3, 0.1);
        const Eigen::MatrixXd emb = Eigen::MatrixXd::Constant(kEmbeddingDim, 3, 0.2);
        const Observation o = build_observation(2, g, feats, emb);
        REQUIRE(o.size() == 26);
        for (int i = 0; i < 10; ++i) CHECK(o[i] == 0.1);
        for (int i = 10; i < 26; ++i) CHECK(o[i] == 0.2);
    }
    SUBCASE("unknown node rejected") {
        const Eigen::MatrixXd feats = Eigen::MatrixXd::Zero(kRawFeatureDim, 3);
        const Eigen::MatrixXd emb = Eigen::MatrixXd::Zero(kEmbeddingDim, 3);
        CHECK_THROWS_AS(build_observation(9, g, feats, emb), std::invalid_argument);
    }
}
