#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <agmarl/cluster.hpp>
#include <agmarl/rng.hpp>

#include <cmath>

using namespace agmarl;

namespace {

NodeState make_node(int id, int cpu_cap, int mem_cap, int cpu_alloc = 0, int mem_alloc = 0) {
    NodeState n;
    n.node_id = id;
    n.cpu_capacity_mcpu = cpu_cap;
    n.mem_capacity_mib = mem_cap;
    n.cpu_allocated_mcpu = cpu_alloc;
    n.mem_allocated_mib = mem_alloc;
    return n;
}

}  // namespace

TEST_CASE("metric_ft spec points") {
    CHECK(metric_ft(true, 0.0) == 0.0);
    CHECK(metric_ft(false, 0.0) == 1.0);
    // ln(1 + (e-1)) = 1 exactly
    CHECK(metric_ft(false, std::exp(1.0) - 1.0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(metric_ft(false, 2.0) == doctest::Approx(1.0 / (1.0 + std::log(3.0))).epsilon(1e-15));
    CHECK(metric_ft(false, 2.0) == doctest::Approx(0.4765).epsilon(1e-3));
}

TEST_CASE("metric_ft properties") {
    Rng rng(11);
    for (int i = 0; i < 200; ++i) {
        const double r1 = rng.uniform(0.0, 50.0);
        const double r2 = r1 + rng.uniform(0.0, 50.0);
        CHECK(metric_ft(false, r2) <= metric_ft(false, r1));
        CHECK(metric_ft(true, r1) == 0.0);
        CHECK(metric_ft(false, r1) <= 1.0);
        CHECK(metric_ft(false, r1) > 0.0);
    }
}

TEST_CASE("metric_util spec points and errors") {
    CHECK(metric_util(make_node(0, 4000, 16384, 4000, 16384)) == 1.0);
    CHECK(metric_util(make_node(0, 4000, 16384, 0, 0)) == 0.0);
    CHECK(metric_util(make_node(0, 4000, 16384, 2000, 8192)) == 0.5);
    CHECK_THROWS_AS(metric_util(make_node(0, 0, 16384)), std::invalid_argument);
    CHECK_THROWS_AS(metric_util(make_node(0, 4000, 0)), std::invalid_argument);
}

TEST_CASE("metric_util linear in each allocation") {
    NodeState a = make_node(0, 4000, 16384, 1000, 4096);
    NodeState b = a;
    b.cpu_allocated_mcpu += 1000;
    NodeState c = b;
    c.cpu_allocated_mcpu += 1000;
    const double d1 = metric_util(b) - metric_util(a);
    const double d2 = metric_util(c) - metric_util(b);
    CHECK(d1 == doctest::Approx(d2).epsilon(1e-12));
}

TEST_CASE("metric_cost spec points") {
    CostTable costs;
    NodeState std_node = make_node(0, 4000, 16384);
    CHECK(metric_cost(std_node, costs) == 1.0);

    costs.standard = 2.0;
    CHECK(metric_cost(std_node, costs) == 0.5);

    NodeState hm = make_node(1, 4000, 32768);
    hm.cost_class = CostClass::HighMem;
    CHECK(metric_cost(hm, CostTable{}) == doctest::Approx(0.74074).epsilon(1e-5));

    CostTable broken;
    broken.spot = 0.0;
    NodeState spot = make_node(2, 2000, 8192);
    spot.cost_class = CostClass::Spot;
    CHECK_THROWS_AS(metric_cost(spot, broken), std::invalid_argument);
    // strictly decreasing in cost
    CostTable lo, hi;
    lo.standard = 1.0;
    hi.standard = 1.5;
    CHECK(metric_cost(std_node, lo) > metric_cost(std_node, hi));
}

TEST_CASE("compute_stress spec points") {
    ClusterGraph g;
    for (int i = 0; i < 4; ++i) g.nodes.push_back(make_node(i, 4000, 16384));
    CHECK(compute_stress(g) == 0.0);

    for (NodeState& n : g.nodes) {
        n.cpu_allocated_mcpu = 4000;
        n.mem_allocated_mib = 16384;
        n.memory_pressure = true;
        n.restarts_window = 10;
    }
    CHECK(compute_stress(g) == 1.0);

    // 4 nodes at util 0.5, one pressured, zero restarts
    for (NodeState& n : g.nodes) {
        n.cpu_allocated_mcpu = 2000;
        n.mem_allocated_mib = 8192;
        n.memory_pressure = false;
        n.restarts_window = 0;
    }
    g.nodes[1].memory_pressure = true;
    CHECK(compute_stress(g) == doctest::Approx(0.325).epsilon(1e-12));

    ClusterGraph empty;
    CHECK_THROWS_AS(compute_stress(empty), std::invalid_argument);
}

TEST_CASE("compute_stress monotone in each driver") {
    ClusterGraph g;
    for (int i = 0; i < 4; ++i) g.nodes.push_back(make_node(i, 4000, 16384, 1000, 4096));
    const double base = compute_stress(g);

    ClusterGraph more_util = g;
    more_util.nodes[0].cpu_allocated_mcpu = 3000;
    CHECK(compute_stress(more_util) >= base);

    ClusterGraph pressured = g;
    pressured.nodes[0].disk_pressure = true;
    CHECK(compute_stress(pressured) >= base);

    ClusterGraph restarts = g;
    restarts.nodes[2].restarts_window = 7;
    CHECK(compute_stress(restarts) >= base);
}

TEST_CASE("raw_features ordering and bounds") {
    ClusterGraph g;
    g.nodes.push_back(make_node(0, 4000, 16384));
    g.nodes.push_back(make_node(1, 4000, 32768));
    g.stress = 0.0;

    const RawFeatures fresh = raw_features(g.nodes[0], g);
    CHECK(fresh[0] == 0.0);
    CHECK(fresh[1] == 0.0);
    CHECK(fresh[2] == 1.0);          // same cpu cap as the max
    CHECK(fresh[3] == 0.5);          // half the max memory
    CHECK(fresh[4] == 0.0);
    CHECK(fresh[5] == 0.0);
    CHECK(fresh[6] == 1.0);
    CHECK(fresh[7] == 0.0);
    CHECK(fresh[8] == 0.0);
    CHECK(fresh[9] == 0.0);

    g.nodes[0].memory_pressure = true;
    CHECK(raw_features(g.nodes[0], g)[4] == 1.0);

    g.nodes[0].restarts_window = 100;
    CHECK(raw_features(g.nodes[0], g)[8] == 1.0);
    g.nodes[0].restarts_window = 10000;  // capped
    CHECK(raw_features(g.nodes[0], g)[8] == 1.0);

    g.nodes[0].taints = {"a", "b", "c", "d", "e", "f", "g"};
    CHECK(raw_features(g.nodes[0], g)[7] == 1.0);
}

TEST_CASE("raw_features always in [0,1]^10") {
    Rng rng(23);
    for (int trial = 0; trial < 100; ++trial) {
        ClusterGraph g;
        const int n = rng.uniform_int(1, 8);
        for (int i = 0; i < n; ++i) {
            NodeState node = make_node(i, rng.uniform_int(1000, 8000), rng.uniform_int(4096, 65536));
            node.cpu_allocated_mcpu = rng.uniform_int(0, node.cpu_capacity_mcpu);
            node.mem_allocated_mib = rng.uniform_int(0, node.mem_capacity_mib);
            node.memory_pressure = rng.uniform() < 0.3;
            node.disk_pressure = rng.uniform() < 0.2;
            node.ready = rng.uniform() < 0.9;
            node.restarts_window = rng.uniform_int(0, 500);
            for (int t = 0; t < rng.uniform_int(0, 8); ++t) node.taints.push_back("k" + std::to_string(t));
            g.nodes.push_back(std::move(node));
        }
        g.stress = compute_stress(g);
        const Eigen::MatrixXd feats = raw_feature_matrix(g);
        REQUIRE(feats.rows() == 10);
        REQUIRE(feats.cols() == n);
        CHECK(feats.minCoeff() >= 0.0);
        CHECK(feats.maxCoeff() <= 1.0);
    }
}
