#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <agmarl/diff.hpp>

#include <cmath>

using namespace agmarl;

TEST_CASE("forward_dense spec points") {
    ParamStore store;
    SUBCASE("identity") {
        DenseLayer l;
        l.w = store.add("w", Eigen::MatrixXd::Identity(2, 2), 2);
        l.b = store.add("b", Eigen::MatrixXd::Zero(2, 1), 1);
        l.act = Activation::Identity;
        Eigen::VectorXd x(2);
        x << 1, 2;
        const Eigen::VectorXd y = forward_dense(store, l, x);
        CHECK(y[0] == 1.0);
        CHECK(y[1] == 2.0);
    }
    SUBCASE("sigmoid of zero logits") {
        DenseLayer l;
        l.w = store.add("w", Eigen::MatrixXd::Zero(3, 2), 2);
        l.b = store.add("b", Eigen::MatrixXd::Zero(3, 1), 1);
        l.act = Activation::Sigmoid;
        Eigen::VectorXd x(2);
        x << -7.5, 42.0;
        const Eigen::VectorXd y = forward_dense(store, l, x);
        for (int i = 0; i < 3; ++i) CHECK(y[i] == 0.5);
    }
    SUBCASE("relu hand evaluation") {
        Eigen::MatrixXd w(1, 2);
        w << 1, -1;
        DenseLayer l;
        l.w = store.add("w", w, 2);
        l.b = store.add("b", Eigen::MatrixXd::Constant(1, 1, 0.5), 1);
        l.act = Activation::ReLU;
        Eigen::VectorXd x(2);
        x << 2, 1;
        CHECK(forward_dense(store, l, x)[0] == 1.5);
    }
    SUBCASE("shape mismatch") {
        DenseLayer l;
        l.w = store.add("w", Eigen::MatrixXd::Zero(2, 3), 2);
        l.b = store.add("b", Eigen::MatrixXd::Zero(2, 1), 1);
        CHECK_THROWS_AS(forward_dense(store, l, Eigen::VectorXd::Zero(4)), std::invalid_argument);
    }
}

TEST_CASE("sigmoid output strictly inside (0,1)") {
    ParamStore store;
    DenseLayer l;
    l.w = store.add("w", Eigen::MatrixXd::Constant(1, 1, 50.0), 2);
    l.b = store.add("b", Eigen::MatrixXd::Zero(1, 1), 1);
    l.act = Activation::Sigmoid;
    for (double x : {-100.0, -1.0, 0.0, 1.0, 100.0}) {
        Eigen::VectorXd v(1);
        v << x;
        const double y = forward_dense(store, l, v)[0];
        CHECK(y > 0.0);
        CHECK(y < 1.0);
    }
}

TEST_CASE("backward spec points") {
    SUBCASE("linear: d(w x)/dw = x") {
        ParamStore store;
        const int w = store.add("w", Eigen::MatrixXd::Constant(1, 1, 1.7), 2);
        Tape tape;
        Eigen::VectorXd x(1);
        x << 3.0;
        Tape::Node loss = tape.matvec(store, w, tape.constant(x));
        tape.backward(loss);
        CHECK(store.at(w).grad(0, 0) == 3.0);
    }
    SUBCASE("chain rule through sigmoid square") {
        ParamStore store;
        const int w = store.add("w", Eigen::MatrixXd::Zero(1, 1), 1);
        Tape tape;
        Tape::Node s = tape.sigmoid(tape.param_vector(store, w));
        Tape::Node loss = tape.squared_error(s, Eigen::VectorXd::Zero(1));
        CHECK(tape.scalar(loss) == 0.25);
        tape.backward(loss);
        // d/dw sigmoid(w)^2 at 0 = 2 * 0.5 * 0.25
        CHECK(store.at(w).grad(0, 0) == doctest::Approx(0.25).epsilon(1e-15));
    }
    SUBCASE("unreachable parameter keeps zero gradient") {
        ParamStore store;
        const int used = store.add("used", Eigen::MatrixXd::Constant(1, 1, 2.0), 1);
        const int unused = store.add("unused", Eigen::MatrixXd::Constant(1, 1, 5.0), 1);
        Tape tape;
        Tape::Node loss = tape.squared_error(tape.param_vector(store, used), Eigen::VectorXd::Zero(1));
        tape.backward(loss);
        CHECK(store.at(used).grad(0, 0) != 0.0);
        CHECK(store.at(unused).grad(0, 0) == 0.0);
    }
    SUBCASE("non-scalar loss rejected") {
        Tape tape;
        Tape::Node v = tape.constant(Eigen::VectorXd::Zero(3));
        CHECK_THROWS_AS(tape.backward(v), std::invalid_argument);
    }
}

TEST_CASE("backward determinism is bit-exact") {
    Rng rng(5);
    ParamStore store;
    DenseLayer l1 = make_dense(store, "l1", 6, 8, Activation::ReLU, rng);
    DenseLayer l2 = make_dense(store, "l2", 8, 1, Activation::Sigmoid, rng);
    Eigen::VectorXd x(6);
    for (int i = 0; i < 6; ++i) x[i] = rng.uniform(-1, 1);

    auto grads_once = [&]() {
        store.zero_grads();
        Tape tape;
        Tape::Node out = tape.dense(store, l2, tape.dense(store, l1, tape.constant(x)));
        tape.backward(tape.squared_error(out, Eigen::VectorXd::Ones(1)));
        std::vector<Eigen::MatrixXd> out_grads;
        for (const auto& e : store.entries()) out_grads.push_back(e.grad);
        return out_grads;
    };
    const auto a = grads_once();
    const auto b = grads_once();
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK((a[i].array() == b[i].array()).all());
    }
}

TEST_CASE("grad_check spec points") {
    SUBCASE("quadratic loss below 1e-6") {
        ParamStore store;
        Rng rng(3);
        const int w = store.add_matrix("w", 4, 3, rng);
        Eigen::VectorXd x(3), t(4);
        for (int i = 0; i < 3; ++i) x[i] = rng.uniform(-1, 1);
        for (int i = 0; i < 4; ++i) t[i] = rng.uniform(-1, 1);
        const double err = grad_check(
            [&](Tape& tape) { return tape.squared_error(tape.matvec(store, w, tape.constant(x)), t); },
            store, 1e-5);
        CHECK(err < 1e-6);
    }
    SUBCASE("constant loss gives zero error") {
        ParamStore store;
        store.add("p", Eigen::MatrixXd::Constant(2, 1, 0.3), 1);
        const double err = grad_check(
            [](Tape& tape) { return tape.squared_error(tape.constant(Eigen::VectorXd::Ones(1)),
                                                       Eigen::VectorXd::Ones(1)); },
            store, 1e-5);
        CHECK(err == 0.0);
    }
    SUBCASE("eps outside the sanctioned range") {
        ParamStore store;
        store.add("p", Eigen::MatrixXd::Zero(1, 1), 1);
        auto build = [](Tape& tape) {
            return tape.squared_error(tape.constant(Eigen::VectorXd::Zero(1)), Eigen::VectorXd::Zero(1));
        };
        CHECK_THROWS_AS(grad_check(build, store, 1e-8), std::invalid_argument);
        CHECK_THROWS_AS(grad_check(build, store, 1e-2), std::invalid_argument);
    }
}

TEST_CASE("adam spec points") {
    SUBCASE("zero gradients leave parameters unchanged") {
        ParamStore store;
        const int p = store.add("p", Eigen::MatrixXd::Constant(2, 2, 1.5), 2);
        Adam opt;
        opt.step(store, 1e-3);
        CHECK((store.at(p).value.array() == 1.5).all());
    }
    SUBCASE("first step is the bias-corrected unit step") {
        ParamStore store;
        const int p = store.add("p", Eigen::MatrixXd::Constant(1, 1, 2.0), 1);
        store.at(p).grad(0, 0) = 1.0;
        Adam opt;
        opt.step(store, 1e-3);
        CHECK(store.at(p).value(0, 0) == doctest::Approx(2.0 - 1e-3).epsilon(1e-6));
        CHECK(store.at(p).grad(0, 0) == 0.0);  // gradients cleared
    }
    SUBCASE("monotone loss on a convex quadratic") {
        ParamStore store;
        const int p = store.add("p", Eigen::MatrixXd::Zero(1, 1), 1);
        Adam opt;
        const Eigen::VectorXd target = Eigen::VectorXd::Constant(1, 3.0);
        double prev = std::numeric_limits<double>::infinity();
        for (int step = 0; step < 100; ++step) {
            Tape tape;
            Tape::Node loss = tape.squared_error(tape.param_vector(store, p), target);
            const double value = tape.scalar(loss);
            CHECK(value < prev);
            prev = value;
            tape.backward(loss);
            opt.step(store, 1e-3);
        }
    }
}

TEST_CASE("tensor shape/data invariants and row-major round trip") {
    Eigen::MatrixXd m(2, 3);
    m << 1, 2, 3, 4, 5, 6;
    const Tensor t = Tensor::from(m, 2);
    REQUIRE(t.shape == std::vector<std::size_t>{2, 3});
    // row-major flattening
    CHECK(t.data == std::vector<double>{1, 2, 3, 4, 5, 6});
    CHECK(t.element_count() == t.data.size());
    const Eigen::MatrixXd back = t.to_matrix();
    CHECK((back.array() == m.array()).all());

    Tensor bad = t;
    bad.data.pop_back();
    CHECK_THROWS_AS(bad.to_matrix(), std::invalid_argument);
}

TEST_CASE("tape mean and concat backward") {
    ParamStore store;
    const int p = store.add("p", Eigen::MatrixXd::Constant(2, 1, 1.0), 1);
    Tape tape;
    Tape::Node a = tape.param_vector(store, p);
    Tape::Node b = tape.constant(Eigen::VectorXd::Constant(2, 3.0));
    Tape::Node m = tape.mean({a, b});            // (p + 3) / 2
    Tape::Node c = tape.concat({m, a});          // 4 entries
    Tape::Node loss = tape.squared_error(c, Eigen::VectorXd::Zero(4));
    tape.backward(loss);
    // d/dp [ ((p+3)/2)^2 * 2 + p^2 * 2 ] per entry = (p+3)/2 + 2p = 2 + 2 = 4
    CHECK(store.at(p).grad(0, 0) == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(store.at(p).grad(1, 0) == doctest::Approx(4.0).epsilon(1e-12));
}
