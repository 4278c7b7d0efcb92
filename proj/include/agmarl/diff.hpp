#pragma once

#include <Eigen/Dense>

#include <agmarl/rng.hpp>

#include <functional>
#include <string>
#include <vector>

namespace agmarl {

enum class Activation { Identity, ReLU, Sigmoid };

// Shape + flat row-major data; the in-memory mirror of one record in the
// weights container. Parameters live as Eigen matrices, this is the
// serialisation boundary.
struct Tensor {
    std::vector<std::size_t> shape;
    std::vector<double> data;  // row-major

    static Tensor from(const Eigen::MatrixXd& m, int rank);
    Eigen::MatrixXd to_matrix() const;  // rank 1 -> n x 1
    std::size_t element_count() const;
};

// Named, ordered parameter collection with matching gradient accumulators.
// Vectors are stored as n x 1 matrices; rank records the logical shape for
// serialisation.
class ParamStore {
public:
    struct Entry {
        std::string name;
        Eigen::MatrixXd value;
        Eigen::MatrixXd grad;
        int rank = 2;
    };

    int add(const std::string& name, Eigen::MatrixXd value, int rank);
    int add_matrix(const std::string& name, int rows, int cols, Rng& rng);  // Glorot-uniform
    int add_vector_zero(const std::string& name, int len);

    Entry& at(int id) { return entries_[static_cast<std::size_t>(id)]; }
    const Entry& at(int id) const { return entries_[static_cast<std::size_t>(id)]; }
    int find(const std::string& name) const;  // -1 when absent

    std::size_t size() const { return entries_.size(); }
    const std::vector<Entry>& entries() const { return entries_; }
    std::vector<Entry>& entries() { return entries_; }

    void zero_grads();
    std::size_t scalar_count() const;

private:
    std::vector<Entry> entries_;
};

struct DenseLayer {
    int w = -1;
    int b = -1;
    Activation act = Activation::Identity;
    int in = 0;
    int out = 0;
};

DenseLayer make_dense(ParamStore& store, const std::string& prefix, int in, int out, Activation act, Rng& rng);

/// act(W x + b). Throws on input length mismatch.
Eigen::VectorXd forward_dense(const ParamStore& store, const DenseLayer& layer, const Eigen::VectorXd& x);

Eigen::VectorXd apply_activation(Activation act, const Eigen::VectorXd& v);

// Reverse-mode tape over vector-valued nodes. A tape is built per forward
// pass and discarded; backward() accumulates parameter gradients into the
// owning ParamStores. Single-owner during a step.
class Tape {
public:
    using Node = int;

    Node constant(Eigen::VectorXd v);
    Node param_vector(ParamStore& store, int param_id, bool train = true);
    Node matvec(ParamStore& store, int w_id, Node x, bool train = true);
    Node add(Node a, Node b);
    Node relu(Node x);
    Node sigmoid(Node x);
    Node activation(Activation act, Node x);
    /// act(W x + b)
    Node dense(ParamStore& store, const DenseLayer& layer, Node x, bool train = true);
    /// elementwise mean of same-length vectors
    Node mean(const std::vector<Node>& xs);
    Node concat(const std::vector<Node>& xs);
    Node scale(Node x, double factor);
    /// length-1 node: sum((x - target)^2)
    Node squared_error(Node x, const Eigen::VectorXd& target);
    /// length-1 node: -x[0]
    Node negate_scalar(Node x);

    const Eigen::VectorXd& value(Node n) const { return nodes_[static_cast<std::size_t>(n)].value; }
    double scalar(Node n) const;

    /// Seeds d(loss)/d(loss) = 1 and sweeps in reverse; loss must be length 1.
    /// Gradients accumulate into every trainable parameter reachable from it.
    void backward(Node loss);

private:
    enum class Op { Constant, Param, MatVec, Add, ReLU, Sigmoid, Mean, Concat, Scale, SquaredError, NegateScalar };

    struct Rec {
        Op op;
        Eigen::VectorXd value;
        std::vector<Node> inputs;
        ParamStore* store = nullptr;
        int param_id = -1;
        bool train = false;
        double factor = 0.0;           // Scale
        Eigen::VectorXd target;        // SquaredError
    };

    Node push(Rec rec);
    std::vector<Rec> nodes_;
};

/// Central finite differences over every scalar in `store`, against the
/// tape gradients of the loss built by `build`. Returns the max over
/// parameters of |analytic - numeric| / max(1e-8, |analytic| + |numeric|).
double grad_check(const std::function<Tape::Node(Tape&)>& build, ParamStore& store, double eps);

// First-order adaptive-moment optimizer; moment state persists across steps.
class Adam {
public:
    explicit Adam(double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8)
        : beta1_(beta1), beta2_(beta2), eps_(eps) {}

    /// One update over every entry of the store; gradients are cleared.
    void step(ParamStore& store, double lr);

private:
    struct Moments {
        Eigen::MatrixXd m, v;
    };
    std::vector<Moments> moments_;
    double beta1_, beta2_, eps_;
    long step_count_ = 0;
};

/// Polyak update: target <- tau * online + (1 - tau) * target, elementwise.
/// Stores must have identical layouts.
void soft_update(const ParamStore& online, ParamStore& target, double tau);

}  // namespace agmarl
