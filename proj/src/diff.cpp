#include <agmarl/diff.hpp>
#include <algorithm>

#include <cmath>
#include <stdexcept>

namespace agmarl {

Tensor Tensor::from(const Eigen::MatrixXd& m, int rank) {
    Tensor t;
    if (rank == 1) {
        t.shape = {static_cast<std::size_t>(m.rows())};
    } else {
        t.shape = {static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols())};
    }
    t.data.reserve(static_cast<std::size_t>(m.size()));
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            t.data.push_back(m(r, c));
        }
    }
    return t;
}

Eigen::MatrixXd Tensor::to_matrix() const {
    const std::size_t rows = shape.empty() ? 0 : shape[0];
    const std::size_t cols = shape.size() > 1 ? shape[1] : 1;
    if (rows * cols != data.size()) {
        throw std::invalid_argument("Tensor: shape does not match data length");
    }
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    std::size_t k = 0;
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            m(r, c) = data[k++];
        }
    }
    return m;
}

std::size_t Tensor::element_count() const {
    std::size_t n = 1;
    for (std::size_t d : shape) n *= d;
    return shape.empty() ? 0 : n;
}

int ParamStore::add(const std::string& name, Eigen::MatrixXd value, int rank) {
    Entry e;
    e.name = name;
    e.grad = Eigen::MatrixXd::Zero(value.rows(), value.cols());
    e.value = std::move(value);
    e.rank = rank;
    entries_.push_back(std::move(e));
    return static_cast<int>(entries_.size()) - 1;
}

int ParamStore::add_matrix(const std::string& name, int rows, int cols, Rng& rng) {
    const double bound = std::sqrt(6.0 / (rows + cols));
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            m(r, c) = rng.uniform(-bound, bound);
        }
    }
    return add(name, std::move(m), 2);
}

int ParamStore::add_vector_zero(const std::string& name, int len) {
    return add(name, Eigen::MatrixXd::Zero(len, 1), 1);
}

int ParamStore::find(const std::string& name) const {
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        if (entries_[i].name == name) return static_cast<int>(i);
    }
    return -1;
}

void ParamStore::zero_grads() {
    for (Entry& e : entries_) e.grad.setZero();
}

std::size_t ParamStore::scalar_count() const {
    std::size_t n = 0;
    for (const Entry& e : entries_) n += static_cast<std::size_t>(e.value.size());
    return n;
}

DenseLayer make_dense(ParamStore& store, const std::string& prefix, int in, int out, Activation act, Rng& rng) {
    DenseLayer l;
    l.w = store.add_matrix(prefix + ".w", out, in, rng);
    l.b = store.add_vector_zero(prefix + ".b", out);
    l.act = act;
    l.in = in;
    l.out = out;
    return l;
}

Eigen::VectorXd apply_activation(Activation act, const Eigen::VectorXd& v) {
    switch (act) {
        case Activation::Identity:
            return v;
        case Activation::ReLU:
            return v.cwiseMax(0.0);
        case Activation::Sigmoid: {
            // clamped away from the saturation points so the (0,1) output
            // contract holds for every finite logit
            constexpr double kLo = 1e-15;
            constexpr double kHi = 1.0 - 1e-15;
            Eigen::VectorXd out(v.size());
            for (Eigen::Index i = 0; i < v.size(); ++i) {
                out[i] = std::clamp(1.0 / (1.0 + std::exp(-v[i])), kLo, kHi);
            }
            return out;
        }
    }
    throw std::logic_error("unknown activation");
}

Eigen::VectorXd forward_dense(const ParamStore& store, const DenseLayer& layer, const Eigen::VectorXd& x) {
    const Eigen::MatrixXd& w = store.at(layer.w).value;
    if (x.size() != w.cols()) {
        throw std::invalid_argument("forward_dense: input length does not match layer");
    }
    Eigen::VectorXd pre = w * x;
    pre += store.at(layer.b).value.col(0);
    return apply_activation(layer.act, pre);
}

Tape::Node Tape::push(Rec rec) {
    nodes_.push_back(std::move(rec));
    return static_cast<Node>(nodes_.size()) - 1;
}

Tape::Node Tape::constant(Eigen::VectorXd v) {
    Rec r;
    r.op = Op::Constant;
    r.value = std::move(v);
    return push(std::move(r));
}

Tape::Node Tape::param_vector(ParamStore& store, int param_id, bool train) {
    Rec r;
    r.op = Op::Param;
    r.value = store.at(param_id).value.col(0);
    r.store = &store;
    r.param_id = param_id;
    r.train = train;
    return push(std::move(r));
}

Tape::Node Tape::matvec(ParamStore& store, int w_id, Node x, bool train) {
    Rec r;
    r.op = Op::MatVec;
    const Eigen::MatrixXd& w = store.at(w_id).value;
    const Eigen::VectorXd& xv = value(x);
    if (xv.size() != w.cols()) {
        throw std::invalid_argument("matvec: input length does not match matrix");
    }
    r.value = w * xv;
    r.inputs = {x};
    r.store = &store;
    r.param_id = w_id;
    r.train = train;
    return push(std::move(r));
}

Tape::Node Tape::add(Node a, Node b) {
    if (value(a).size() != value(b).size()) {
        throw std::invalid_argument("add: length mismatch");
    }
    Rec r;
    r.op = Op::Add;
    r.value = value(a) + value(b);
    r.inputs = {a, b};
    return push(std::move(r));
}

Tape::Node Tape::relu(Node x) {
    Rec r;
    r.op = Op::ReLU;
    r.value = value(x).cwiseMax(0.0);
    r.inputs = {x};
    return push(std::move(r));
}

Tape::Node Tape::sigmoid(Node x) {
    Rec r;
    r.op = Op::Sigmoid;
    r.value = apply_activation(Activation::Sigmoid, value(x));
    r.inputs = {x};
    return push(std::move(r));
}

Tape::Node Tape::activation(Activation act, Node x) {
    switch (act) {
        case Activation::Identity: return x;
        case Activation::ReLU: return relu(x);
        case Activation::Sigmoid: return sigmoid(x);
    }
    throw std::logic_error("unknown activation");
}

Tape::Node Tape::dense(ParamStore& store, const DenseLayer& layer, Node x, bool train) {
    Node wx = matvec(store, layer.w, x, train);
    Node bias = param_vector(store, layer.b, train);
    return activation(layer.act, add(wx, bias));
}

Tape::Node Tape::mean(const std::vector<Node>& xs) {
    if (xs.empty()) {
        throw std::invalid_argument("mean: no inputs");
    }
    Rec r;
    r.op = Op::Mean;
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(value(xs[0]).size());
    for (Node n : xs) {
        if (value(n).size() != acc.size()) {
            throw std::invalid_argument("mean: length mismatch");
        }
        acc += value(n);
    }
    acc /= static_cast<double>(xs.size());
    r.value = std::move(acc);
    r.inputs = xs;
    return push(std::move(r));
}

Tape::Node Tape::concat(const std::vector<Node>& xs) {
    Rec r;
    r.op = Op::Concat;
    Eigen::Index total = 0;
    for (Node n : xs) total += value(n).size();
    Eigen::VectorXd out(total);
    Eigen::Index off = 0;
    for (Node n : xs) {
        out.segment(off, value(n).size()) = value(n);
        off += value(n).size();
    }
    r.value = std::move(out);
    r.inputs = xs;
    return push(std::move(r));
}

Tape::Node Tape::scale(Node x, double factor) {
    Rec r;
    r.op = Op::Scale;
    r.value = value(x) * factor;
    r.inputs = {x};
    r.factor = factor;
    return push(std::move(r));
}

Tape::Node Tape::squared_error(Node x, const Eigen::VectorXd& target) {
    if (value(x).size() != target.size()) {
        throw std::invalid_argument("squared_error: length mismatch");
    }
    Rec r;
    r.op = Op::SquaredError;
    Eigen::VectorXd s(1);
    s[0] = (value(x) - target).squaredNorm();
    r.value = std::move(s);
    r.inputs = {x};
    r.target = target;
    return push(std::move(r));
}

Tape::Node Tape::negate_scalar(Node x) {
    if (value(x).size() != 1) {
        throw std::invalid_argument("negate_scalar: node is not scalar");
    }
    Rec r;
    r.op = Op::NegateScalar;
    r.value = -value(x);
    r.inputs = {x};
    return push(std::move(r));
}

double Tape::scalar(Node n) const {
    const Eigen::VectorXd& v = value(n);
    if (v.size() != 1) {
        throw std::invalid_argument("scalar: node is not length 1");
    }
    return v[0];
}

void Tape::backward(Node loss) {
    if (value(loss).size() != 1) {
        throw std::invalid_argument("backward: loss must be scalar");
    }
    std::vector<Eigen::VectorXd> adjoint(nodes_.size());
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        adjoint[i] = Eigen::VectorXd::Zero(nodes_[i].value.size());
    }
    adjoint[static_cast<std::size_t>(loss)][0] = 1.0;

    for (int i = static_cast<int>(nodes_.size()) - 1; i >= 0; --i) {
        const Rec& rec = nodes_[static_cast<std::size_t>(i)];
        const Eigen::VectorXd& g = adjoint[static_cast<std::size_t>(i)];
        if (g.isZero(0.0)) continue;
        switch (rec.op) {
            case Op::Constant:
                break;
            case Op::Param:
                if (rec.train) {
                    rec.store->at(rec.param_id).grad.col(0) += g;
                }
                break;
            case Op::MatVec: {
                const Eigen::MatrixXd& w = rec.store->at(rec.param_id).value;
                const Eigen::VectorXd& x = nodes_[static_cast<std::size_t>(rec.inputs[0])].value;
                if (rec.train) {
                    rec.store->at(rec.param_id).grad += g * x.transpose();
                }
                adjoint[static_cast<std::size_t>(rec.inputs[0])] += w.transpose() * g;
                break;
            }
            case Op::Add:
                adjoint[static_cast<std::size_t>(rec.inputs[0])] += g;
                adjoint[static_cast<std::size_t>(rec.inputs[1])] += g;
                break;
            case Op::ReLU: {
                const Eigen::VectorXd& x = nodes_[static_cast<std::size_t>(rec.inputs[0])].value;
                Eigen::VectorXd& ga = adjoint[static_cast<std::size_t>(rec.inputs[0])];
                for (Eigen::Index k = 0; k < x.size(); ++k) {
                    if (x[k] > 0.0) ga[k] += g[k];
                }
                break;
            }
            case Op::Sigmoid: {
                Eigen::VectorXd& ga = adjoint[static_cast<std::size_t>(rec.inputs[0])];
                for (Eigen::Index k = 0; k < rec.value.size(); ++k) {
                    ga[k] += g[k] * rec.value[k] * (1.0 - rec.value[k]);
                }
                break;
            }
            case Op::Mean: {
                const double f = 1.0 / static_cast<double>(rec.inputs.size());
                for (Node in : rec.inputs) {
                    adjoint[static_cast<std::size_t>(in)] += g * f;
                }
                break;
            }
            case Op::Concat: {
                Eigen::Index off = 0;
                for (Node in : rec.inputs) {
                    Eigen::VectorXd& ga = adjoint[static_cast<std::size_t>(in)];
                    ga += g.segment(off, ga.size());
                    off += ga.size();
                }
                break;
            }
            case Op::Scale:
                adjoint[static_cast<std::size_t>(rec.inputs[0])] += g * rec.factor;
                break;
            case Op::SquaredError: {
                const Eigen::VectorXd& x = nodes_[static_cast<std::size_t>(rec.inputs[0])].value;
                adjoint[static_cast<std::size_t>(rec.inputs[0])] += 2.0 * g[0] * (x - rec.target);
                break;
            }
            case Op::NegateScalar:
                adjoint[static_cast<std::size_t>(rec.inputs[0])][0] -= g[0];
                break;
        }
    }
}

double grad_check(const std::function<Tape::Node(Tape&)>& build, ParamStore& store, double eps) {
    if (!(eps >= 1e-7 && eps <= 1e-3)) {
        throw std::invalid_argument("grad_check: eps outside [1e-7, 1e-3]");
    }
    store.zero_grads();
    {
        Tape tape;
        Tape::Node loss = build(tape);
        if (!std::isfinite(tape.scalar(loss))) {
            throw std::runtime_error("grad_check: non-finite loss");
        }
        tape.backward(loss);
    }
    std::vector<Eigen::MatrixXd> analytic;
    analytic.reserve(store.size());
    for (const ParamStore::Entry& e : store.entries()) {
        analytic.push_back(e.grad);
    }
    store.zero_grads();

    const auto eval = [&]() {
        Tape tape;
        return tape.scalar(build(tape));
    };

    double max_rel = 0.0;
    for (std::size_t p = 0; p < store.size(); ++p) {
        Eigen::MatrixXd& v = store.at(static_cast<int>(p)).value;
        for (Eigen::Index r = 0; r < v.rows(); ++r) {
            for (Eigen::Index c = 0; c < v.cols(); ++c) {
                const double keep = v(r, c);
                v(r, c) = keep + eps;
                const double plus = eval();
                v(r, c) = keep - eps;
                const double minus = eval();
                v(r, c) = keep;
                if (!std::isfinite(plus) || !std::isfinite(minus)) {
                    throw std::runtime_error("grad_check: non-finite perturbed loss");
                }
                const double numeric = (plus - minus) / (2.0 * eps);
                const double a = analytic[p](r, c);
                const double rel = std::abs(a - numeric) / std::max(1e-8, std::abs(a) + std::abs(numeric));
                max_rel = std::max(max_rel, rel);
            }
        }
    }
    return max_rel;
}

void Adam::step(ParamStore& store, double lr) {
    if (moments_.empty()) {
        moments_.resize(store.size());
        for (std::size_t i = 0; i < store.size(); ++i) {
            const ParamStore::Entry& e = store.at(static_cast<int>(i));
            moments_[i].m = Eigen::MatrixXd::Zero(e.value.rows(), e.value.cols());
            moments_[i].v = Eigen::MatrixXd::Zero(e.value.rows(), e.value.cols());
        }
    }
    if (moments_.size() != store.size()) {
        throw std::invalid_argument("Adam: store layout changed");
    }
    ++step_count_;
    const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(step_count_));
    const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(step_count_));
    for (std::size_t i = 0; i < store.size(); ++i) {
        ParamStore::Entry& e = store.at(static_cast<int>(i));
        Moments& mo = moments_[i];
        mo.m = beta1_ * mo.m + (1.0 - beta1_) * e.grad;
        mo.v = beta2_ * mo.v + (1.0 - beta2_) * e.grad.cwiseProduct(e.grad);
        const Eigen::MatrixXd m_hat = mo.m / bc1;
        const Eigen::MatrixXd v_hat = mo.v / bc2;
        e.value -= lr * (m_hat.array() / (v_hat.array().sqrt() + eps_)).matrix();
        e.grad.setZero();
    }
}

void soft_update(const ParamStore& online, ParamStore& target, double tau) {
    if (!(tau >= 0.0 && tau <= 1.0)) {
        throw std::invalid_argument("soft_update: tau outside [0,1]");
    }
    if (online.size() != target.size()) {
        throw std::invalid_argument("soft_update: store layout mismatch");
    }
    for (std::size_t i = 0; i < online.size(); ++i) {
        const Eigen::MatrixXd& on = online.at(static_cast<int>(i)).value;
        Eigen::MatrixXd& tg = target.at(static_cast<int>(i)).value;
        if (on.rows() != tg.rows() || on.cols() != tg.cols()) {
            throw std::invalid_argument("soft_update: shape mismatch at " + online.at(static_cast<int>(i)).name);
        }
        tg = tau * on + (1.0 - tau) * tg;
    }
}

}  // namespace agmarl
