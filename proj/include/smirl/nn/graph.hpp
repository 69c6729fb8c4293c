#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "smirl/core/types.hpp"

namespace smirl::nn {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Handle to a node on a Graph.
struct Var {
  std::size_t id = static_cast<std::size_t>(-1);
  const void* owner = nullptr;
};

/// Reverse-mode tape over dense matrices. Every op appends a node holding its
/// value; backward() walks the tape once in reverse. A graph is single-use:
/// build, call backward on a 1x1 node, read gradients.
class Graph {
 public:
  Graph() = default;
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  /// Constant leaf; receives no gradient.
  Var input(Matrix value) { return push(Op::leaf, std::move(value), {}, {}); }
  /// Leaf whose gradient the caller reads back after backward().
  Var param(const Matrix& value) {
    Var v = push(Op::leaf, value, {}, {});
    nodes_[v.id].needs_grad = true;
    return v;
  }

  Var matmul(Var a, Var b) {
    check(a), check(b);
    require(val(a).cols() == val(b).rows(), "Graph::matmul: inner dimensions differ");
    return push(Op::matmul, val(a) * val(b), a, b);
  }
  /// x (n x m) + row vector b (1 x m) broadcast over rows.
  Var add_bias(Var x, Var b) {
    check(x), check(b);
    require(val(b).rows() == 1 && val(b).cols() == val(x).cols(), "Graph::add_bias: bias shape");
    Matrix out = val(x);
    out.rowwise() += val(b).row(0);
    return push(Op::add_bias, std::move(out), x, b);
  }
  Var add(Var a, Var b) { same_shape(a, b, "add"); return push(Op::add, val(a) + val(b), a, b); }
  Var sub(Var a, Var b) { same_shape(a, b, "sub"); return push(Op::sub, val(a) - val(b), a, b); }
  Var mul(Var a, Var b) {
    same_shape(a, b, "mul");
    return push(Op::mul, val(a).cwiseProduct(val(b)), a, b);
  }
  Var scale(Var a, double c) {
    check(a);
    Var v = push(Op::scale, val(a) * c, a, {});
    nodes_[v.id].scalar = c;
    return v;
  }
  Var add_scalar(Var a, double c) {
    check(a);
    return push(Op::add_scalar, (val(a).array() + c).matrix(), a, {});
  }
  Var relu(Var a) { check(a); return push(Op::relu, val(a).cwiseMax(0.0), a, {}); }
  Var tanh(Var a) { check(a); return push(Op::tanh, val(a).array().tanh().matrix(), a, {}); }
  Var sigmoid(Var a) {
    check(a);
    return push(Op::sigmoid, (1.0 / (1.0 + (-val(a).array()).exp())).matrix(), a, {});
  }
  Var exp(Var a) { check(a); return push(Op::exp, val(a).array().exp().matrix(), a, {}); }
  Var square(Var a) { check(a); return push(Op::square, val(a).cwiseAbs2(), a, {}); }
  /// log(1 + e^x), computed stably.
  Var softplus(Var a) {
    check(a);
    Matrix out = val(a).unaryExpr([](double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); });
    return push(Op::softplus, std::move(out), a, {});
  }
  Var sum(Var a) {
    check(a);
    Matrix out(1, 1);
    out(0, 0) = val(a).sum();
    return push(Op::sum, std::move(out), a, {});
  }
  Var mean(Var a) { return scale(sum(a), 1.0 / static_cast<double>(val(a).size())); }
  /// Columns [start, start + count).
  Var slice_cols(Var a, std::size_t start, std::size_t count) {
    check(a);
    require(start + count <= static_cast<std::size_t>(val(a).cols()), "Graph::slice_cols: out of range");
    Matrix out = val(a).middleCols(static_cast<Eigen::Index>(start), static_cast<Eigen::Index>(count));
    Var v = push(Op::slice_cols, std::move(out), a, {});
    nodes_[v.id].index.assign(1, start);
    return v;
  }
  /// Picks column cols[r] from each row r; result is n x 1.
  Var pick(Var a, const std::vector<std::size_t>& cols) {
    check(a);
    require_dim(cols.size(), static_cast<std::size_t>(val(a).rows()), "Graph::pick");
    Matrix out(val(a).rows(), 1);
    for (Eigen::Index r = 0; r < out.rows(); ++r) {
      require(cols[static_cast<std::size_t>(r)] < static_cast<std::size_t>(val(a).cols()), "Graph::pick: column out of range");
      out(r, 0) = val(a)(r, static_cast<Eigen::Index>(cols[static_cast<std::size_t>(r)]));
    }
    Var v = push(Op::pick, std::move(out), a, {});
    nodes_[v.id].index = cols;
    return v;
  }

  const Matrix& value(Var v) const { check(v); return val(v); }
  double scalar(Var v) const {
    check(v);
    require(val(v).size() == 1, "Graph::scalar: node is not 1x1");
    return val(v)(0, 0);
  }

  /// Gradient of the last backward() loss w.r.t. `v` (zeros if unreached).
  Matrix grad(Var v) const {
    check(v);
    const Node& n = nodes_[v.id];
    if (n.grad.size() == 0) return Matrix::Zero(n.value.rows(), n.value.cols());
    return n.grad;
  }

  void backward(Var loss) {
    if (loss.owner != this || loss.id >= nodes_.size()) throw ContractError("Graph::backward: node not recorded on this graph");
    require(val(loss).size() == 1, "Graph::backward: loss must be a 1x1 node");
    for (auto& n : nodes_) n.grad.resize(0, 0);
    nodes_[loss.id].grad = Matrix::Ones(1, 1);
    for (std::size_t i = loss.id + 1; i-- > 0;) {
      Node& n = nodes_[i];
      if (n.grad.size() == 0 || n.op == Op::leaf || !n.needs_grad) continue;
      propagate(n);
    }
  }

  std::size_t size() const { return nodes_.size(); }

 private:
  enum class Op { leaf, matmul, add_bias, add, sub, mul, scale, add_scalar, relu, tanh, sigmoid, exp, square, softplus, sum, slice_cols, pick };

  struct Node {
    Op op = Op::leaf;
    Matrix value;
    Matrix grad;
    std::size_t a = 0;
    std::size_t b = 0;
    double scalar = 0.0;
    bool needs_grad = false;
    std::vector<std::size_t> index;
  };

  Var push(Op op, Matrix value, Var a, Var b) {
    Node n;
    n.op = op;
    n.value = std::move(value);
    n.a = a.id;
    n.b = b.id;
    n.needs_grad = (a.owner && nodes_[a.id].needs_grad) || (b.owner && nodes_[b.id].needs_grad);
    nodes_.push_back(std::move(n));
    return Var{nodes_.size() - 1, this};
  }

  void check(Var v) const {
    if (v.owner != this || v.id >= nodes_.size()) throw ContractError("Graph: variable belongs to another graph");
  }
  void same_shape(Var a, Var b, const char* op) const {
    check(a), check(b);
    if (val(a).rows() != val(b).rows() || val(a).cols() != val(b).cols()) {
      throw ContractError(std::string("Graph::") + op + ": shape mismatch");
    }
  }
  const Matrix& val(Var v) const { return nodes_[v.id].value; }

  template <class Expr>
  void accumulate(std::size_t id, const Expr& g) {
    if (!nodes_[id].needs_grad) return;
    Matrix& dst = nodes_[id].grad;
    if (dst.size() == 0) dst = g;
    else dst += g;
  }

  void propagate(const Node& n) {
    const Matrix& g = n.grad;
    const Matrix& av = nodes_[n.a].value;
    switch (n.op) {
      case Op::matmul:
        accumulate(n.a, g * nodes_[n.b].value.transpose());
        accumulate(n.b, av.transpose() * g);
        break;
      case Op::add_bias:
        accumulate(n.a, g);
        accumulate(n.b, g.colwise().sum());
        break;
      case Op::add:
        accumulate(n.a, g);
        accumulate(n.b, g);
        break;
      case Op::sub:
        accumulate(n.a, g);
        accumulate(n.b, -g);
        break;
      case Op::mul:
        accumulate(n.a, g.cwiseProduct(nodes_[n.b].value));
        accumulate(n.b, g.cwiseProduct(av));
        break;
      case Op::scale: accumulate(n.a, g * n.scalar); break;
      case Op::add_scalar: accumulate(n.a, g); break;
      case Op::relu: accumulate(n.a, (av.array() > 0.0).select(g.array(), 0.0).matrix()); break;
      case Op::tanh: accumulate(n.a, g.cwiseProduct((1.0 - n.value.array().square()).matrix())); break;
      case Op::sigmoid:
        accumulate(n.a, g.cwiseProduct((n.value.array() * (1.0 - n.value.array())).matrix()));
        break;
      case Op::exp: accumulate(n.a, g.cwiseProduct(n.value)); break;
      case Op::square: accumulate(n.a, 2.0 * g.cwiseProduct(av)); break;
      case Op::softplus:
        accumulate(n.a, g.cwiseProduct((1.0 / (1.0 + (-av.array()).exp())).matrix()));
        break;
      case Op::sum: accumulate(n.a, Matrix::Constant(av.rows(), av.cols(), g(0, 0))); break;
      case Op::slice_cols: {
        Matrix full = Matrix::Zero(av.rows(), av.cols());
        full.middleCols(static_cast<Eigen::Index>(n.index[0]), g.cols()) = g;
        accumulate(n.a, full);
        break;
      }
      case Op::pick: {
        Matrix full = Matrix::Zero(av.rows(), av.cols());
        for (Eigen::Index r = 0; r < av.rows(); ++r) full(r, static_cast<Eigen::Index>(n.index[static_cast<std::size_t>(r)])) = g(r, 0);
        accumulate(n.a, full);
        break;
      }
      case Op::leaf: break;
    }
  }

  std::vector<Node> nodes_;
};

}  // namespace smirl::nn
