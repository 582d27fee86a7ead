#pragma once

// Reverse-mode autodiff over dense Eigen matrices. A Graph records one
// forward computation; backward() walks it in reverse and accumulates into
// the gradients of the Param objects that were fed in.

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace api2com::nnet {

template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using Mask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

template <typename Scalar>
struct Param {
  std::string name;
  Mat<Scalar> value;
  Mat<Scalar> grad;

  Param(std::string n, Mat<Scalar> v)
      : name(std::move(n)), value(std::move(v)), grad(Mat<Scalar>::Zero(value.rows(), value.cols())) {}
  void zero_grad() { grad.setZero(); }
};

struct Var {
  int id = -1;
  bool valid() const { return id >= 0; }
};

/// Index of offset j - i in a relative-position table with 2k+1 rows.
inline int rel_index(int i, int j, int k) {
  const int d = j - i;
  return std::max(-k, std::min(k, d)) + k;
}

inline std::string shape_str(Eigen::Index r, Eigen::Index c) {
  return "(" + std::to_string(r) + "x" + std::to_string(c) + ")";
}

template <typename Scalar>
class Graph {
 public:
  using M = Mat<Scalar>;

  /// With record=false no backward closures are kept (inference).
  explicit Graph(bool record = true) : record_(record) {}

  std::size_t size() const { return nodes_.size(); }
  const M& value(Var v) const {
    const auto& n = nodes_.at(static_cast<std::size_t>(v.id));
    return n.param ? n.param->value : n.value;
  }
  /// Gradient of the last backward() target with respect to v.
  const M& grad(Var v) const { return nodes_.at(static_cast<std::size_t>(v.id)).grad; }

  Var constant(M m) { return push(std::move(m)); }

  /// Leaf that reads p.value in place; its gradient lands in p.grad.
  Var param(Param<Scalar>& p) {
    Var out = push(M());
    nodes_.back().param = &p;
    return out;
  }

  /// Seeds d(out)/d(out) = 1 for a 1x1 output, propagates, and adds leaf
  /// gradients into their Params.
  void backward(Var out) {
    if (!record_) throw std::logic_error("backward on a non-recording graph");
    const M& v = value(out);
    if (v.rows() != 1 || v.cols() != 1) throw ShapeError("backward needs a scalar output, got " + shape_str(v.rows(), v.cols()));
    for (auto& n : nodes_) n.grad.resize(0, 0);
    g(out) = M::Ones(1, 1);
    for (int i = out.id; i >= 0; --i) {
      auto& n = nodes_[static_cast<std::size_t>(i)];
      if (n.grad.size() == 0) continue;
      if (n.back) n.back();
      if (n.param) n.param->grad += n.grad;
    }
  }

  // ---- linear algebra -----------------------------------------------------

  Var matmul(Var a, Var b) {
    check(value(a).cols() == value(b).rows(), "matmul", a, b);
    Var out = push(value(a) * value(b));
    on_back(out, [this, a, b, out] {
      const M& go = gv(out);
      g(a).noalias() += go * value(b).transpose();
      g(b).noalias() += value(a).transpose() * go;
    });
    return out;
  }

  /// a * b^T
  Var matmul_nt(Var a, Var b) {
    check(value(a).cols() == value(b).cols(), "matmul_nt", a, b);
    Var out = push(value(a) * value(b).transpose());
    on_back(out, [this, a, b, out] {
      const M& go = gv(out);
      g(a).noalias() += go * value(b);
      g(b).noalias() += go.transpose() * value(a);
    });
    return out;
  }

  Var add(Var a, Var b) {
    check(same_shape(a, b), "add", a, b);
    Var out = push(value(a) + value(b));
    on_back(out, [this, a, b, out] {
      g(a) += gv(out);
      g(b) += gv(out);
    });
    return out;
  }

  Var sub(Var a, Var b) {
    check(same_shape(a, b), "sub", a, b);
    Var out = push(value(a) - value(b));
    on_back(out, [this, a, b, out] {
      g(a) += gv(out);
      g(b) -= gv(out);
    });
    return out;
  }

  /// Adds a 1 x n row to every row of a.
  Var add_row(Var a, Var row) {
    check(value(row).rows() == 1 && value(row).cols() == value(a).cols(), "add_row", a, row);
    Var out = push(value(a).rowwise() + value(row).row(0));
    on_back(out, [this, a, row, out] {
      g(a) += gv(out);
      g(row) += gv(out).colwise().sum();
    });
    return out;
  }

  Var mul(Var a, Var b) {
    check(same_shape(a, b), "mul", a, b);
    Var out = push(value(a).cwiseProduct(value(b)));
    on_back(out, [this, a, b, out] {
      g(a) += gv(out).cwiseProduct(value(b));
      g(b) += gv(out).cwiseProduct(value(a));
    });
    return out;
  }

  Var scale(Var a, Scalar s) {
    Var out = push(value(a) * s);
    on_back(out, [this, a, s, out] { g(a) += gv(out) * s; });
    return out;
  }

  /// 1 - a
  Var one_minus(Var a) {
    Var out = push((Scalar(1) - value(a).array()).matrix());
    on_back(out, [this, a, out] { g(a) -= gv(out); });
    return out;
  }

  Var sum(Var a) {
    M s(1, 1);
    s(0, 0) = value(a).sum();
    Var out = push(std::move(s));
    on_back(out, [this, a, out] { g(a).array() += gv(out)(0, 0); });
    return out;
  }

  // ---- elementwise nonlinearities -----------------------------------------

  Var sigmoid(Var a) {
    Var out = push(value(a).unaryExpr([](Scalar x) { return Scalar(1) / (Scalar(1) + std::exp(-x)); }));
    on_back(out, [this, a, out] {
      const M& y = value(out);
      g(a).array() += gv(out).array() * y.array() * (Scalar(1) - y.array());
    });
    return out;
  }

  Var tanh(Var a) {
    Var out = push(value(a).array().tanh().matrix());
    on_back(out, [this, a, out] {
      const M& y = value(out);
      g(a).array() += gv(out).array() * (Scalar(1) - y.array().square());
    });
    return out;
  }

  Var relu(Var a) {
    Var out = push(value(a).cwiseMax(Scalar(0)));
    on_back(out, [this, a, out] {
      g(a).array() += (value(a).array() > Scalar(0)).template cast<Scalar>() * gv(out).array();
    });
    return out;
  }

  /// Inverted dropout; identity when p == 0.
  template <typename Rng>
  Var dropout(Var a, Scalar p, Rng& rng) {
    if (p <= Scalar(0)) return a;
    std::bernoulli_distribution keep(1.0 - static_cast<double>(p));
    const M& x = value(a);
    M mask(x.rows(), x.cols());
    const Scalar s = Scalar(1) / (Scalar(1) - p);
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      for (Eigen::Index i = 0; i < x.rows(); ++i) mask(i, j) = keep(rng) ? s : Scalar(0);
    }
    Var out = push(x.cwiseProduct(mask));
    on_back(out, [this, a, out, mask = std::move(mask)] { g(a) += gv(out).cwiseProduct(mask); });
    return out;
  }

  // ---- row-wise operations ------------------------------------------------

  /// Softmax along each row over entries where allowed(i, j) is true. Masked
  /// entries get weight exactly 0; a fully masked row is all zeros.
  Var softmax_rows(Var a, const Mask* allowed = nullptr) {
    const M& x = value(a);
    if (allowed && (allowed->rows() != x.rows() || allowed->cols() != x.cols())) {
      throw ShapeError("softmax mask " + shape_str(allowed->rows(), allowed->cols()) + " vs scores " +
                       shape_str(x.rows(), x.cols()));
    }
    M y = M::Zero(x.rows(), x.cols());
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      Scalar mx = -std::numeric_limits<Scalar>::infinity();
      for (Eigen::Index j = 0; j < x.cols(); ++j) {
        if (!allowed || (*allowed)(i, j)) mx = std::max(mx, x(i, j));
      }
      if (mx == -std::numeric_limits<Scalar>::infinity()) continue;
      Scalar z = 0;
      for (Eigen::Index j = 0; j < x.cols(); ++j) {
        if (!allowed || (*allowed)(i, j)) {
          y(i, j) = std::exp(x(i, j) - mx);
          z += y(i, j);
        }
      }
      y.row(i) /= z;
    }
    Var out = push(std::move(y));
    on_back(out, [this, a, out] {
      const M& y = value(out);
      const M& go = gv(out);
      const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> dot = go.cwiseProduct(y).rowwise().sum();
      g(a).array() += y.array() * (go.colwise() - dot).array();
    });
    return out;
  }

  /// Row-wise layer normalization with gain and bias rows (1 x n).
  Var layer_norm(Var x, Var gain, Var bias, Scalar eps = Scalar(1e-6)) {
    const M& v = value(x);
    check(value(gain).cols() == v.cols() && value(bias).cols() == v.cols(), "layer_norm", x, gain);
    const auto n = static_cast<Scalar>(v.cols());
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> mean = v.rowwise().mean();
    M centered = v.colwise() - mean;
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> inv_std =
        ((centered.array().square().rowwise().sum() / n) + eps).rsqrt().matrix();
    M xhat = centered.array().colwise() * inv_std.array();
    M y = (xhat.array().rowwise() * value(gain).row(0).array()).rowwise() + value(bias).row(0).array();
    Var out = push(std::move(y));
    on_back(out, [this, x, gain, bias, out, xhat = std::move(xhat), inv_std, n] {
      const M& go = gv(out);
      g(gain) += go.cwiseProduct(xhat).colwise().sum();
      g(bias) += go.colwise().sum();
      const M dxhat = go.array().rowwise() * value(gain).row(0).array();
      const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> m1 = dxhat.rowwise().sum() / n;
      const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> m2 = dxhat.cwiseProduct(xhat).rowwise().sum() / n;
      M dx = dxhat.colwise() - m1;
      dx -= (xhat.array().colwise() * m2.array()).matrix();
      g(x).array() += dx.array().colwise() * inv_std.array();
    });
    return out;
  }

  /// Rows of table picked by ids (embedding lookup).
  Var gather_rows(Var table, const std::vector<int>& ids) {
    const M& t = value(table);
    M y(static_cast<Eigen::Index>(ids.size()), t.cols());
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (ids[i] < 0 || ids[i] >= t.rows()) {
        throw std::out_of_range("id " + std::to_string(ids[i]) + " outside table of " +
                                std::to_string(t.rows()) + " rows");
      }
      y.row(static_cast<Eigen::Index>(i)) = t.row(ids[i]);
    }
    Var out = push(std::move(y));
    on_back(out, [this, table, out, ids] {
      M& gt = g(table);
      const M& go = gv(out);
      for (std::size_t i = 0; i < ids.size(); ++i) gt.row(ids[i]) += go.row(static_cast<Eigen::Index>(i));
    });
    return out;
  }

  Var concat_rows(const std::vector<Var>& parts) {
    if (parts.empty()) throw ShapeError("concat_rows of nothing");
    Eigen::Index rows = 0;
    const Eigen::Index cols = value(parts[0]).cols();
    for (Var p : parts) {
      check(value(p).cols() == cols, "concat_rows", parts[0], p);
      rows += value(p).rows();
    }
    M y(rows, cols);
    Eigen::Index r = 0;
    for (Var p : parts) {
      y.middleRows(r, value(p).rows()) = value(p);
      r += value(p).rows();
    }
    Var out = push(std::move(y));
    on_back(out, [this, parts, out] {
      Eigen::Index r0 = 0;
      for (Var p : parts) {
        const Eigen::Index n = value(p).rows();
        g(p) += gv(out).middleRows(r0, n);
        r0 += n;
      }
    });
    return out;
  }

  Var concat_cols(const std::vector<Var>& parts) {
    if (parts.empty()) throw ShapeError("concat_cols of nothing");
    Eigen::Index cols = 0;
    const Eigen::Index rows = value(parts[0]).rows();
    for (Var p : parts) {
      check(value(p).rows() == rows, "concat_cols", parts[0], p);
      cols += value(p).cols();
    }
    M y(rows, cols);
    Eigen::Index c = 0;
    for (Var p : parts) {
      y.middleCols(c, value(p).cols()) = value(p);
      c += value(p).cols();
    }
    Var out = push(std::move(y));
    on_back(out, [this, parts, out] {
      Eigen::Index c0 = 0;
      for (Var p : parts) {
        const Eigen::Index n = value(p).cols();
        g(p) += gv(out).middleCols(c0, n);
        c0 += n;
      }
    });
    return out;
  }

  Var slice_cols(Var a, Eigen::Index start, Eigen::Index n) {
    if (start < 0 || n < 0 || start + n > value(a).cols()) {
      throw ShapeError("slice_cols [" + std::to_string(start) + ", +" + std::to_string(n) + ") of " +
                       shape_of(a));
    }
    Var out = push(value(a).middleCols(start, n));
    on_back(out, [this, a, start, n, out] { g(a).middleCols(start, n) += gv(out); });
    return out;
  }

  Var slice_rows(Var a, Eigen::Index start, Eigen::Index n) {
    if (start < 0 || n < 0 || start + n > value(a).rows()) {
      throw ShapeError("slice_rows [" + std::to_string(start) + ", +" + std::to_string(n) + ") of " +
                       shape_of(a));
    }
    Var out = push(value(a).middleRows(start, n));
    on_back(out, [this, a, start, n, out] { g(a).middleRows(start, n) += gv(out); });
    return out;
  }

  // ---- relative positions -------------------------------------------------

  /// From per-offset columns (n x (2k+1)) to an n x m matrix with
  /// out(i, j) = a(i, rel_index(i, j, k)).
  Var rel_gather(Var a, Eigen::Index m, int k) {
    const M& x = value(a);
    if (x.cols() != 2 * k + 1) throw ShapeError("rel_gather expects 2k+1 columns, got " + shape_of(a));
    M y(x.rows(), m);
    for (Eigen::Index j = 0; j < m; ++j) {
      for (Eigen::Index i = 0; i < x.rows(); ++i) {
        y(i, j) = x(i, rel_index(static_cast<int>(i), static_cast<int>(j), k));
      }
    }
    Var out = push(std::move(y));
    on_back(out, [this, a, m, k, out] {
      M& ga = g(a);
      const M& go = gv(out);
      for (Eigen::Index j = 0; j < m; ++j) {
        for (Eigen::Index i = 0; i < go.rows(); ++i) {
          ga(i, rel_index(static_cast<int>(i), static_cast<int>(j), k)) += go(i, j);
        }
      }
    });
    return out;
  }

  /// Adjoint of rel_gather: sums an n x m matrix into n x (2k+1) offset bins.
  Var rel_scatter(Var a, int k) {
    const M& x = value(a);
    M y = M::Zero(x.rows(), 2 * k + 1);
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      for (Eigen::Index i = 0; i < x.rows(); ++i) {
        y(i, rel_index(static_cast<int>(i), static_cast<int>(j), k)) += x(i, j);
      }
    }
    Var out = push(std::move(y));
    on_back(out, [this, a, k, out] {
      M& ga = g(a);
      const M& go = gv(out);
      for (Eigen::Index j = 0; j < ga.cols(); ++j) {
        for (Eigen::Index i = 0; i < ga.rows(); ++i) {
          ga(i, j) += go(i, rel_index(static_cast<int>(i), static_cast<int>(j), k));
        }
      }
    });
    return out;
  }

  // ---- loss ---------------------------------------------------------------

  /// Summed token cross-entropy of row-wise softmax(logits) against targets;
  /// rows whose target equals ignore contribute nothing. 1x1 result.
  Var cross_entropy(Var logits, const std::vector<int>& targets, int ignore) {
    const M& x = value(logits);
    if (static_cast<Eigen::Index>(targets.size()) != x.rows()) {
      throw ShapeError("cross_entropy: " + std::to_string(targets.size()) + " targets for logits " +
                       shape_of(logits));
    }
    M probs(x.rows(), x.cols());
    Scalar loss = 0;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      const Scalar mx = x.row(i).maxCoeff();
      probs.row(i) = (x.row(i).array() - mx).exp().matrix();
      const Scalar z = probs.row(i).sum();
      probs.row(i) /= z;
      const int t = targets[static_cast<std::size_t>(i)];
      if (t == ignore) continue;
      if (t < 0 || t >= x.cols()) throw std::out_of_range("target id " + std::to_string(t));
      loss += (mx + std::log(z)) - x(i, t);
    }
    M l(1, 1);
    l(0, 0) = loss;
    Var out = push(std::move(l));
    on_back(out, [this, logits, out, targets, probs = std::move(probs), ignore] {
      M& gl = g(logits);
      const Scalar s = gv(out)(0, 0);
      for (Eigen::Index i = 0; i < probs.rows(); ++i) {
        const int t = targets[static_cast<std::size_t>(i)];
        if (t == ignore) continue;
        gl.row(i) += s * probs.row(i);
        gl(i, t) -= s;
      }
    });
    return out;
  }

 private:
  struct Node {
    M value;
    M grad;
    std::function<void()> back;
    Param<Scalar>* param = nullptr;
  };

  Var push(M value) {
    nodes_.push_back(Node{std::move(value), M(), {}, nullptr});
    return Var{static_cast<int>(nodes_.size() - 1)};
  }

  template <typename F>
  void on_back(Var out, F&& f) {
    if (record_) nodes_[static_cast<std::size_t>(out.id)].back = std::forward<F>(f);
  }

  // Gradient accumulator of v, allocated on first use.
  M& g(Var v) {
    auto& n = nodes_[static_cast<std::size_t>(v.id)];
    if (n.grad.size() == 0) {
      const M& x = value(v);
      n.grad = M::Zero(x.rows(), x.cols());
    }
    return n.grad;
  }
  const M& gv(Var v) const { return nodes_[static_cast<std::size_t>(v.id)].grad; }

  bool same_shape(Var a, Var b) const {
    return value(a).rows() == value(b).rows() && value(a).cols() == value(b).cols();
  }
  std::string shape_of(Var v) const { return shape_str(value(v).rows(), value(v).cols()); }
  void check(bool ok, const char* op, Var a, Var b) const {
    if (!ok) throw ShapeError(std::string(op) + ": shape mismatch " + shape_of(a) + " vs " + shape_of(b));
  }

  bool record_;
  std::vector<Node> nodes_;
};

}  // namespace api2com::nnet
