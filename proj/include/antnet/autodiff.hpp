#ifndef ANTNET_AUTODIFF_HPP_
#define ANTNET_AUTODIFF_HPP_

// Dense rank-2 arrays of doubles with a tape-based reverse-mode engine.
//
// A Graph records every intermediate Value in creation order, so the
// registry is topologically sorted by construction and backward() is a
// reverse sweep. Graphs are rebuilt for every sample; Parameters live
// outside the graph and receive accumulated gradients when backward runs.

#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <initializer_list>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace antnet {

class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace ad {

/// Row-major matrix. Vectors are 1×n rows; sequences are n×dim with one
/// position per row.
class Tensor {
 public:
  Tensor() = default;
  Tensor(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Tensor(std::size_t rows, std::size_t cols, std::vector<double> data);

  static Tensor row(std::initializer_list<double> values);
  static Tensor column(std::initializer_list<double> values);
  static Tensor matrix(std::initializer_list<std::initializer_list<double>> rows);
  static Tensor identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool same_shape(const Tensor& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }
  const std::vector<double>& storage() const { return data_; }

  void fill(double v);
  std::string shape_string() const;

  friend bool operator==(const Tensor&, const Tensor&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// A named trainable array that outlives individual graphs.
struct Parameter {
  std::string name;
  Tensor value;
  Tensor grad;
  bool trainable = true;

  Parameter() = default;
  Parameter(std::string n, Tensor v, bool train = true)
      : name(std::move(n)), value(std::move(v)), grad(value.rows(), value.cols()), trainable(train) {}

  void zero_grad() { grad.fill(0.0); }
};

enum class Axis {
  rows,  // reduce/normalize down each column (over positions)
  cols,  // reduce/normalize across each row
};

class Graph;

/// Handle to a node in a Graph. Cheap to copy; valid while the Graph lives.
class Var {
 public:
  Var() = default;

  const Tensor& value() const;
  const Tensor& grad() const;
  std::size_t rows() const { return value().rows(); }
  std::size_t cols() const { return value().cols(); }
  double scalar() const;
  Graph& graph() const { return *graph_; }
  std::size_t id() const { return id_; }
  bool valid() const { return graph_ != nullptr; }

 private:
  friend class Graph;
  Var(Graph* g, std::size_t id) : graph_(g), id_(id) {}
  Graph* graph_ = nullptr;
  std::size_t id_ = 0;
};

class Graph {
 public:
  struct Node {
    Tensor value;
    Tensor grad;
    std::vector<std::size_t> inputs;
    std::function<void(Graph&, const Node&)> backward;
    Parameter* param = nullptr;
    /// Parameter leaves read the Parameter's array in place.
    const Tensor* external = nullptr;
    bool requires_grad = false;
  };

  explicit Graph(std::uint64_t seed = 0) : rng_(seed) {}
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  Var constant(Tensor value);
  /// Leaf bound to a Parameter. Non-trainable parameters act as constants.
  Var param(Parameter& p);

  Var record(Tensor value, std::vector<std::size_t> inputs,
             std::function<void(Graph&, const Node&)> backward);

  /// Seeds d(loss)/d(loss) = 1 and sweeps the tape in reverse, then adds
  /// leaf gradients into their Parameters.
  void backward(Var loss);

  const Node& node(std::size_t id) const { return nodes_[id]; }
  const Tensor& value_of(std::size_t id) const {
    const Node& n = nodes_[id];
    return n.external != nullptr ? *n.external : n.value;
  }
  Tensor& grad_of(std::size_t id);
  bool requires_grad(std::size_t id) const { return nodes_[id].requires_grad; }
  std::size_t size() const { return nodes_.size(); }

  std::mt19937_64& rng() { return rng_; }

 private:
  std::deque<Node> nodes_;  // stable addresses: values stay valid while recording
  std::mt19937_64 rng_;
};

// Linear algebra
Var matmul(Var a, Var b);     // a·b
Var matmul_nt(Var a, Var b);  // a·bᵀ
Var matmul_tn(Var a, Var b);  // aᵀ·b
Var transpose(Var a);

// Elementwise
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
Var scale(Var a, double s);
/// Adds a 1×n row to every row of an m×n matrix.
Var add_row(Var a, Var row);
/// Divides every element of `a` by the 1×1 value `s`.
Var div_scalar(Var a, Var s);

// Nonlinearities
Var tanh(Var a);
Var sigmoid(Var a);
Var softmax(Var a, Axis axis);
Var log_softmax(Var a, Axis axis);

// Shape
Var concat(std::span<const Var> parts, Axis axis);
Var concat(Var a, Var b, Axis axis);
Var slice(Var a, Axis axis, std::size_t begin, std::size_t length);
Var gather_rows(Var a, std::span<const std::size_t> rows);
/// m×1 → m×n, each row holding n copies of its single entry.
Var replicate_cols(Var a, std::size_t n);
/// 1×n → m×n.
Var repeat_rows(Var a, std::size_t m);

// Reductions
Var sum(Var a);
Var mean(Var a, Axis axis);

/// Inverted dropout: zeroes entries with probability `rate` and scales the
/// survivors by 1/(1−rate). Identity when rate == 0.
Var dropout(Var a, double rate);

/// −log softmax(logits)[gold] for a 1×k row of logits.
Var cross_entropy(Var logits, std::size_t gold);

namespace testing {
/// Multiplies the tanh backward rule by `factor`. Negative control for the
/// gradient checker; 1.0 restores correct behaviour.
void set_tanh_backward_factor(double factor);
double tanh_backward_factor();
}  // namespace testing

}  // namespace ad
}  // namespace antnet

#endif  // ANTNET_AUTODIFF_HPP_
