#include "antnet/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace antnet::ad {

namespace {

double g_tanh_backward_factor = 1.0;

[[noreturn]] void shape_fail(const char* op, const Tensor& a, const Tensor& b) {
  throw ShapeError(std::string(op) + ": incompatible shapes " + a.shape_string() + " and " +
                   b.shape_string());
}

void require_finite(const char* op, const Tensor& t) {
  for (double v : t.values()) {
    if (!std::isfinite(v)) throw NumericError(std::string(op) + ": non-finite input");
  }
}

Graph& graph_of(Var a, Var b) {
  if (&a.graph() != &b.graph()) throw std::logic_error("operands belong to different graphs");
  return a.graph();
}

// c += a·b
void gemm_nn(const Tensor& a, const Tensor& b, Tensor& c) {
  const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t p = 0; p < k; ++p) {
      const double av = a(i, p);
      if (av == 0.0) continue;
      const double* brow = &b.values()[p * n];
      double* crow = &c.values()[i * n];
      for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

// c += a·bᵀ
void gemm_nt(const Tensor& a, const Tensor& b, Tensor& c) {
  const std::size_t m = a.rows(), k = a.cols(), n = b.rows();
  for (std::size_t i = 0; i < m; ++i) {
    const double* arow = &a.values()[i * k];
    for (std::size_t j = 0; j < n; ++j) {
      const double* brow = &b.values()[j * k];
      double acc = 0.0;
      for (std::size_t p = 0; p < k; ++p) acc += arow[p] * brow[p];
      c(i, j) += acc;
    }
  }
}

// c += aᵀ·b
void gemm_tn(const Tensor& a, const Tensor& b, Tensor& c) {
  const std::size_t k = a.rows(), m = a.cols(), n = b.cols();
  for (std::size_t p = 0; p < k; ++p) {
    const double* brow = &b.values()[p * n];
    for (std::size_t i = 0; i < m; ++i) {
      const double av = a(p, i);
      if (av == 0.0) continue;
      double* crow = &c.values()[i * n];
      for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

void accumulate(Tensor& dst, const Tensor& src) {
  auto d = dst.values();
  auto s = src.values();
  for (std::size_t i = 0; i < d.size(); ++i) d[i] += s[i];
}

Tensor softmax_values(const Tensor& x, Axis axis) {
  Tensor out(x.rows(), x.cols());
  if (axis == Axis::cols) {
    for (std::size_t r = 0; r < x.rows(); ++r) {
      double mx = -std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < x.cols(); ++c) mx = std::max(mx, x(r, c));
      double z = 0.0;
      for (std::size_t c = 0; c < x.cols(); ++c) z += (out(r, c) = std::exp(x(r, c) - mx));
      for (std::size_t c = 0; c < x.cols(); ++c) out(r, c) /= z;
    }
  } else {
    for (std::size_t c = 0; c < x.cols(); ++c) {
      double mx = -std::numeric_limits<double>::infinity();
      for (std::size_t r = 0; r < x.rows(); ++r) mx = std::max(mx, x(r, c));
      double z = 0.0;
      for (std::size_t r = 0; r < x.rows(); ++r) z += (out(r, c) = std::exp(x(r, c) - mx));
      for (std::size_t r = 0; r < x.rows(); ++r) out(r, c) /= z;
    }
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Tensor

Tensor::Tensor(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows * cols) {
    throw ShapeError("tensor data has " + std::to_string(data_.size()) + " entries, shape needs " +
                     std::to_string(rows * cols));
  }
}

Tensor Tensor::row(std::initializer_list<double> values) {
  return Tensor(1, values.size(), std::vector<double>(values));
}

Tensor Tensor::column(std::initializer_list<double> values) {
  return Tensor(values.size(), 1, std::vector<double>(values));
}

Tensor Tensor::matrix(std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.begin()->size();
  std::vector<double> data;
  data.reserve(r * c);
  for (const auto& row : rows) {
    if (row.size() != c) throw ShapeError("ragged matrix literal");
    data.insert(data.end(), row.begin(), row.end());
  }
  return Tensor(r, c, std::move(data));
}

Tensor Tensor::identity(std::size_t n) {
  Tensor t(n, n);
  for (std::size_t i = 0; i < n; ++i) t(i, i) = 1.0;
  return t;
}

void Tensor::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

std::string Tensor::shape_string() const {
  std::ostringstream os;
  os << '[' << rows_ << "x" << cols_ << ']';
  return os.str();
}

// ---------------------------------------------------------------------------
// Var / Graph

const Tensor& Var::value() const { return graph_->value_of(id_); }

const Tensor& Var::grad() const { return graph_->grad_of(id_); }

double Var::scalar() const {
  const Tensor& v = value();
  if (v.size() != 1) throw ShapeError("scalar() on " + v.shape_string());
  return v[0];
}

Var Graph::constant(Tensor value) {
  Node n;
  n.value = std::move(value);
  nodes_.push_back(std::move(n));
  return Var(this, nodes_.size() - 1);
}

Var Graph::param(Parameter& p) {
  Node n;
  n.external = &p.value;
  if (p.trainable) {
    n.param = &p;
    n.requires_grad = true;
  }
  nodes_.push_back(std::move(n));
  return Var(this, nodes_.size() - 1);
}

Var Graph::record(Tensor value, std::vector<std::size_t> inputs,
                  std::function<void(Graph&, const Node&)> backward) {
  Node n;
  n.value = std::move(value);
  n.requires_grad = std::any_of(inputs.begin(), inputs.end(),
                                [this](std::size_t i) { return nodes_[i].requires_grad; });
  n.inputs = std::move(inputs);
  if (n.requires_grad) n.backward = std::move(backward);
  nodes_.push_back(std::move(n));
  return Var(this, nodes_.size() - 1);
}

Tensor& Graph::grad_of(std::size_t id) {
  Node& n = nodes_[id];
  const Tensor& v = value_of(id);
  if (!n.grad.same_shape(v)) n.grad = Tensor(v.rows(), v.cols());
  return n.grad;
}

void Graph::backward(Var loss) {
  if (&loss.graph() != this) throw std::logic_error("backward on a foreign Var");
  if (loss.value().size() != 1) throw ShapeError("backward needs a scalar loss, got " +
                                                 loss.value().shape_string());
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].requires_grad) nodes_[i].grad = Tensor(value_of(i).rows(), value_of(i).cols());
  }
  grad_of(loss.id())[0] = 1.0;
  for (std::size_t i = loss.id() + 1; i-- > 0;) {
    const Node& n = nodes_[i];
    if (!n.requires_grad) continue;
    if (n.backward) n.backward(*this, n);
    if (n.param != nullptr) accumulate(n.param->grad, n.grad);
  }
}

// ---------------------------------------------------------------------------
// Linear algebra

Var matmul(Var a, Var b) {
  Graph& g = graph_of(a, b);
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  if (av.cols() != bv.rows()) shape_fail("matmul", av, bv);
  Tensor out(av.rows(), bv.cols());
  gemm_nn(av, bv, out);
  const std::size_t ai = a.id(), bi = b.id();
  return g.record(std::move(out), {ai, bi}, [ai, bi](Graph& g, const Graph::Node& n) {
    if (g.requires_grad(ai)) gemm_nt(n.grad, g.value_of(bi), g.grad_of(ai));
    if (g.requires_grad(bi)) gemm_tn(g.value_of(ai), n.grad, g.grad_of(bi));
  });
}

Var matmul_nt(Var a, Var b) {
  Graph& g = graph_of(a, b);
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  if (av.cols() != bv.cols()) shape_fail("matmul_nt", av, bv);
  Tensor out(av.rows(), bv.rows());
  gemm_nt(av, bv, out);
  const std::size_t ai = a.id(), bi = b.id();
  return g.record(std::move(out), {ai, bi}, [ai, bi](Graph& g, const Graph::Node& n) {
    // out = a·bᵀ: da = g·b, db = gᵀ·a
    if (g.requires_grad(ai)) gemm_nn(n.grad, g.value_of(bi), g.grad_of(ai));
    if (g.requires_grad(bi)) gemm_tn(n.grad, g.value_of(ai), g.grad_of(bi));
  });
}

Var matmul_tn(Var a, Var b) {
  Graph& g = graph_of(a, b);
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  if (av.rows() != bv.rows()) shape_fail("matmul_tn", av, bv);
  Tensor out(av.cols(), bv.cols());
  gemm_tn(av, bv, out);
  const std::size_t ai = a.id(), bi = b.id();
  return g.record(std::move(out), {ai, bi}, [ai, bi](Graph& g, const Graph::Node& n) {
    // out = aᵀ·b: da = b·gᵀ, db = a·g
    if (g.requires_grad(ai)) gemm_nt(g.value_of(bi), n.grad, g.grad_of(ai));
    if (g.requires_grad(bi)) gemm_nn(g.value_of(ai), n.grad, g.grad_of(bi));
  });
}

Var transpose(Var a) {
  const Tensor& av = a.value();
  Tensor out(av.cols(), av.rows());
  for (std::size_t r = 0; r < av.rows(); ++r)
    for (std::size_t c = 0; c < av.cols(); ++c) out(c, r) = av(r, c);
  const std::size_t ai = a.id();
  return a.graph().record(std::move(out), {ai}, [ai](Graph& g, const Graph::Node& n) {
    Tensor& ga = g.grad_of(ai);
    for (std::size_t r = 0; r < ga.rows(); ++r)
      for (std::size_t c = 0; c < ga.cols(); ++c) ga(r, c) += n.grad(c, r);
  });
}

// ---------------------------------------------------------------------------
// Elementwise

Var add(Var a, Var b) {
  Graph& g = graph_of(a, b);
  if (!a.value().same_shape(b.value())) shape_fail("add", a.value(), b.value());
  Tensor out = a.value();
  accumulate(out, b.value());
  const std::size_t ai = a.id(), bi = b.id();
  return g.record(std::move(out), {ai, bi}, [ai, bi](Graph& g, const Graph::Node& n) {
    if (g.requires_grad(ai)) accumulate(g.grad_of(ai), n.grad);
    if (g.requires_grad(bi)) accumulate(g.grad_of(bi), n.grad);
  });
}

Var sub(Var a, Var b) {
  Graph& g = graph_of(a, b);
  if (!a.value().same_shape(b.value())) shape_fail("sub", a.value(), b.value());
  Tensor out = a.value();
  auto o = out.values();
  auto bv = b.value().values();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] -= bv[i];
  const std::size_t ai = a.id(), bi = b.id();
  return g.record(std::move(out), {ai, bi}, [ai, bi](Graph& g, const Graph::Node& n) {
    if (g.requires_grad(ai)) accumulate(g.grad_of(ai), n.grad);
    if (g.requires_grad(bi)) {
      auto gb = g.grad_of(bi).values();
      auto gn = n.grad.values();
      for (std::size_t i = 0; i < gb.size(); ++i) gb[i] -= gn[i];
    }
  });
}

Var mul(Var a, Var b) {
  Graph& g = graph_of(a, b);
  if (!a.value().same_shape(b.value())) shape_fail("mul", a.value(), b.value());
  Tensor out = a.value();
  auto o = out.values();
  auto bv = b.value().values();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] *= bv[i];
  const std::size_t ai = a.id(), bi = b.id();
  return g.record(std::move(out), {ai, bi}, [ai, bi](Graph& g, const Graph::Node& n) {
    auto gn = n.grad.values();
    if (g.requires_grad(ai)) {
      auto ga = g.grad_of(ai).values();
      auto bv = g.value_of(bi).values();
      for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += gn[i] * bv[i];
    }
    if (g.requires_grad(bi)) {
      auto gb = g.grad_of(bi).values();
      auto av = g.value_of(ai).values();
      for (std::size_t i = 0; i < gb.size(); ++i) gb[i] += gn[i] * av[i];
    }
  });
}

Var scale(Var a, double s) {
  Tensor out = a.value();
  for (double& v : out.values()) v *= s;
  const std::size_t ai = a.id();
  return a.graph().record(std::move(out), {ai}, [ai, s](Graph& g, const Graph::Node& n) {
    auto ga = g.grad_of(ai).values();
    auto gn = n.grad.values();
    for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += s * gn[i];
  });
}

Var add_row(Var a, Var row) {
  Graph& g = graph_of(a, row);
  const Tensor& av = a.value();
  const Tensor& rv = row.value();
  if (rv.rows() != 1 || rv.cols() != av.cols()) shape_fail("add_row", av, rv);
  Tensor out = av;
  for (std::size_t r = 0; r < out.rows(); ++r)
    for (std::size_t c = 0; c < out.cols(); ++c) out(r, c) += rv(0, c);
  const std::size_t ai = a.id(), bi = row.id();
  return g.record(std::move(out), {ai, bi}, [ai, bi](Graph& g, const Graph::Node& n) {
    if (g.requires_grad(ai)) accumulate(g.grad_of(ai), n.grad);
    if (g.requires_grad(bi)) {
      Tensor& gb = g.grad_of(bi);
      for (std::size_t r = 0; r < n.grad.rows(); ++r)
        for (std::size_t c = 0; c < n.grad.cols(); ++c) gb(0, c) += n.grad(r, c);
    }
  });
}

Var div_scalar(Var a, Var s) {
  Graph& g = graph_of(a, s);
  if (s.value().size() != 1) shape_fail("div_scalar", a.value(), s.value());
  const double d = s.value()[0];
  if (d == 0.0 || !std::isfinite(d)) throw NumericError("div_scalar: divisor is zero or non-finite");
  Tensor out = a.value();
  for (double& v : out.values()) v /= d;
  const std::size_t ai = a.id(), si = s.id();
  return g.record(std::move(out), {ai, si}, [ai, si](Graph& g, const Graph::Node& n) {
    const double d = g.value_of(si)[0];
    auto gn = n.grad.values();
    if (g.requires_grad(ai)) {
      auto ga = g.grad_of(ai).values();
      for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += gn[i] / d;
    }
    if (g.requires_grad(si)) {
      // d(a/d)/dd = −a/d² = −out/d
      auto out = n.value.values();
      double acc = 0.0;
      for (std::size_t i = 0; i < gn.size(); ++i) acc -= gn[i] * out[i] / d;
      g.grad_of(si)[0] += acc;
    }
  });
}

// ---------------------------------------------------------------------------
// Nonlinearities

Var tanh(Var a) {
  require_finite("tanh", a.value());
  Tensor out = a.value();
  for (double& v : out.values()) v = std::tanh(v);
  const std::size_t ai = a.id();
  return a.graph().record(std::move(out), {ai}, [ai](Graph& g, const Graph::Node& n) {
    auto ga = g.grad_of(ai).values();
    auto gn = n.grad.values();
    auto y = n.value.values();
    const double k = g_tanh_backward_factor;
    for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += k * gn[i] * (1.0 - y[i] * y[i]);
  });
}

Var sigmoid(Var a) {
  require_finite("sigmoid", a.value());
  Tensor out = a.value();
  for (double& v : out.values()) {
    v = v >= 0.0 ? 1.0 / (1.0 + std::exp(-v)) : std::exp(v) / (1.0 + std::exp(v));
  }
  const std::size_t ai = a.id();
  return a.graph().record(std::move(out), {ai}, [ai](Graph& g, const Graph::Node& n) {
    auto ga = g.grad_of(ai).values();
    auto gn = n.grad.values();
    auto y = n.value.values();
    for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += gn[i] * y[i] * (1.0 - y[i]);
  });
}

Var softmax(Var a, Axis axis) {
  require_finite("softmax", a.value());
  Tensor out = softmax_values(a.value(), axis);
  const std::size_t ai = a.id();
  return a.graph().record(std::move(out), {ai}, [ai, axis](Graph& g, const Graph::Node& n) {
    // dx = y ⊙ (dy − Σ dy⊙y) along the normalized axis
    Tensor& ga = g.grad_of(ai);
    const Tensor& y = n.value;
    const Tensor& gy = n.grad;
    if (axis == Axis::cols) {
      for (std::size_t r = 0; r < y.rows(); ++r) {
        double dot = 0.0;
        for (std::size_t c = 0; c < y.cols(); ++c) dot += gy(r, c) * y(r, c);
        for (std::size_t c = 0; c < y.cols(); ++c) ga(r, c) += y(r, c) * (gy(r, c) - dot);
      }
    } else {
      for (std::size_t c = 0; c < y.cols(); ++c) {
        double dot = 0.0;
        for (std::size_t r = 0; r < y.rows(); ++r) dot += gy(r, c) * y(r, c);
        for (std::size_t r = 0; r < y.rows(); ++r) ga(r, c) += y(r, c) * (gy(r, c) - dot);
      }
    }
  });
}

Var log_softmax(Var a, Axis axis) {
  require_finite("log_softmax", a.value());
  const Tensor& x = a.value();
  Tensor out(x.rows(), x.cols());
  const bool by_row = axis == Axis::cols;
  const std::size_t outer = by_row ? x.rows() : x.cols();
  const std::size_t inner = by_row ? x.cols() : x.rows();
  auto at = [by_row](const Tensor& t, std::size_t o, std::size_t i) {
    return by_row ? t(o, i) : t(i, o);
  };
  for (std::size_t o = 0; o < outer; ++o) {
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < inner; ++i) mx = std::max(mx, at(x, o, i));
    double z = 0.0;
    for (std::size_t i = 0; i < inner; ++i) z += std::exp(at(x, o, i) - mx);
    const double lse = mx + std::log(z);
    for (std::size_t i = 0; i < inner; ++i) {
      (by_row ? out(o, i) : out(i, o)) = at(x, o, i) - lse;
    }
  }
  const std::size_t ai = a.id();
  return a.graph().record(std::move(out), {ai}, [ai, by_row, outer, inner](Graph& g,
                                                                           const Graph::Node& n) {
    // dx = dy − softmax ⊙ Σ dy
    Tensor& ga = g.grad_of(ai);
    for (std::size_t o = 0; o < outer; ++o) {
      double total = 0.0;
      for (std::size_t i = 0; i < inner; ++i) total += by_row ? n.grad(o, i) : n.grad(i, o);
      for (std::size_t i = 0; i < inner; ++i) {
        const double y = std::exp(by_row ? n.value(o, i) : n.value(i, o));
        double& dst = by_row ? ga(o, i) : ga(i, o);
        dst += (by_row ? n.grad(o, i) : n.grad(i, o)) - y * total;
      }
    }
  });
}

// ---------------------------------------------------------------------------
// Shape

Var concat(std::span<const Var> parts, Axis axis) {
  if (parts.empty()) throw ShapeError("concat: no inputs");
  Graph& g = parts.front().graph();
  const Tensor& first = parts.front().value();
  std::size_t rows = 0, cols = 0;
  for (const Var& p : parts) {
    if (&p.graph() != &g) throw std::logic_error("operands belong to different graphs");
    const Tensor& v = p.value();
    if (axis == Axis::cols) {
      if (v.rows() != first.rows()) shape_fail("concat", first, v);
      cols += v.cols();
    } else {
      if (v.cols() != first.cols()) shape_fail("concat", first, v);
      rows += v.rows();
    }
  }
  if (axis == Axis::cols) rows = first.rows();
  else cols = first.cols();

  Tensor out(rows, cols);
  std::vector<std::size_t> ids;
  std::vector<std::size_t> offsets;
  std::size_t off = 0;
  for (const Var& p : parts) {
    const Tensor& v = p.value();
    ids.push_back(p.id());
    offsets.push_back(off);
    for (std::size_t r = 0; r < v.rows(); ++r)
      for (std::size_t c = 0; c < v.cols(); ++c) {
        if (axis == Axis::cols) out(r, off + c) = v(r, c);
        else out(off + r, c) = v(r, c);
      }
    off += axis == Axis::cols ? v.cols() : v.rows();
  }
  std::vector<std::size_t> inputs = ids;
  return g.record(std::move(out), std::move(inputs),
                  [ids, offsets, axis](Graph& g, const Graph::Node& n) {
                    for (std::size_t k = 0; k < ids.size(); ++k) {
                      if (!g.requires_grad(ids[k])) continue;
                      Tensor& gp = g.grad_of(ids[k]);
                      for (std::size_t r = 0; r < gp.rows(); ++r)
                        for (std::size_t c = 0; c < gp.cols(); ++c) {
                          gp(r, c) += axis == Axis::cols ? n.grad(r, offsets[k] + c)
                                                         : n.grad(offsets[k] + r, c);
                        }
                    }
                  });
}

Var concat(Var a, Var b, Axis axis) {
  const Var parts[] = {a, b};
  return concat(parts, axis);
}

Var slice(Var a, Axis axis, std::size_t begin, std::size_t length) {
  const Tensor& av = a.value();
  const std::size_t extent = axis == Axis::rows ? av.rows() : av.cols();
  if (begin + length > extent || length == 0) {
    throw ShapeError("slice [" + std::to_string(begin) + ", " + std::to_string(begin + length) +
                     ") out of range for " + av.shape_string());
  }
  const std::size_t rows = axis == Axis::rows ? length : av.rows();
  const std::size_t cols = axis == Axis::cols ? length : av.cols();
  const std::size_t r0 = axis == Axis::rows ? begin : 0;
  const std::size_t c0 = axis == Axis::cols ? begin : 0;
  Tensor out(rows, cols);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) out(r, c) = av(r0 + r, c0 + c);
  const std::size_t ai = a.id();
  return a.graph().record(std::move(out), {ai}, [ai, r0, c0](Graph& g, const Graph::Node& n) {
    Tensor& ga = g.grad_of(ai);
    for (std::size_t r = 0; r < n.grad.rows(); ++r)
      for (std::size_t c = 0; c < n.grad.cols(); ++c) ga(r0 + r, c0 + c) += n.grad(r, c);
  });
}

Var gather_rows(Var a, std::span<const std::size_t> rows) {
  const Tensor& av = a.value();
  Tensor out(rows.size(), av.cols());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    if (rows[k] >= av.rows()) {
      throw ShapeError("gather_rows: row " + std::to_string(rows[k]) + " out of range for " +
                       av.shape_string());
    }
    for (std::size_t c = 0; c < av.cols(); ++c) out(k, c) = av(rows[k], c);
  }
  const std::size_t ai = a.id();
  std::vector<std::size_t> idx(rows.begin(), rows.end());
  return a.graph().record(std::move(out), {ai},
                          [ai, idx = std::move(idx)](Graph& g, const Graph::Node& n) {
                            Tensor& ga = g.grad_of(ai);
                            for (std::size_t k = 0; k < idx.size(); ++k)
                              for (std::size_t c = 0; c < ga.cols(); ++c)
                                ga(idx[k], c) += n.grad(k, c);
                          });
}

Var replicate_cols(Var a, std::size_t n) {
  const Tensor& av = a.value();
  if (av.cols() != 1) throw ShapeError("replicate_cols expects a column, got " + av.shape_string());
  if (n == 0) throw ShapeError("replicate_cols: zero copies");
  Tensor out(av.rows(), n);
  for (std::size_t r = 0; r < av.rows(); ++r)
    for (std::size_t c = 0; c < n; ++c) out(r, c) = av(r, 0);
  const std::size_t ai = a.id();
  return a.graph().record(std::move(out), {ai}, [ai](Graph& g, const Graph::Node& node) {
    Tensor& ga = g.grad_of(ai);
    for (std::size_t r = 0; r < node.grad.rows(); ++r) {
      double acc = 0.0;
      for (std::size_t c = 0; c < node.grad.cols(); ++c) acc += node.grad(r, c);
      ga(r, 0) += acc;
    }
  });
}

Var repeat_rows(Var a, std::size_t m) {
  const Tensor& av = a.value();
  if (av.rows() != 1) throw ShapeError("repeat_rows expects a row, got " + av.shape_string());
  Tensor out(m, av.cols());
  for (std::size_t r = 0; r < m; ++r)
    for (std::size_t c = 0; c < av.cols(); ++c) out(r, c) = av(0, c);
  const std::size_t ai = a.id();
  return a.graph().record(std::move(out), {ai}, [ai](Graph& g, const Graph::Node& n) {
    Tensor& ga = g.grad_of(ai);
    for (std::size_t r = 0; r < n.grad.rows(); ++r)
      for (std::size_t c = 0; c < n.grad.cols(); ++c) ga(0, c) += n.grad(r, c);
  });
}

// ---------------------------------------------------------------------------
// Reductions

Var sum(Var a) {
  double total = 0.0;
  for (double v : a.value().values()) total += v;
  const std::size_t ai = a.id();
  return a.graph().record(Tensor(1, 1, total), {ai}, [ai](Graph& g, const Graph::Node& n) {
    const double gv = n.grad[0];
    for (double& v : g.grad_of(ai).values()) v += gv;
  });
}

Var mean(Var a, Axis axis) {
  const Tensor& av = a.value();
  if (av.size() == 0) throw ShapeError("mean of empty tensor");
  Tensor out = axis == Axis::rows ? Tensor(1, av.cols()) : Tensor(av.rows(), 1);
  const double inv = 1.0 / static_cast<double>(axis == Axis::rows ? av.rows() : av.cols());
  for (std::size_t r = 0; r < av.rows(); ++r)
    for (std::size_t c = 0; c < av.cols(); ++c) {
      if (axis == Axis::rows) out(0, c) += av(r, c);
      else out(r, 0) += av(r, c);
    }
  for (double& v : out.values()) v *= inv;
  const std::size_t ai = a.id();
  return a.graph().record(std::move(out), {ai}, [ai, axis, inv](Graph& g, const Graph::Node& n) {
    Tensor& ga = g.grad_of(ai);
    for (std::size_t r = 0; r < ga.rows(); ++r)
      for (std::size_t c = 0; c < ga.cols(); ++c)
        ga(r, c) += inv * (axis == Axis::rows ? n.grad(0, c) : n.grad(r, 0));
  });
}

Var dropout(Var a, double rate) {
  if (rate < 0.0 || rate >= 1.0) throw std::invalid_argument("dropout rate must be in [0, 1)");
  if (rate == 0.0) return a;
  Graph& g = a.graph();
  std::bernoulli_distribution keep(1.0 - rate);
  const double s = 1.0 / (1.0 - rate);
  Tensor mask(a.rows(), a.cols());
  for (double& m : mask.values()) m = keep(g.rng()) ? s : 0.0;
  Tensor out = a.value();
  auto o = out.values();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] *= mask[i];
  const std::size_t ai = a.id();
  return g.record(std::move(out), {ai},
                  [ai, mask = std::move(mask)](Graph& g, const Graph::Node& n) {
                    auto ga = g.grad_of(ai).values();
                    for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += n.grad[i] * mask[i];
                  });
}

Var cross_entropy(Var logits, std::size_t gold) {
  const Tensor& lv = logits.value();
  if (lv.rows() != 1 || gold >= lv.cols()) {
    throw ShapeError("cross_entropy: gold " + std::to_string(gold) + " invalid for logits " +
                     lv.shape_string());
  }
  Var logp = log_softmax(logits, Axis::cols);
  return scale(slice(logp, Axis::cols, gold, 1), -1.0);
}

namespace testing {
void set_tanh_backward_factor(double factor) { g_tanh_backward_factor = factor; }
double tanh_backward_factor() { return g_tanh_backward_factor; }
}  // namespace testing

}  // namespace antnet::ad
