#include "antnet/encoders.hpp"

#include <fstream>
#include <sstream>
#include <vector>

namespace antnet {

using ad::Axis;
using ad::Tensor;
using ad::Var;

EmbeddingTable EmbeddingTable::create(ParamStore& store, const std::string& name,
                                      std::size_t vocab_size, std::size_t dim, bool frozen,
                                      std::mt19937_64& rng) {
  EmbeddingTable t;
  t.id_ = store.add(name, uniform(vocab_size, dim, 0.1, rng), !frozen);
  t.dim_ = dim;
  t.vocab_size_ = vocab_size;
  return t;
}

EmbeddingTable EmbeddingTable::attach(const ParamStore& store, const std::string& name) {
  EmbeddingTable t;
  t.id_ = store.find(name);
  t.dim_ = store[t.id_].value.cols();
  t.vocab_size_ = store[t.id_].value.rows();
  return t;
}

Var EmbeddingTable::lookup(ad::Graph& g, ParamStore& store, std::span<const std::size_t> ids) const {
  ad::Parameter& p = store[id_];
  for (std::size_t id : ids) {
    if (id >= vocab_size_) {
      throw ShapeError("token index " + std::to_string(id) + " outside vocabulary of " +
                       std::to_string(vocab_size_));
    }
  }
  if (p.trainable) return ad::gather_rows(g.param(p), ids);
  Tensor rows(ids.size(), dim_);
  for (std::size_t k = 0; k < ids.size(); ++k)
    for (std::size_t c = 0; c < dim_; ++c) rows(k, c) = p.value(ids[k], c);
  return g.constant(std::move(rows));
}

Tensor EmbeddingTable::mean_row(const ParamStore& store, std::span<const std::size_t> ids) const {
  const Tensor& table = store[id_].value;
  Tensor out(1, dim_);
  if (ids.empty()) return out;
  for (std::size_t id : ids) {
    if (id >= vocab_size_) throw ShapeError("token index " + std::to_string(id) + " outside vocabulary");
    for (std::size_t c = 0; c < dim_; ++c) out(0, c) += table(id, c);
  }
  for (double& v : out.values()) v /= static_cast<double>(ids.size());
  return out;
}

std::size_t load_pretrained_embeddings(ParamStore& store, const EmbeddingTable& table,
                                       const Vocab& vocab, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open embedding file " + path);
  Tensor& m = store[table.id()].value;
  std::string line;
  std::size_t lineno = 0, loaded = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string token;
    if (!(ls >> token)) continue;
    std::vector<double> vec;
    double v;
    while (ls >> v) vec.push_back(v);
    if (vec.size() != table.dim()) {
      throw DataError(path + ":" + std::to_string(lineno) + ": expected " +
                      std::to_string(table.dim()) + " values, got " + std::to_string(vec.size()));
    }
    if (!vocab.contains(token)) continue;
    const std::size_t row = vocab.index(token);
    for (std::size_t c = 0; c < vec.size(); ++c) m(row, c) = vec[c];
    ++loaded;
  }
  return loaded;
}

namespace {

LstmParams make_direction(ParamStore& store, const std::string& prefix, std::size_t in_dim,
                          std::size_t hidden, std::mt19937_64& rng) {
  LstmParams p;
  p.hidden = hidden;
  p.w_ih = store.add(prefix + ".w_ih", glorot_uniform(4 * hidden, in_dim, rng));
  p.w_hh = store.add(prefix + ".w_hh", glorot_uniform(4 * hidden, hidden, rng));
  Tensor b(1, 4 * hidden);
  for (std::size_t k = hidden; k < 2 * hidden; ++k) b(0, k) = 1.0;
  p.bias = store.add(prefix + ".b", std::move(b));
  return p;
}

LstmParams attach_direction(const ParamStore& store, const std::string& prefix) {
  LstmParams p;
  p.w_ih = store.find(prefix + ".w_ih");
  p.w_hh = store.find(prefix + ".w_hh");
  p.bias = store.find(prefix + ".b");
  p.hidden = store[p.w_hh].value.cols();
  return p;
}

}  // namespace

BiLstm::BiLstm(ParamStore& store, const std::string& prefix, std::size_t in_dim,
               std::size_t out_dim, std::mt19937_64& rng)
    : in_dim_(in_dim) {
  if (out_dim < 2 || out_dim % 2 != 0) {
    throw std::invalid_argument("BiLSTM output dimension must be even and >= 2");
  }
  forward_ = make_direction(store, prefix + ".fwd", in_dim, out_dim / 2, rng);
  backward_ = make_direction(store, prefix + ".bwd", in_dim, out_dim / 2, rng);
}

BiLstm BiLstm::attach(const ParamStore& store, const std::string& prefix) {
  BiLstm l;
  l.forward_ = attach_direction(store, prefix + ".fwd");
  l.backward_ = attach_direction(store, prefix + ".bwd");
  l.in_dim_ = store[l.forward_.w_ih].value.cols();
  return l;
}

Var BiLstm::run(ad::Graph& g, ParamStore& store, const LstmParams& p, Var pre, bool reverse) const {
  const std::size_t n = pre.rows();
  const std::size_t h = p.hidden;
  Var w_hh = g.param(store[p.w_hh]);
  std::vector<Var> states(n);
  Var h_prev, c_prev;
  for (std::size_t step = 0; step < n; ++step) {
    const std::size_t t = reverse ? n - 1 - step : step;
    Var z = ad::slice(pre, Axis::rows, t, 1);
    if (step > 0) z = ad::add(z, ad::matmul_nt(h_prev, w_hh));
    Var sig = ad::sigmoid(ad::slice(z, Axis::cols, 0, 3 * h));
    Var in_gate = ad::slice(sig, Axis::cols, 0, h);
    Var forget_gate = ad::slice(sig, Axis::cols, h, h);
    Var out_gate = ad::slice(sig, Axis::cols, 2 * h, h);
    Var cell_in = ad::tanh(ad::slice(z, Axis::cols, 3 * h, h));
    Var c = ad::mul(in_gate, cell_in);
    if (step > 0) c = ad::add(c, ad::mul(forget_gate, c_prev));
    Var hs = ad::mul(out_gate, ad::tanh(c));
    states[t] = hs;
    h_prev = hs;
    c_prev = c;
  }
  return ad::concat(states, Axis::rows);
}

Var BiLstm::encode(ad::Graph& g, ParamStore& store, Var inputs) const {
  if (inputs.cols() != in_dim_) {
    throw ShapeError("BiLSTM expects " + std::to_string(in_dim_) + " input features, got " +
                     inputs.value().shape_string());
  }
  if (inputs.rows() == 0) throw ShapeError("BiLSTM input sequence is empty");
  auto project = [&](const LstmParams& p) {
    return ad::add_row(ad::matmul_nt(inputs, g.param(store[p.w_ih])), g.param(store[p.bias]));
  };
  Var fwd = run(g, store, forward_, project(forward_), false);
  Var bwd = run(g, store, backward_, project(backward_), true);
  return ad::concat(fwd, bwd, Axis::cols);
}

Var encode_question(ad::Graph& g, ParamStore& store, const EmbeddingTable& emb, const BiLstm& lstm,
                    std::span<const std::size_t> question, std::span<const double> indicator) {
  if (question.empty()) throw ShapeError("empty question");
  if (question.size() != indicator.size()) {
    throw ShapeError("question has " + std::to_string(question.size()) + " words but indicator has " +
                     std::to_string(indicator.size()));
  }
  Tensor flags(indicator.size(), 1, std::vector<double>(indicator.begin(), indicator.end()));
  Var x = ad::concat(emb.lookup(g, store, question), g.constant(std::move(flags)), Axis::cols);
  return lstm.encode(g, store, x);
}

Var encode_answer(ad::Graph& g, ParamStore& store, const EmbeddingTable& emb, const BiLstm& lstm,
                  std::span<const std::size_t> answer) {
  if (answer.empty()) throw ShapeError("empty answer");
  return lstm.encode(g, store, emb.lookup(g, store, answer));
}

}  // namespace antnet
