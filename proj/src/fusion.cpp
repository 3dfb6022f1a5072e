#include "antnet/fusion.hpp"

#include <cmath>

namespace antnet {

using ad::Axis;
using ad::Tensor;
using ad::Var;

namespace {

std::string hop_prefix(const std::string& prefix, std::size_t t, bool shared) {
  return shared ? prefix + ".hop" : prefix + ".hop" + std::to_string(t + 1);
}

}  // namespace

HopStack HopStack::create(ParamStore& store, const std::string& prefix, std::size_t n_hops,
                          std::size_t state_dim, std::size_t memory_dim, std::size_t width,
                          bool shared, std::mt19937_64& rng) {
  HopStack stack;
  for (std::size_t t = 0; t < n_hops; ++t) {
    if (shared && t > 0) {
      stack.hops.push_back(stack.hops.front());
      continue;
    }
    const std::string p = hop_prefix(prefix, t, shared);
    HopParams h;
    h.w_m = store.add(p + ".w_m", glorot_uniform(1, width, rng));
    h.w_h = store.add(p + ".w_h", glorot_uniform(width, memory_dim, rng));
    h.w_x = store.add(p + ".w_x", glorot_uniform(width, state_dim, rng));
    h.b = store.add(p + ".b", Tensor(1, width));
    h.w_f1 = store.add(p + ".w_f1", glorot_uniform(state_dim, memory_dim, rng));
    h.w_f2 = store.add(p + ".w_f2", glorot_uniform(state_dim, state_dim, rng));
    h.b_f = store.add(p + ".b_f", Tensor(1, state_dim));
    stack.hops.push_back(h);
  }
  return stack;
}

HopStack HopStack::attach(const ParamStore& store, const std::string& prefix, std::size_t n_hops,
                          bool shared) {
  HopStack stack;
  for (std::size_t t = 0; t < n_hops; ++t) {
    const std::string p = hop_prefix(prefix, t, shared);
    stack.hops.push_back(HopParams{store.find(p + ".w_m"), store.find(p + ".w_h"),
                                   store.find(p + ".w_x"), store.find(p + ".b"),
                                   store.find(p + ".w_f1"), store.find(p + ".w_f2"),
                                   store.find(p + ".b_f")});
  }
  return stack;
}

std::size_t hop_param_count(std::size_t state_dim, std::size_t memory_dim, std::size_t width) {
  return width + width * memory_dim + width * state_dim + width + state_dim * memory_dim +
         state_dim * state_dim + state_dim;
}

HopResult hop(ad::Graph& g, ParamStore& store, Var state, Var memory, const HopParams& p) {
  const Tensor& w_h = store[p.w_h].value;
  const Tensor& w_x = store[p.w_x].value;
  if (memory.rows() == 0) throw ShapeError("hop over an empty answer");
  if (w_h.cols() != memory.cols() || w_x.cols() != state.cols() || state.rows() != 1) {
    throw ShapeError("hop: W_h " + w_h.shape_string() + " / W_x " + w_x.shape_string() +
                     " incompatible with memory " + memory.value().shape_string() + " and state " +
                     state.value().shape_string());
  }
  Var query = ad::add(ad::matmul_nt(state, g.param(store[p.w_x])), g.param(store[p.b]));
  Var hidden = ad::tanh(ad::add_row(ad::matmul_nt(memory, g.param(store[p.w_h])), query));
  Var scores = ad::matmul_nt(hidden, g.param(store[p.w_m]));
  HopResult out;
  out.attention = ad::softmax(scores, Axis::rows);
  Var pooled = ad::matmul_tn(out.attention, memory);
  Var active = ad::tanh(ad::add(ad::matmul_nt(pooled, g.param(store[p.w_f1])), g.param(store[p.b_f])));
  out.state = ad::add(active, ad::matmul_nt(state, g.param(store[p.w_f2])));
  return out;
}

FuseResult fuse(ad::Graph& g, ParamStore& store, Var v, Var u, Var memory,
                const HopStack& full_stack, const HopStack& skeleton_stack, std::size_t hops) {
  if (full_stack.hops.size() < hops || skeleton_stack.hops.size() < hops) {
    throw ShapeError("fusion asked for " + std::to_string(hops) + " hops but the stacks hold " +
                     std::to_string(full_stack.hops.size()) + "/" +
                     std::to_string(skeleton_stack.hops.size()));
  }
  FuseResult out;
  Var f = v, s = u;
  for (std::size_t t = 0; t < hops; ++t) {
    HopResult rf = hop(g, store, f, memory, full_stack.hops[t]);
    f = rf.state;
    out.full_attention.push_back(rf.attention);
  }
  for (std::size_t t = 0; t < hops; ++t) {
    HopResult rs = hop(g, store, s, memory, skeleton_stack.hops[t]);
    s = rs.state;
    out.skeleton_attention.push_back(rs.attention);
  }
  out.joint = ad::concat(f, s, Axis::cols);
  return out;
}

ClassifierParams ClassifierParams::create(ParamStore& store, const std::string& prefix,
                                          std::size_t in_dim, std::mt19937_64& rng) {
  return ClassifierParams{store.add(prefix + ".w", glorot_uniform(kNumLabels, in_dim, rng)),
                          store.add(prefix + ".b", Tensor(1, kNumLabels))};
}

ClassifierParams ClassifierParams::attach(const ParamStore& store, const std::string& prefix) {
  return ClassifierParams{store.find(prefix + ".w"), store.find(prefix + ".b")};
}

Var classifier_logits(ad::Graph& g, ParamStore& store, Var features, const ClassifierParams& p) {
  const Tensor& w = store[p.w].value;
  if (features.rows() != 1 || features.cols() != w.cols()) {
    throw ShapeError("classifier W " + w.shape_string() + " incompatible with features " +
                     features.value().shape_string());
  }
  return ad::add(ad::matmul_nt(features, g.param(store[p.w])), g.param(store[p.b]));
}

Var classify(ad::Graph& g, ParamStore& store, Var features, const ClassifierParams& p) {
  return ad::softmax(classifier_logits(g, store, features, p), Axis::cols);
}

Label predicted_label(const Tensor& probabilities) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < kNumLabels; ++k)
    if (probabilities[k] > probabilities[best]) best = k;
  return kAllLabels[best];
}

Var loss(Var logits, Label gold) { return ad::cross_entropy(logits, index_of(gold)); }

}  // namespace antnet
