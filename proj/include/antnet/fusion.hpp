#ifndef ANTNET_FUSION_HPP_
#define ANTNET_FUSION_HPP_

#include <cstddef>
#include <random>
#include <string>
#include <vector>

#include "antnet/autodiff.hpp"
#include "antnet/corpus.hpp"
#include "antnet/params.hpp"

namespace antnet {

/// Weights of one hop. Shapes for state width d, memory width D (d+N_e, or
/// d without relevance) and projection width r:
///   W_m 1×r, W_h r×D, W_x r×d, b 1×r, W_f1 d×D, W_f2 d×d, b_f 1×d.
struct HopParams {
  ParamId w_m, w_h, w_x, b, w_f1, w_f2, b_f;
};

/// Per-hop parameter stack for one of the two fusion iterations.
struct HopStack {
  std::vector<HopParams> hops;  // one entry per hop; entries repeat when shared

  static HopStack create(ParamStore& store, const std::string& prefix, std::size_t n_hops,
                         std::size_t state_dim, std::size_t memory_dim, std::size_t width,
                         bool shared, std::mt19937_64& rng);
  static HopStack attach(const ParamStore& store, const std::string& prefix, std::size_t n_hops,
                         bool shared);
};

/// Scalars per hop: |W_m|+|W_h|+|W_x|+|b|+|W_f1|+|W_f2|+|b_f|.
std::size_t hop_param_count(std::size_t state_dim, std::size_t memory_dim, std::size_t width);

struct HopResult {
  ad::Var state;      // 1×d
  ad::Var attention;  // N×1
};

/// m_n = W_m·tanh(W_h·h′_n + W_x·F + b); a = softmax_n(m); x′ = Σ a_n h′_n;
/// F_next = tanh(W_f1·x′ + b_f) + W_f2·F.
HopResult hop(ad::Graph& g, ParamStore& store, ad::Var state, ad::Var memory, const HopParams& p);

struct FuseResult {
  ad::Var joint;  // 1×2d, [F(T); S(T)]
  std::vector<ad::Var> full_attention;      // per hop, full-representation stack
  std::vector<ad::Var> skeleton_attention;  // per hop, skeleton stack
};

/// Runs `hops` iterations from F(0)=v and, independently, from S(0)=u.
/// With zero hops the result is [v; u].
FuseResult fuse(ad::Graph& g, ParamStore& store, ad::Var v, ad::Var u, ad::Var memory,
                const HopStack& full_stack, const HopStack& skeleton_stack, std::size_t hops);

/// W: 3×in, b: 1×3.
struct ClassifierParams {
  ParamId w, b;
  static ClassifierParams create(ParamStore& store, const std::string& prefix, std::size_t in_dim,
                                 std::mt19937_64& rng);
  static ClassifierParams attach(const ParamStore& store, const std::string& prefix);
};

/// Logits W·x + b as a 1×3 row.
ad::Var classifier_logits(ad::Graph& g, ParamStore& store, ad::Var features,
                          const ClassifierParams& p);
/// softmax(W·x + b).
ad::Var classify(ad::Graph& g, ParamStore& store, ad::Var features, const ClassifierParams& p);

/// Arg-max label; ties go to the earlier label (true < false < uncertain).
Label predicted_label(const ad::Tensor& probabilities);

/// −log p[gold] through log-softmax of the logits.
ad::Var loss(ad::Var logits, Label gold);

}  // namespace antnet

#endif  // ANTNET_FUSION_HPP_
