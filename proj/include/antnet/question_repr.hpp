#ifndef ANTNET_QUESTION_REPR_HPP_
#define ANTNET_QUESTION_REPR_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include "antnet/autodiff.hpp"

namespace antnet {

/// Skeleton attention over the words of one question.
struct SkeletonWeights {
  ad::Var raw;                     // M×1 raw scores ω
  std::vector<double> normalized;  // softmax of ω over the question words
  std::vector<bool> member;        // word belongs to the skeleton set
};

/// Mean over answers of each answer's mean word embedding (1×emb_dim).
/// Because the similarity is bilinear, ω(q_m) = q_mᵀ W_s · context.
ad::Tensor answer_context(std::span<const ad::Tensor> answer_embeddings);

/// ω(q_m) = (1/J) Σ_j (1/N_j) Σ_n q_mᵀ W_s s_{j,n}, with `context` produced by
/// answer_context. Members are the words whose normalized score is at least
/// 1/M; the arg-max word is always a member.
SkeletonWeights skeleton_scores(ad::Var question_embeddings, ad::Var context, ad::Var w_s);

/// u = Σ_{m∈Sk} ω_m h_m / Σ_{m∈Sk} ω_m. A single member returns its state
/// unchanged. When the member scores do not share one strict sign (e.g. all
/// zero) the weights fall back to a uniform average over the members.
ad::Var skeleton_repr(ad::Var hidden, const SkeletonWeights& weights);

/// Uniform mean of the question states; stands in for u when skeleton
/// attention is ablated.
ad::Var uniform_repr(ad::Var hidden);

struct FullRepr {
  ad::Var v;    // 1×d
  ad::Var att;  // M×1
};

/// a_m = h_mᵀ W_a u, att = softmax_m(a), v = Σ_m att_m h_m.
FullRepr full_repr(ad::Var hidden, ad::Var u, ad::Var w_a);

}  // namespace antnet

#endif  // ANTNET_QUESTION_REPR_HPP_
