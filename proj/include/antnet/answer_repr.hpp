#ifndef ANTNET_ANSWER_REPR_HPP_
#define ANTNET_ANSWER_REPR_HPP_

#include <cstddef>

#include "antnet/autodiff.hpp"

namespace antnet {

/// p_n = sigmoid(W_p·[h^A_n; u] + b_p) for every answer position.
/// hidden: N×d, u: 1×d, w_p: 1×2d, b_p: 1×1. Returns N×1.
ad::Var relevance_scores(ad::Var hidden, ad::Var u, ad::Var w_p, ad::Var b_p);

/// Replicates each relevance score N_e times: N×1 → N×N_e.
ad::Var enlarge(ad::Var scores, std::size_t n_e);

/// h′_n = [h^A_n; E_n]: N×d and N×N_e → N×(d+N_e).
ad::Var augment(ad::Var hidden, ad::Var enlarged);

}  // namespace antnet

#endif  // ANTNET_ANSWER_REPR_HPP_
