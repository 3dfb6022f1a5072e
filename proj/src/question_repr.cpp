#include "antnet/question_repr.hpp"

#include <algorithm>
#include <cmath>

namespace antnet {

using ad::Axis;
using ad::Tensor;
using ad::Var;

Tensor answer_context(std::span<const Tensor> answer_embeddings) {
  if (answer_embeddings.empty()) throw ShapeError("skeleton scores need at least one answer");
  const std::size_t dim = answer_embeddings.front().cols();
  Tensor ctx(1, dim);
  for (const Tensor& a : answer_embeddings) {
    if (a.cols() != dim || a.rows() == 0) {
      throw ShapeError("answer embeddings " + a.shape_string() + " do not match dimension " +
                       std::to_string(dim));
    }
    const double inv_n = 1.0 / static_cast<double>(a.rows());
    for (std::size_t r = 0; r < a.rows(); ++r)
      for (std::size_t c = 0; c < dim; ++c) ctx(0, c) += a(r, c) * inv_n;
  }
  const double inv_j = 1.0 / static_cast<double>(answer_embeddings.size());
  for (double& v : ctx.values()) v *= inv_j;
  return ctx;
}

SkeletonWeights skeleton_scores(Var question_embeddings, Var context, Var w_s) {
  if (context.rows() != 1 || context.cols() != question_embeddings.cols()) {
    throw ShapeError("answer context " + context.value().shape_string() +
                     " does not match question embeddings " +
                     question_embeddings.value().shape_string());
  }
  SkeletonWeights out;
  out.raw = ad::matmul_nt(ad::matmul(question_embeddings, w_s), context);

  const Tensor& raw = out.raw.value();
  const std::size_t m = raw.rows();
  double mx = raw[0];
  std::size_t argmax = 0;
  for (std::size_t i = 1; i < m; ++i) {
    if (raw[i] > mx) {
      mx = raw[i];
      argmax = i;
    }
  }
  out.normalized.resize(m);
  double z = 0.0;
  for (std::size_t i = 0; i < m; ++i) z += (out.normalized[i] = std::exp(raw[i] - mx));
  for (double& v : out.normalized) v /= z;

  const double threshold = 1.0 / static_cast<double>(m);
  out.member.resize(m);
  for (std::size_t i = 0; i < m; ++i) out.member[i] = out.normalized[i] >= threshold;
  out.member[argmax] = true;
  return out;
}

Var skeleton_repr(Var hidden, const SkeletonWeights& weights) {
  const Tensor& raw = weights.raw.value();
  if (raw.rows() != hidden.rows()) {
    throw ShapeError("skeleton weights cover " + std::to_string(raw.rows()) + " words, states " +
                     std::to_string(hidden.rows()));
  }
  std::vector<std::size_t> members;
  for (std::size_t i = 0; i < weights.member.size(); ++i)
    if (weights.member[i]) members.push_back(i);
  if (members.empty()) throw ShapeError("skeleton set is empty");
  if (members.size() == 1) return ad::slice(hidden, Axis::rows, members.front(), 1);

  Var states = ad::gather_rows(hidden, members);
  const bool all_pos = std::all_of(members.begin(), members.end(), [&](auto i) { return raw[i] > 0; });
  const bool all_neg = std::all_of(members.begin(), members.end(), [&](auto i) { return raw[i] < 0; });
  if (!all_pos && !all_neg) return ad::mean(states, Axis::rows);

  Var scores = ad::gather_rows(weights.raw, members);
  Var w = ad::div_scalar(scores, ad::sum(scores));
  return ad::matmul_tn(w, states);
}

Var uniform_repr(Var hidden) { return ad::mean(hidden, Axis::rows); }

FullRepr full_repr(Var hidden, Var u, Var w_a) {
  if (u.rows() != 1 || u.cols() != hidden.cols() || w_a.rows() != hidden.cols() ||
      w_a.cols() != u.cols()) {
    throw ShapeError("full representation: states " + hidden.value().shape_string() + ", u " +
                     u.value().shape_string() + ", W_a " + w_a.value().shape_string());
  }
  FullRepr out;
  Var scores = ad::matmul_nt(ad::matmul(hidden, w_a), u);
  out.att = ad::softmax(scores, Axis::rows);
  out.v = ad::matmul_tn(out.att, hidden);
  return out;
}

}  // namespace antnet
