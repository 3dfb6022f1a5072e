#include "antnet/answer_repr.hpp"

#include <string>

namespace antnet {

using ad::Axis;
using ad::Var;

Var relevance_scores(Var hidden, Var u, Var w_p, Var b_p) {
  const std::size_t d = hidden.cols();
  if (u.rows() != 1 || u.cols() != d || w_p.rows() != 1 || w_p.cols() != 2 * d ||
      b_p.value().size() != 1) {
    throw ShapeError("relevance scores: W_p " + w_p.value().shape_string() + " incompatible with [" +
                     hidden.value().shape_string() + "; u " + u.value().shape_string() + "]");
  }
  Var joint = ad::concat(hidden, ad::repeat_rows(u, hidden.rows()), Axis::cols);
  return ad::sigmoid(ad::add_row(ad::matmul_nt(joint, w_p), b_p));
}

Var enlarge(Var scores, std::size_t n_e) {
  if (n_e < 1) throw ShapeError("enlargement length N_e must be at least 1");
  return ad::replicate_cols(scores, n_e);
}

Var augment(Var hidden, Var enlarged) {
  if (hidden.rows() != enlarged.rows()) {
    throw ShapeError("augment: " + std::to_string(hidden.rows()) + " answer states but " +
                     std::to_string(enlarged.rows()) + " relevance rows");
  }
  return ad::concat(hidden, enlarged, Axis::cols);
}

}  // namespace antnet
