#ifndef ANTNET_GRADCHECK_HPP_
#define ANTNET_GRADCHECK_HPP_

#include <functional>
#include <string>
#include <vector>

#include "antnet/params.hpp"

namespace antnet {

/// Scalar objective over a parameter store. When `with_grad` is true it must
/// also run backward so that every trainable parameter's grad holds ∂f/∂θ
/// (grads are zeroed by the caller beforehand). Must be deterministic.
using ObjectiveFn = std::function<double(ParamStore& params, bool with_grad)>;

struct ParamGradError {
  std::string name;
  double max_relative_error = 0.0;
  std::size_t worst_index = 0;
  double analytic = 0.0;
  double numeric = 0.0;
};

struct GradCheckReport {
  double max_relative_error = 0.0;
  std::string worst_param;
  std::vector<ParamGradError> per_param;
  std::size_t checked_scalars = 0;
};

/// Compares analytic gradients with central differences (f(θ+ε)−f(θ−ε))/2ε
/// for every trainable scalar. Relative error uses the denominator
/// max(|analytic|, |numeric|, 1e-8). Throws NumericError if f is non-finite
/// at any probe point and std::invalid_argument if ε is outside [1e-7, 1e-3].
GradCheckReport finite_diff_check(ParamStore& params, const ObjectiveFn& f, double epsilon = 1e-5);

}  // namespace antnet

#endif  // ANTNET_GRADCHECK_HPP_
