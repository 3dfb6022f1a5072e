#ifndef ANTNET_TESTS_FIXTURES_HPP_
#define ANTNET_TESTS_FIXTURES_HPP_

#include <cmath>

#include "antnet/toy.hpp"

namespace antnet::testing {

inline Hyper toy_hyper() { return toy::hyper(); }

inline std::vector<IndexedSample> toy_batch(std::uint64_t seed, std::size_t count = 3,
                                            std::size_t max_len = 5) {
  return toy::batch(seed, count, max_len);
}

inline ObjectiveFn batch_objective(Model& model, const std::vector<IndexedSample>& batch,
                                   const SkeletonCache& cache) {
  return toy::objective(model, batch, cache);
}

inline double max_abs_diff(const ad::Tensor& a, const ad::Tensor& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace antnet::testing

#endif  // ANTNET_TESTS_FIXTURES_HPP_
