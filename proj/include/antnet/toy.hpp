#ifndef ANTNET_TOY_HPP_
#define ANTNET_TOY_HPP_

// Small fixed configuration used for gradient verification.

#include <random>
#include <string>
#include <vector>

#include "antnet/gradcheck.hpp"
#include "antnet/model.hpp"
#include "antnet/training.hpp"

namespace antnet::toy {

inline constexpr double kTolerance = 1e-4;
inline constexpr double kEpsilon = 2e-4;

/// vocab 20, emb 8, d 8, N_e 3, T 2, r 6.
Hyper hyper(bool freeze_embeddings = true);

/// Random sample with question and answer lengths in [1, max_len]. About half
/// carry an option indicator over one or two question positions.
IndexedSample random_sample(std::mt19937_64& rng, std::size_t vocab, std::size_t max_len,
                            const std::string& qid);

/// `count` samples spread over two question ids.
std::vector<IndexedSample> batch(std::uint64_t seed, std::size_t count = 3, std::size_t max_len = 5);

/// Builds `variant` on the toy hyperparameters. The embedding table is redrawn
/// from uniform(−1, 1) so answer states differ enough between positions for
/// hop attention to carry measurable gradient.
Model model(const VariantSpec& variant, std::uint64_t seed, bool freeze_embeddings = true);

/// Dropout-free mean batch loss over the model's own parameter store.
ObjectiveFn objective(Model& model, const std::vector<IndexedSample>& samples,
                      const SkeletonCache& cache);

/// Module a parameter belongs to, from its name prefix.
std::string module_of(const std::string& param_name);

struct ModuleError {
  std::string module;
  double max_relative_error = 0.0;
  std::string worst_param;
};

/// Worst relative error per module, in first-seen parameter order.
std::vector<ModuleError> by_module(const GradCheckReport& report);

}  // namespace antnet::toy

#endif  // ANTNET_TOY_HPP_
