#ifndef ANTNET_PARAMS_HPP_
#define ANTNET_PARAMS_HPP_

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "antnet/autodiff.hpp"

namespace antnet {

/// Index of a parameter inside a ParamStore.
struct ParamId {
  std::size_t index = static_cast<std::size_t>(-1);
  bool valid() const { return index != static_cast<std::size_t>(-1); }
};

/// Insertion-ordered collection of named parameters. Copying a store copies
/// every array, so a store doubles as an immutable snapshot.
class ParamStore {
 public:
  ParamId add(std::string name, ad::Tensor init, bool trainable = true);

  ad::Parameter& operator[](ParamId id) { return params_.at(id.index); }
  const ad::Parameter& operator[](ParamId id) const { return params_.at(id.index); }

  ParamId find(const std::string& name) const;
  bool contains(const std::string& name) const { return by_name_.count(name) != 0; }

  std::vector<ad::Parameter>& all() { return params_; }
  const std::vector<ad::Parameter>& all() const { return params_; }
  std::size_t size() const { return params_.size(); }

  /// Number of trainable scalars.
  std::size_t trainable_count() const;
  void zero_grad();
  /// Copies values (not grads) from another store with identical layout.
  void assign_values(const ParamStore& other);

 private:
  std::vector<ad::Parameter> params_;
  std::unordered_map<std::string, std::size_t> by_name_;
};

/// Glorot-uniform initialization for a rows×cols weight.
ad::Tensor glorot_uniform(std::size_t rows, std::size_t cols, std::mt19937_64& rng);
ad::Tensor uniform(std::size_t rows, std::size_t cols, double limit, std::mt19937_64& rng);

}  // namespace antnet

#endif  // ANTNET_PARAMS_HPP_
