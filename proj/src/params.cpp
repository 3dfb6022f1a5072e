#include "antnet/params.hpp"

#include <cmath>
#include <stdexcept>

namespace antnet {

ParamId ParamStore::add(std::string name, ad::Tensor init, bool trainable) {
  if (by_name_.count(name) != 0) throw std::invalid_argument("duplicate parameter " + name);
  by_name_.emplace(name, params_.size());
  params_.emplace_back(std::move(name), std::move(init), trainable);
  return ParamId{params_.size() - 1};
}

ParamId ParamStore::find(const std::string& name) const {
  auto it = by_name_.find(name);
  if (it == by_name_.end()) throw std::out_of_range("unknown parameter " + name);
  return ParamId{it->second};
}

std::size_t ParamStore::trainable_count() const {
  std::size_t n = 0;
  for (const auto& p : params_)
    if (p.trainable) n += p.value.size();
  return n;
}

void ParamStore::zero_grad() {
  for (auto& p : params_) p.zero_grad();
}

void ParamStore::assign_values(const ParamStore& other) {
  if (other.params_.size() != params_.size()) throw ShapeError("parameter layouts differ");
  for (std::size_t i = 0; i < params_.size(); ++i) {
    if (!params_[i].value.same_shape(other.params_[i].value) ||
        params_[i].name != other.params_[i].name) {
      throw ShapeError("parameter layouts differ at " + params_[i].name);
    }
    params_[i].value = other.params_[i].value;
  }
}

ad::Tensor uniform(std::size_t rows, std::size_t cols, double limit, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-limit, limit);
  ad::Tensor t(rows, cols);
  for (double& v : t.values()) v = dist(rng);
  return t;
}

ad::Tensor glorot_uniform(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
  return uniform(rows, cols, limit, rng);
}

}  // namespace antnet
