#include "antnet/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace antnet {

namespace {

double probe(ParamStore& params, const ObjectiveFn& f, const std::string& where) {
  const double v = f(params, false);
  if (!std::isfinite(v)) throw NumericError("objective is non-finite at probe of " + where);
  return v;
}

}  // namespace

GradCheckReport finite_diff_check(ParamStore& params, const ObjectiveFn& f, double epsilon) {
  if (!(epsilon >= 1e-7 && epsilon <= 1e-3)) {
    throw std::invalid_argument("finite-difference epsilon must lie in [1e-7, 1e-3]");
  }
  params.zero_grad();
  const double base = f(params, true);
  if (!std::isfinite(base)) throw NumericError("objective is non-finite at the base point");

  std::vector<ad::Tensor> analytic;
  analytic.reserve(params.size());
  for (const auto& p : params.all()) analytic.push_back(p.grad);

  GradCheckReport report;
  for (std::size_t pi = 0; pi < params.size(); ++pi) {
    ad::Parameter& p = params.all()[pi];
    if (!p.trainable) continue;
    ParamGradError entry{p.name};
    for (std::size_t i = 0; i < p.value.size(); ++i) {
      const double saved = p.value[i];
      p.value[i] = saved + epsilon;
      const double up = probe(params, f, p.name);
      p.value[i] = saved - epsilon;
      const double down = probe(params, f, p.name);
      p.value[i] = saved;

      const double numeric = (up - down) / (2.0 * epsilon);
      const double a = analytic[pi][i];
      const double denom = std::max({std::abs(a), std::abs(numeric), 1e-8});
      const double rel = std::abs(a - numeric) / denom;
      if (i == 0 || rel > entry.max_relative_error) {
        entry.max_relative_error = rel;
        entry.worst_index = i;
        entry.analytic = a;
        entry.numeric = numeric;
      }
      ++report.checked_scalars;
    }
    if (report.worst_param.empty() || entry.max_relative_error > report.max_relative_error) {
      report.worst_param = entry.name;
      report.max_relative_error = entry.max_relative_error;
    }
    report.per_param.push_back(std::move(entry));
  }
  // Leave grads holding the analytic result at the unperturbed point.
  for (std::size_t pi = 0; pi < params.size(); ++pi) params.all()[pi].grad = analytic[pi];
  return report;
}

}  // namespace antnet
