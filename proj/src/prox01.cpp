#include "qssvm/prox01.hpp"

#include "qssvm/error.hpp"
#include "qssvm/kernels.hpp"

#include <string>

namespace qssvm {

ProxParams ProxParams::make(double alpha, double lambda) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw InputError("prox: alpha must be positive and finite, got " + std::to_string(alpha));
  }
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw InputError("prox: lambda must be positive and finite, got " + std::to_string(lambda));
  }
  return ProxParams{alpha, lambda};
}

int zero_one_loss(double t) { return t > 0.0 ? 1 : 0; }

Index positive_count(std::span<const double> u) { return kernels::parallel::positive_count(u); }

Index positive_count(const VectorRef& u) {
  return positive_count(std::span<const double>(u.data(), static_cast<std::size_t>(u.size())));
}

double prox_scalar(double z, const ProxParams& params, BoundaryTie tie) {
  if (!std::isfinite(z)) throw InputError("prox: non-finite input");
  return detail::prox_value(z, params.threshold(), tie == BoundaryTie::zero);
}

Vector prox_vector(const VectorRef& z, const ProxParams& params, BoundaryTie tie) {
  if (!z.allFinite()) throw InputError("prox: non-finite input");
  Vector out(z.size());
  kernels::parallel::prox(std::span<const double>(z.data(), static_cast<std::size_t>(z.size())),
                          std::span<double>(out.data(), static_cast<std::size_t>(out.size())),
                          params.threshold(), tie == BoundaryTie::zero);
  return out;
}

bool prox_contains(double u, double z, const ProxParams& params) {
  const double t = params.threshold();
  if (z < 0.0 || z > t) return u == z;
  if (z > 0.0 && z < t) return u == 0.0;
  return u == 0.0 || u == z;
}

double prox_objective(double u, double z, const ProxParams& params) {
  const double diff = u - z;
  return params.lambda * zero_one_loss(u) + diff * diff / (2.0 * params.alpha);
}

}  // namespace qssvm
