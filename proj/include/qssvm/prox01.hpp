#pragma once

// The 0-1 loss and the proximal operator of u -> lambda * |u_+|_0.
//
// For threshold t = sqrt(2 lambda alpha) the prox is, componentwise,
//   0        if z in (0, t)
//   {0, z}   if z in {0, t}
//   z        if z < 0 or z > t.

#include "qssvm/model.hpp"

#include <cmath>
#include <span>

namespace qssvm {

struct ProxParams {
  double alpha = 1.0;
  double lambda = 1.0;

  /// Validates alpha > 0 and lambda > 0 (both finite).
  static ProxParams make(double alpha, double lambda);

  double threshold() const { return std::sqrt(2.0 * lambda * alpha); }
};

/// Which element of {0, z} to return on the boundary z in {0, t}.
enum class BoundaryTie { zero, identity };

namespace detail {

inline double prox_value(double z, double threshold, bool tie_to_zero) noexcept {
  if (z < 0.0 || z > threshold) return z;
  if (z > 0.0 && z < threshold) return 0.0;
  return tie_to_zero ? 0.0 : z;
}

}  // namespace detail

/// 1 for t > 0, 0 otherwise.
int zero_one_loss(double t);

/// |u_+|_0, the number of strictly positive entries.
Index positive_count(std::span<const double> u);
Index positive_count(const VectorRef& u);

double prox_scalar(double z, const ProxParams& params, BoundaryTie tie = BoundaryTie::zero);

Vector prox_vector(const VectorRef& z, const ProxParams& params, BoundaryTie tie = BoundaryTie::zero);

/// Whether u belongs to the (set-valued) prox of z; both boundary values count.
bool prox_contains(double u, double z, const ProxParams& params);

/// lambda * l01(u) + (u - z)^2 / (2 alpha), the objective the prox minimises.
double prox_objective(double u, double z, const ProxParams& params);

}  // namespace qssvm
