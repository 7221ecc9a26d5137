#pragma once

// Index sets, the stationary-equation residual and the certificates that
// decide whether a pair (theta, z) is P-stationary.
//
// A pair is P-stationary for step alpha when
//   grad f(theta) + a'z = 0   and   F(theta) in prox(F(theta) + alpha z).

#include "qssvm/model.hpp"

#include <limits>
#include <vector>

namespace qssvm {

struct IndexSets {
  std::vector<Index> t_o;
  std::vector<Index> t_1;
  std::vector<Index> t_2;
  std::vector<Index> t_3;
  std::vector<Index> working;  // t_o and t_1, ascending
};

/// Relative width of the band used for the boundary tests s_i in {0, t}.
inline constexpr double kBoundaryBand = 1e-12;

/// Splits {0..n-1} by where s = F + alpha z sits relative to (0, t),
/// t = sqrt(2 alpha lambda). Boundary membership uses an absolute band of
/// kBoundaryBand * max(1, t).
IndexSets index_sets(const VectorRef& F, const VectorRef& z, double alpha, double lambda);

struct ResidualParts {
  Vector grad_part;    // grad f + a_T' z_T
  Vector margin_part;  // F_T
  Vector dual_part;    // z off T, in index order
  double norm = 0.0;
};

ResidualParts residual(const VectorRef& theta, const VectorRef& z, const std::vector<Index>& working,
                       const DesignCache& cache);

struct AlphaBounds {
  double alpha1 = std::numeric_limits<double>::infinity();
  double alpha2 = std::numeric_limits<double>::infinity();
  double alpha_star = std::numeric_limits<double>::infinity();
};

/// alpha1 = min F_i^2 / (2 lambda) over F_i > zero_tol, alpha2 = min 2 lambda / z_i^2
/// over z_i > zero_tol, each +inf when nothing qualifies.
AlphaBounds alpha_bounds(const VectorRef& F, const VectorRef& z, double lambda, double zero_tol = 0.0);

struct PStatCertificate {
  double grad_residual = 0.0;
  bool prox_ok = false;
  bool sign_ok = false;
  Index prox_violations = 0;
  double alpha1 = std::numeric_limits<double>::infinity();
  double alpha2 = std::numeric_limits<double>::infinity();
  double alpha_star = std::numeric_limits<double>::infinity();
  double alpha = 0.0;
  double lambda = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

/// Checks both P-stationarity conditions at tolerance tol. The prox test
/// admits u = F_i for v = F_i + alpha z_i when either |u| <= tol and
/// v in [-tol, t + tol], or alpha |z_i| <= tol and v lies outside (tol, t - tol).
/// The sign conditions (z_i in [0, sqrt(2 lambda / alpha)] where F_i = 0, z_i = 0
/// elsewhere) are reported in sign_ok but do not gate `passed`.
PStatCertificate pstationary_check(const VectorRef& theta, const VectorRef& z, double alpha, double lambda,
                                   const DesignCache& cache, double tol);

struct MultiplierRecovery {
  Vector z;
  Index rank = 0;
  bool rank_deficient = false;
};

/// Minimum-norm least-squares z_T for grad f(theta) + a_T' z_T = 0, zero off T.
MultiplierRecovery recover_multiplier(const VectorRef& theta, const std::vector<Index>& working,
                                      const DesignCache& cache);

struct RankCheck {
  bool independent = true;
  Index rank = 0;
};

/// Linear independence of the rows a_i, i in working.
RankCheck assumption_rank_check(const std::vector<Index>& working, const DesignCache& cache);

/// [[G, a_T'], [a_T, -gamma I]].
Matrix augmented_matrix(const std::vector<Index>& working, const DesignCache& cache, double gamma);

struct SecondOrderCheck {
  double sigma_min = 0.0;
  double sigma_max = 0.0;
  bool nonsingular = false;
  // Filled by the subset sweep only.
  Index subsets_checked = 0;
  double worst_sigma_min = 0.0;
};

/// Extreme singular values of the augmented matrix; nonsingular when
/// sigma_min > d * eps * sigma_max. With sweep_subsets (|working| <= 12 only)
/// every subset of the working set is also factored and the worst is kept.
SecondOrderCheck second_order_check(const std::vector<Index>& working, const DesignCache& cache, double gamma = 0.0,
                                    bool sweep_subsets = false);

inline constexpr Index kMaxSweepSize = 12;

}  // namespace qssvm
