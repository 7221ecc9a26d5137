#pragma once

// Perturbed Newton iteration on the stationary equation.
//
// Each step fixes the working set T from the current (F, z), solves
//   [ G    a_T' ] [ d_theta ]     [ grad f + a_T' z_T ]
//   [ a_T  -g I ] [ d_z_T   ] = - [ F_T               ]
// and sets z to zero off T. The damping g follows
//   g_k = max(min(tau g_{k-1}, rho |Psi_k|), kGammaFloor).

#include "qssvm/model.hpp"
#include "qssvm/stationarity.hpp"

#include <optional>
#include <string>
#include <vector>

namespace qssvm {

inline constexpr double kGammaFloor = 1e-14;

enum class WarmStart { zeros, least_squares, hinge };

enum class SolveStatus { converged, max_iter, singular_system, diverged };

std::string to_string(WarmStart w);
std::string to_string(SolveStatus s);
/// Throws InputError on unknown names.
WarmStart parse_warm_start(const std::string& name);

struct SolverConfig {
  double lambda = 3e4;
  double alpha = 3e-4;
  double tau = 0.5;
  double rho = 1.0;
  double gamma_init = 0.1;
  double eps = 1e-8;
  int max_iter = 100;
  WarmStart warm_start = WarmStart::hinge;
  int safeguard_window = 5;
  // Stopping tolerance of the hinge warm start. Loose on purpose: the
  // Newton phase does the refinement.
  double hinge_tol = 1e-3;

  /// Throws InputError when a field is out of range. eps may be +inf.
  void validate() const;
};

struct SolverState {
  SurfaceParams theta;
  Vector z;
  double gamma = 0.0;  // damping used for the step out of this state
  IndexSets working;
  ResidualParts residual;
  int iter = 0;
};

struct SolveReport {
  SolverState final;
  // residuals[k] and working_sizes[k] describe iterate k (iters + 1 entries);
  // gammas[k] is the damping of the step from iterate k to k + 1 (iters entries).
  std::vector<double> residuals;
  std::vector<double> gammas;
  std::vector<Index> working_sizes;
  SolveStatus status = SolveStatus::max_iter;
  PStatCertificate certificate;
  double sigma_min = 0.0;  // of the failing system when singular_system
  double wall_time = 0.0;
  double warm_start_time = 0.0;
  WarmStart warm_start = WarmStart::hinge;
  int warm_start_restarts = 0;  // hinge refits at a tighter tolerance after a failed run

  int iters() const { return static_cast<int>(gammas.size()); }
};

double gamma_update(double gamma_prev, double tau, double rho, double resid_norm);

struct NewtonDirection {
  Vector d_theta;
  Vector d_z_working;  // aligned with state.working.working
  Vector d_z_rest;     // length n, -z off the working set, 0 on it
  bool singular = false;
  double sigma_min = 0.0;
};

NewtonDirection newton_direction(const SolverState& state, const DesignCache& cache, double gamma);

/// Runs the iteration. Without theta0 the configured warm start is used;
/// z0 defaults to the warm start's multipliers (zero for zeros/least_squares).
/// A hinge start that fails to converge is refitted at 100x tighter
/// tolerance, down to 1e-9, and the iteration restarted.
SolveReport solve(const DesignCache& cache, const SolverConfig& config,
                  const std::optional<SurfaceParams>& theta0 = std::nullopt,
                  const std::optional<Vector>& z0 = std::nullopt);

SolveReport solve(const Dataset& data, const SolverConfig& config,
                  const std::optional<SurfaceParams>& theta0 = std::nullopt,
                  const std::optional<Vector>& z0 = std::nullopt);

struct RateProbe {
  double fitted_c = 0.0;
  double fit_residual = 0.0;  // natural log, one-sided
  bool quadratic = false;
  bool inconclusive = true;
  Index tail_length = 0;
  Index pairs_used = 0;
};

/// Fits r_{k+1} <= C r_k^2 on the tail of a residual trace.
///
/// The tail is the trailing strictly decreasing run of residuals at or below
/// 1e-2; fewer than 4 entries is inconclusive. Pairs whose successor is at or
/// below `floor` are roundoff and skipped. The fit uses the last three steps
/// taken on the rho |Psi| damping branch (every step counts when `gammas` is
/// empty): the fit residual is the largest amount, in natural log, by which
/// any tail step is slower than their median ratio r_{k+1} / r_k^2, and C is
/// their largest ratio. quadratic means the fit residual is below 0.5 and C
/// is finite, which puts C within a factor e^0.5 of the median.
RateProbe rate_probe(const std::vector<double>& residuals, const std::vector<double>& gammas = {},
                     double rho = 1.0, double floor = 1e-12);

}  // namespace qssvm
