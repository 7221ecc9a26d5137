#pragma once

// Convex quadratic-surface classifiers: the least-squares model and the
// hinge-loss model. Both serve as comparators and as Newton warm starts.

#include "qssvm/model.hpp"
#include "qssvm/newton.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace qssvm {

struct LsqConfig {
  double c_penalty = 1.0;
  double ridge = 1e-10;

  void validate() const;
};

struct LsqFit {
  SurfaceParams params;
  double ridge_used = 0.0;
  bool ridge_retried = false;
};

/// Minimises sum_i |M_i wtri + b|^2 + C/2 sum_i (h(x_i) - y_i)^2 + ridge |theta|^2
/// through one Cholesky solve of its normal equations.
LsqFit ls_qssvm_fit(const Dataset& data, const LsqConfig& cfg = {});
LsqFit ls_qssvm_fit(const DesignCache& cache, const LsqConfig& cfg = {});

struct HingeConfig {
  double c_box = 1.0;
  double tol = 1e-3;
  std::int64_t max_iter = 0;  // 0 picks max(1e7, 100 n)
  double ridge = 1e-10;       // relative to the largest diagonal entry of G

  void validate() const;
};

struct HingeFit {
  SurfaceParams params;
  Vector mu;  // dual variables in [0, c_box]; these are the Newton multipliers
  std::int64_t iterations = 0;
  bool converged = false;
};

/// min f(theta) + c_box * sum_i max(0, F_i(theta)) through SMO on its dual
/// (second-order working-set selection). The dual variables mu satisfy
/// grad f + a'mu = 0 up to the ridge.
HingeFit hinge_qssvm_fit(const DesignCache& cache, const HingeConfig& cfg);
HingeFit hinge_qssvm_fit(const Dataset& data, const HingeConfig& cfg);

enum class Method { newton_l01, ls_qssvm, sqssvm };

std::string to_string(Method m);
Method parse_method(const std::string& name);

struct TrialResult {
  double accuracy = 0.0;  // fraction
  double seconds = 0.0;
  bool failed = false;     // singular system; excluded from the statistics
  bool converged = true;   // newton_l01 only
};

/// Fits one method on train and scores it on test. Hinge uses
/// c_box = sqrt(2 lambda / alpha) from the solver config.
TrialResult run_method(Method method, const Dataset& train, const Dataset& test, const SolverConfig& solver,
                       const LsqConfig& lsq = {});

struct MethodStats {
  Method method = Method::newton_l01;
  int trials = 0;
  int failures = 0;
  int not_converged = 0;
  double min = 0.0;       // percent
  double max = 0.0;       // percent
  double mean = 0.0;      // percent
  double variance = 0.0;  // percent^2, population
  double std_frac = 0.0;  // standard deviation as a fraction
  double mean_time = 0.0;
  std::vector<double> accuracies;  // per successful trial, percent
};

MethodStats summarize(Method method, const std::vector<TrialResult>& trials);

/// Runs every method `trials` times on a fixed split. Repeats only matter for
/// timing; the methods are deterministic.
std::vector<MethodStats> compare(const Dataset& train, const Dataset& test, const std::vector<Method>& methods,
                                 int trials, std::uint64_t seed, const SolverConfig& solver = {});

}  // namespace qssvm
