#include "qssvm/newton.hpp"

#include "qssvm/baselines.hpp"
#include "qssvm/error.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

namespace qssvm {

std::string to_string(WarmStart w) {
  switch (w) {
    case WarmStart::zeros: return "zeros";
    case WarmStart::least_squares: return "least_squares";
    case WarmStart::hinge: return "hinge";
  }
  return "unknown";
}

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::converged: return "converged";
    case SolveStatus::max_iter: return "max_iter";
    case SolveStatus::singular_system: return "singular_system";
    case SolveStatus::diverged: return "diverged";
  }
  return "unknown";
}

WarmStart parse_warm_start(const std::string& name) {
  if (name == "zeros") return WarmStart::zeros;
  if (name == "least_squares") return WarmStart::least_squares;
  if (name == "hinge") return WarmStart::hinge;
  throw InputError("unknown warm start '" + name + "'");
}

void SolverConfig::validate() const {
  auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
  if (!positive(lambda)) throw InputError("lambda must be positive");
  if (!positive(alpha)) throw InputError("alpha must be positive");
  if (!(tau > 0.0 && tau < 1.0)) throw InputError("tau must lie in (0, 1)");
  if (!positive(rho)) throw InputError("rho must be positive");
  if (!positive(gamma_init)) throw InputError("gamma0 must be positive");
  if (!(eps > 0.0)) throw InputError("eps must be positive");
  if (max_iter < 1) throw InputError("max_iter must be at least 1");
  if (safeguard_window < 1) throw InputError("safeguard window must be at least 1");
  if (!positive(hinge_tol)) throw InputError("hinge tolerance must be positive");
}

double gamma_update(double gamma_prev, double tau, double rho, double resid_norm) {
  return std::max(std::min(tau * gamma_prev, rho * resid_norm), kGammaFloor);
}

NewtonDirection newton_direction(const SolverState& state, const DesignCache& cache, double gamma) {
  const std::vector<Index>& working = state.working.working;
  const auto k = static_cast<Index>(working.size());
  const Index d = cache.d;

  Matrix H = augmented_matrix(working, cache, gamma);
  // With no working set the system is G d_theta = -grad f, singular along c;
  // the damping doubles as a Tikhonov term there.
  if (k == 0) H.diagonal().array() += gamma;

  Vector rhs(d + k);
  rhs.head(d) = -state.residual.grad_part;
  rhs.tail(k) = -state.residual.margin_part;

  NewtonDirection out;
  Eigen::FullPivLU<Matrix> lu(H);
  lu.setThreshold(0.0);
  Vector sol;
  bool ok = lu.isInvertible();
  if (ok) {
    sol = lu.solve(rhs);
    const double scale = H.norm() * sol.norm() + rhs.norm();
    ok = sol.allFinite() && (H * sol - rhs).norm() <= 1e-6 * std::max(scale, std::numeric_limits<double>::min());
  }
  if (!ok) {
    out.singular = true;
    const Vector sv = Eigen::BDCSVD<Matrix>(H).singularValues();
    out.sigma_min = sv.size() > 0 ? sv[sv.size() - 1] : 0.0;
    return out;
  }

  out.d_theta = sol.head(d);
  out.d_z_working = sol.tail(k);
  out.d_z_rest = -state.z;
  for (Index i : working) out.d_z_rest[i] = 0.0;
  return out;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void refresh(SolverState& state, const DesignCache& cache, const SolverConfig& cfg) {
  const Vector theta = state.theta.to_vector();
  const Vector F = margins(theta, cache);
  state.working = index_sets(F, state.z, cfg.alpha, cfg.lambda);
  state.residual = residual(theta, state.z, state.working.working, cache);
}

}  // namespace

namespace {

constexpr double kHingeTolFloor = 1e-9;

HingeFit hinge_start(const DesignCache& cache, const SolverConfig& config, double tol) {
  HingeConfig hc;
  hc.c_box = std::sqrt(2.0 * config.lambda / config.alpha);
  hc.tol = tol;
  HingeFit fit = hinge_qssvm_fit(cache, hc);
  // Samples clipped at the box are margin violators; a P-stationary
  // point carries no multiplier on them.
  fit.mu = (fit.mu.array() < hc.c_box).select(fit.mu, 0.0);
  return fit;
}

SolveReport iterate(const DesignCache& cache, const SolverConfig& config, const std::optional<SurfaceParams>& theta0,
                    const std::optional<Vector>& z0);

}  // namespace

SolveReport solve(const DesignCache& cache, const SolverConfig& config, const std::optional<SurfaceParams>& theta0,
                  const std::optional<Vector>& z0) {
  config.validate();
  if (!theta0 && !z0 && config.warm_start == WarmStart::hinge) {
    // Newton only converges locally. When the multipliers are small, a loose
    // hinge solution can sit outside that region, so refit it more tightly
    // and start again.
    const auto start = Clock::now();
    SolveReport report = iterate(cache, config, std::nullopt, std::nullopt);
    for (double tol = config.hinge_tol * 1e-2;
         report.status != SolveStatus::converged && tol >= kHingeTolFloor; tol *= 1e-2) {
      HingeFit fit = hinge_start(cache, config, tol);
      const int restarts = report.warm_start_restarts + 1;
      report = iterate(cache, config, fit.params, fit.mu);
      report.warm_start_restarts = restarts;
    }
    report.wall_time = seconds_since(start);
    return report;
  }
  return iterate(cache, config, theta0, z0);
}

namespace {

SolveReport iterate(const DesignCache& cache, const SolverConfig& config, const std::optional<SurfaceParams>& theta0,
                    const std::optional<Vector>& z0) {
  const auto start = Clock::now();

  SolveReport report;
  report.warm_start = config.warm_start;
  SolverState& state = report.final;

  if (theta0) {
    if (theta0->dim() != cache.m || theta0->wtri.size() != cache.p) throw InputError("theta0 has the wrong shape");
    state.theta = *theta0;
    state.z = Vector::Zero(cache.n);
  } else {
    switch (config.warm_start) {
      case WarmStart::zeros:
        state.theta = SurfaceParams::zeros(cache.m);
        state.z = Vector::Zero(cache.n);
        break;
      case WarmStart::least_squares:
        state.theta = ls_qssvm_fit(cache).params;
        state.z = Vector::Zero(cache.n);
        break;
      case WarmStart::hinge: {
        HingeFit fit = hinge_start(cache, config, config.hinge_tol);
        state.theta = std::move(fit.params);
        state.z = std::move(fit.mu);
        break;
      }
    }
  }
  if (z0) {
    if (z0->size() != cache.n) throw InputError("z0 has the wrong length");
    state.z = *z0;
  }
  report.warm_start_time = seconds_since(start);

  double gamma_prev = config.gamma_init;
  int increases = 0;
  for (int k = 0;; ++k) {
    state.iter = k;
    refresh(state, cache, config);
    const double r = state.residual.norm;
    report.residuals.push_back(r);
    report.working_sizes.push_back(static_cast<Index>(state.working.working.size()));

    if (!std::isfinite(r)) {
      report.status = SolveStatus::diverged;
      break;
    }
    if (k > 0 && r > report.residuals[static_cast<std::size_t>(k - 1)]) {
      ++increases;
    } else {
      increases = 0;
    }
    if (r < config.eps) {
      const double tol = std::isfinite(config.eps) ? 10.0 * config.eps : config.eps;
      report.certificate =
          pstationary_check(state.theta.to_vector(), state.z, config.alpha, config.lambda, cache, tol);
      if (report.certificate.passed) {
        report.status = SolveStatus::converged;
        break;
      }
    }
    if (increases >= config.safeguard_window) {
      report.status = SolveStatus::diverged;
      break;
    }
    if (k >= config.max_iter) {
      report.status = SolveStatus::max_iter;
      break;
    }

    state.gamma = gamma_update(gamma_prev, config.tau, config.rho, r);
    const NewtonDirection dir = newton_direction(state, cache, state.gamma);
    if (dir.singular) {
      report.status = SolveStatus::singular_system;
      report.sigma_min = dir.sigma_min;
      break;
    }
    report.gammas.push_back(state.gamma);

    Vector theta = state.theta.to_vector() + dir.d_theta;
    state.theta = SurfaceParams::from_vector(theta, cache.m);
    Vector z_next = Vector::Zero(cache.n);
    const auto& working = state.working.working;
    for (std::size_t j = 0; j < working.size(); ++j) {
      z_next[working[j]] = state.z[working[j]] + dir.d_z_working[static_cast<Index>(j)];
    }
    state.z = std::move(z_next);
    gamma_prev = state.gamma;
  }

  if (report.status != SolveStatus::converged) {
    const double tol = std::isfinite(config.eps) ? 10.0 * config.eps : config.eps;
    const Vector theta = state.theta.to_vector();
    if (theta.allFinite() && state.z.allFinite()) {
      report.certificate = pstationary_check(theta, state.z, config.alpha, config.lambda, cache, tol);
    }
  }
  report.wall_time = seconds_since(start);
  return report;
}

}  // namespace

SolveReport solve(const Dataset& data, const SolverConfig& config, const std::optional<SurfaceParams>& theta0,
                  const std::optional<Vector>& z0) {
  const auto start = Clock::now();
  const DesignCache cache = build_design(data);
  SolveReport report = solve(cache, config, theta0, z0);
  report.wall_time = seconds_since(start);
  return report;
}

RateProbe rate_probe(const std::vector<double>& residuals, const std::vector<double>& gammas, double rho,
                     double floor) {
  RateProbe out;
  const auto n = static_cast<Index>(residuals.size());
  Index begin = n;
  while (begin > 0) {
    const double r = residuals[static_cast<std::size_t>(begin - 1)];
    if (!(r <= 1e-2) || !(r > 0.0)) break;
    if (begin < n && !(r > residuals[static_cast<std::size_t>(begin)])) break;
    --begin;
  }
  out.tail_length = n - begin;
  if (out.tail_length < 4) return out;

  struct Pair {
    double log_q;
    bool on_rho_branch;
  };
  std::vector<Pair> pairs;
  for (Index k = begin; k + 1 < n; ++k) {
    const double r = residuals[static_cast<std::size_t>(k)];
    const double next = residuals[static_cast<std::size_t>(k + 1)];
    if (!(next > floor)) continue;
    bool on_rho_branch = true;
    if (!gammas.empty() && static_cast<std::size_t>(k) < gammas.size()) {
      on_rho_branch = gammas[static_cast<std::size_t>(k)] >= rho * r * (1.0 - 1e-9);
    }
    pairs.push_back({std::log(next) - 2.0 * std::log(r), on_rho_branch});
  }

  // The fit is the median ratio over the last (up to) kFitPairs rho-branch
  // steps. The rate bound is one-sided, so only steps slower than the fit
  // count against it; the first step out of a warm start is often much
  // faster. The reported C is the largest of those ratios, so the fitted
  // steps satisfy r_{k+1} <= C r_k^2 by construction.
  constexpr std::size_t kFitPairs = 3;
  std::vector<double> fit;
  for (std::size_t k = pairs.size(); k-- > 0 && fit.size() < kFitPairs;) {
    if (pairs[k].on_rho_branch) fit.push_back(pairs[k].log_q);
  }
  if (fit.empty()) return out;
  std::sort(fit.begin(), fit.end());
  const double log_median = fit.size() % 2 == 1 ? fit[fit.size() / 2]
                                                : 0.5 * (fit[fit.size() / 2 - 1] + fit[fit.size() / 2]);
  double dev = 0.0;
  for (const Pair& pair : pairs) dev = std::max(dev, pair.log_q - log_median);
  const double log_c = fit.back();

  out.inconclusive = false;
  out.pairs_used = static_cast<Index>(pairs.size());
  out.fitted_c = std::exp(log_c);
  out.fit_residual = dev;
  out.quadratic = dev < 0.5 && std::isfinite(out.fitted_c);
  return out;
}

}  // namespace qssvm
