#include "qssvm/baselines.hpp"

#include "qssvm/error.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace qssvm {

void LsqConfig::validate() const {
  if (!(c_penalty > 0.0) || !std::isfinite(c_penalty)) throw InputError("c_penalty must be positive");
  if (!(ridge >= 0.0) || !std::isfinite(ridge)) throw InputError("ridge must be nonnegative");
}

void HingeConfig::validate() const {
  if (!(c_box > 0.0) || !std::isfinite(c_box)) throw InputError("c_box must be positive");
  if (!(tol > 0.0)) throw InputError("hinge tolerance must be positive");
  if (max_iter < 0) throw InputError("hinge max_iter must be nonnegative");
  if (!(ridge >= 0.0)) throw InputError("ridge must be nonnegative");
}

namespace {

constexpr double kRetryRidge = 1e-8;

bool solve_spd(const Matrix& A, const Vector& rhs, Vector& out) {
  Eigen::LLT<Matrix> llt(A);
  if (llt.info() != Eigen::Success) return false;
  out = llt.solve(rhs);
  return out.allFinite();
}

}  // namespace

LsqFit ls_qssvm_fit(const DesignCache& cache, const LsqConfig& cfg) {
  cfg.validate();
  // With phi_i = (s(x_i), x_i, 1) = -y_i a_i: sum phi_i phi_i' = a'a and
  // sum y_i phi_i = -sum a_i.
  const Matrix AtA = cache.a.transpose() * cache.a;
  const Vector rhs = -cfg.c_penalty * cache.a.colwise().sum().transpose();
  const Matrix base = 2.0 * cache.G + cfg.c_penalty * AtA;

  LsqFit fit;
  Vector theta;
  fit.ridge_used = cfg.ridge;
  Matrix A = base;
  A.diagonal().array() += 2.0 * cfg.ridge;
  if (!solve_spd(A, rhs, theta)) {
    fit.ridge_retried = true;
    fit.ridge_used = std::max(cfg.ridge, kRetryRidge);
    A = base;
    A.diagonal().array() += 2.0 * fit.ridge_used;
    if (!solve_spd(A, rhs, theta)) {
      theta = A.completeOrthogonalDecomposition().solve(rhs);
    }
  }
  fit.params = SurfaceParams::from_vector(theta, cache.m);
  return fit;
}

LsqFit ls_qssvm_fit(const Dataset& data, const LsqConfig& cfg) { return ls_qssvm_fit(build_design(data), cfg); }

namespace {

// SMO for  min 1/2 mu'Q mu - sum mu  s.t.  y'mu = 0, 0 <= mu <= C,
// Q_ij = y_i y_j psi_i . psi_j. Columns of Q are formed on demand.
class Smo {
 public:
  Smo(Matrix psi, Vector y, double c_box) : psi_(std::move(psi)), y_(std::move(y)), c_(c_box) {
    n_ = y_.size();
    qd_ = psi_.rowwise().squaredNorm();
    mu_ = Vector::Zero(n_);
    grad_ = Vector::Constant(n_, -1.0);
  }

  std::int64_t run(double tol, std::int64_t max_iter, bool& converged) {
    std::int64_t iter = 0;
    converged = false;
    Vector qi(n_), qj(n_);
    while (iter < max_iter) {
      Index i = -1, j = -1;
      if (select(tol, i, j, qi)) {
        converged = true;
        break;
      }
      column(j, qj);
      update(i, j, qi, qj);
      ++iter;
    }
    return iter;
  }

  const Vector& mu() const { return mu_; }

  // Offset rho of the decision function sum mu_j y_j K(x_j, x) - rho.
  double rho() const {
    double ub = std::numeric_limits<double>::infinity();
    double lb = -std::numeric_limits<double>::infinity();
    double sum_free = 0.0;
    Index n_free = 0;
    for (Index t = 0; t < n_; ++t) {
      const double yg = y_[t] * grad_[t];
      if (at_upper(t)) {
        if (y_[t] < 0) ub = std::min(ub, yg);
        else lb = std::max(lb, yg);
      } else if (at_lower(t)) {
        if (y_[t] > 0) ub = std::min(ub, yg);
        else lb = std::max(lb, yg);
      } else {
        ++n_free;
        sum_free += yg;
      }
    }
    if (n_free > 0) return sum_free / static_cast<double>(n_free);
    if (std::isfinite(ub) && std::isfinite(lb)) return 0.5 * (ub + lb);
    return std::isfinite(ub) ? ub : (std::isfinite(lb) ? lb : 0.0);
  }

 private:
  static constexpr double kTau = 1e-12;

  bool at_upper(Index t) const { return mu_[t] >= c_; }
  bool at_lower(Index t) const { return mu_[t] <= 0.0; }

  void column(Index i, Vector& out) const {
    out.noalias() = psi_ * psi_.row(i).transpose();
    out.array() *= y_.array() * y_[i];
  }

  // Returns true at optimality; otherwise fills the pair and column i.
  bool select(double tol, Index& i_out, Index& j_out, Vector& qi) const {
    double gmax = -std::numeric_limits<double>::infinity();
    Index i = -1;
    for (Index t = 0; t < n_; ++t) {
      if (y_[t] > 0) {
        if (!at_upper(t) && -grad_[t] >= gmax) {
          gmax = -grad_[t];
          i = t;
        }
      } else if (!at_lower(t) && grad_[t] >= gmax) {
        gmax = grad_[t];
        i = t;
      }
    }
    if (i < 0) return true;
    column(i, qi);

    double gmax2 = -std::numeric_limits<double>::infinity();
    double best = std::numeric_limits<double>::infinity();
    Index j = -1;
    for (Index t = 0; t < n_; ++t) {
      double diff = 0.0;
      double quad = 0.0;
      if (y_[t] > 0) {
        if (at_lower(t)) continue;
        gmax2 = std::max(gmax2, grad_[t]);
        diff = gmax + grad_[t];
        quad = qd_[i] + qd_[t] - 2.0 * y_[i] * qi[t];
      } else {
        if (at_upper(t)) continue;
        gmax2 = std::max(gmax2, -grad_[t]);
        diff = gmax - grad_[t];
        quad = qd_[i] + qd_[t] + 2.0 * y_[i] * qi[t];
      }
      if (diff > 0.0) {
        const double obj = -(diff * diff) / (quad > 0.0 ? quad : kTau);
        if (obj <= best) {
          best = obj;
          j = t;
        }
      }
    }
    if (gmax + gmax2 < tol || j < 0) return true;
    i_out = i;
    j_out = j;
    return false;
  }

  void update(Index i, Index j, const Vector& qi, const Vector& qj) {
    const double old_i = mu_[i];
    const double old_j = mu_[j];
    if (y_[i] != y_[j]) {
      double quad = qd_[i] + qd_[j] + 2.0 * qi[j];
      if (quad <= 0.0) quad = kTau;
      const double delta = (-grad_[i] - grad_[j]) / quad;
      const double diff = mu_[i] - mu_[j];
      mu_[i] += delta;
      mu_[j] += delta;
      if (diff > 0.0) {
        if (mu_[j] < 0.0) {
          mu_[j] = 0.0;
          mu_[i] = diff;
        }
      } else if (mu_[i] < 0.0) {
        mu_[i] = 0.0;
        mu_[j] = -diff;
      }
      if (diff > 0.0) {
        if (mu_[i] > c_) {
          mu_[i] = c_;
          mu_[j] = c_ - diff;
        }
      } else if (mu_[j] > c_) {
        mu_[j] = c_;
        mu_[i] = c_ + diff;
      }
    } else {
      double quad = qd_[i] + qd_[j] - 2.0 * qi[j];
      if (quad <= 0.0) quad = kTau;
      const double delta = (grad_[i] - grad_[j]) / quad;
      const double sum = mu_[i] + mu_[j];
      mu_[i] -= delta;
      mu_[j] += delta;
      if (sum > c_) {
        if (mu_[i] > c_) {
          mu_[i] = c_;
          mu_[j] = sum - c_;
        }
        if (mu_[j] > c_) {
          mu_[j] = c_;
          mu_[i] = sum - c_;
        }
      } else {
        if (mu_[j] < 0.0) {
          mu_[j] = 0.0;
          mu_[i] = sum;
        }
        if (mu_[i] < 0.0) {
          mu_[i] = 0.0;
          mu_[j] = sum;
        }
      }
    }
    grad_.noalias() += (mu_[i] - old_i) * qi + (mu_[j] - old_j) * qj;
  }

  Matrix psi_;
  Vector y_;
  double c_;
  Index n_ = 0;
  Vector qd_;
  Vector mu_;
  Vector grad_;
};

}  // namespace

HingeFit hinge_qssvm_fit(const DesignCache& cache, const HingeConfig& cfg) {
  cfg.validate();
  const Index u_dim = cache.d - 1;

  // Kernel phi_i' Gu^{-1} phi_j with Gu the (wtri, b) block of G.
  Matrix gu = cache.G.topLeftCorner(u_dim, u_dim);
  const double scale = std::max(1.0, gu.diagonal().maxCoeff());
  Eigen::LLT<Matrix> llt;
  double ridge = cfg.ridge * scale;
  for (int attempt = 0; attempt < 8; ++attempt) {
    Matrix shifted = gu;
    shifted.diagonal().array() += ridge;
    llt.compute(shifted);
    if (llt.info() == Eigen::Success) break;
    ridge = std::max(ridge * 100.0, 1e-12 * scale);
  }
  if (llt.info() != Eigen::Success) throw InputError("hinge fit: smooth Hessian block cannot be factored");

  // phi_i = -y_i a_i restricted to u.
  Matrix phi = cache.a.leftCols(u_dim);
  phi.array().colwise() *= -cache.labels.array();
  const Matrix L = llt.matrixL();
  const Matrix psi = L.triangularView<Eigen::Lower>().solve(phi.transpose()).transpose();

  Smo smo(psi, cache.labels, cfg.c_box);
  const std::int64_t max_iter = cfg.max_iter > 0 ? cfg.max_iter : std::max<std::int64_t>(10000000, 100 * cache.n);
  HingeFit fit;
  fit.iterations = smo.run(cfg.tol, max_iter, fit.converged);
  fit.mu = smo.mu();

  const Vector weighted = psi.transpose() * (fit.mu.array() * cache.labels.array()).matrix();
  const Vector u = L.transpose().triangularView<Eigen::Upper>().solve(weighted);
  Vector theta(cache.d);
  theta.head(u_dim) = u;
  theta[u_dim] = -smo.rho();
  fit.params = SurfaceParams::from_vector(theta, cache.m);
  return fit;
}

HingeFit hinge_qssvm_fit(const Dataset& data, const HingeConfig& cfg) {
  return hinge_qssvm_fit(build_design(data), cfg);
}

std::string to_string(Method m) {
  switch (m) {
    case Method::newton_l01: return "newton_l01";
    case Method::ls_qssvm: return "ls_qssvm";
    case Method::sqssvm: return "sqssvm";
  }
  return "unknown";
}

Method parse_method(const std::string& name) {
  if (name == "newton_l01") return Method::newton_l01;
  if (name == "ls_qssvm") return Method::ls_qssvm;
  if (name == "sqssvm") return Method::sqssvm;
  throw InputError("unknown method '" + name + "'");
}

TrialResult run_method(Method method, const Dataset& train, const Dataset& test, const SolverConfig& solver,
                       const LsqConfig& lsq) {
  using Clock = std::chrono::steady_clock;
  TrialResult out;
  const auto start = Clock::now();
  SurfaceParams params;
  switch (method) {
    case Method::newton_l01: {
      const SolveReport report = solve(train, solver);
      out.failed = report.status == SolveStatus::singular_system;
      out.converged = report.status == SolveStatus::converged;
      params = report.final.theta;
      break;
    }
    case Method::ls_qssvm:
      params = ls_qssvm_fit(train, lsq).params;
      break;
    case Method::sqssvm: {
      HingeConfig cfg;
      cfg.c_box = std::sqrt(2.0 * solver.lambda / solver.alpha);
      cfg.tol = solver.hinge_tol;
      const HingeFit fit = hinge_qssvm_fit(train, cfg);
      out.converged = fit.converged;
      params = fit.params;
      break;
    }
  }
  out.seconds = std::chrono::duration<double>(Clock::now() - start).count();
  if (!out.failed) out.accuracy = accuracy(params, test);
  return out;
}

MethodStats summarize(Method method, const std::vector<TrialResult>& trials) {
  MethodStats s;
  s.method = method;
  s.trials = static_cast<int>(trials.size());
  double time_sum = 0.0;
  for (const TrialResult& t : trials) {
    time_sum += t.seconds;
    if (t.failed) {
      ++s.failures;
      continue;
    }
    if (!t.converged) ++s.not_converged;
    s.accuracies.push_back(100.0 * t.accuracy);
  }
  if (!trials.empty()) s.mean_time = time_sum / static_cast<double>(trials.size());
  if (s.accuracies.empty()) {
    s.min = s.max = s.mean = std::numeric_limits<double>::quiet_NaN();
    return s;
  }
  s.min = *std::min_element(s.accuracies.begin(), s.accuracies.end());
  s.max = *std::max_element(s.accuracies.begin(), s.accuracies.end());
  const double count = static_cast<double>(s.accuracies.size());
  s.mean = std::accumulate(s.accuracies.begin(), s.accuracies.end(), 0.0) / count;
  double ss = 0.0;
  for (double a : s.accuracies) ss += (a - s.mean) * (a - s.mean);
  s.variance = ss / count;
  s.std_frac = std::sqrt(s.variance) / 100.0;
  return s;
}

std::vector<MethodStats> compare(const Dataset& train, const Dataset& test, const std::vector<Method>& methods,
                                 int trials, std::uint64_t seed, const SolverConfig& solver) {
  if (train.size() == 0 || test.size() == 0) throw InputError("compare needs non-empty train and test sets");
  if (trials < 1) throw InputError("trials must be at least 1");
  solver.validate();

  // Each repeat sees the training rows in a seeded order, so results that
  // depend on sample order would show up as spread.
  std::vector<Dataset> orders;
  std::mt19937_64 rng(seed);
  for (int t = 0; t < trials; ++t) {
    std::vector<Index> rows(static_cast<std::size_t>(train.size()));
    std::iota(rows.begin(), rows.end(), Index{0});
    if (t > 0) std::shuffle(rows.begin(), rows.end(), rng);
    orders.push_back(train.subset(rows));
  }

  std::vector<MethodStats> out;
  for (Method method : methods) {
    std::vector<TrialResult> results;
    for (const Dataset& ordered : orders) results.push_back(run_method(method, ordered, test, solver));
    out.push_back(summarize(method, results));
  }
  return out;
}

}  // namespace qssvm
