#include "qssvm/stationarity.hpp"

#include "qssvm/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iterator>
#include <string>

namespace qssvm {

namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) throw InputError(std::string(name) + " must be positive and finite");
}

void require_same_size(const VectorRef& u, const VectorRef& v) {
  if (u.size() != v.size()) {
    throw InputError("length mismatch: " + std::to_string(u.size()) + " vs " + std::to_string(v.size()));
  }
}

void require_working(const std::vector<Index>& working, Index n) {
  for (Index i : working) {
    if (i < 0 || i >= n) throw InputError("working index " + std::to_string(i) + " out of range");
  }
}

Matrix working_rows(const std::vector<Index>& working, const DesignCache& cache) {
  Matrix rows(static_cast<Index>(working.size()), cache.d);
  for (std::size_t k = 0; k < working.size(); ++k) rows.row(static_cast<Index>(k)) = cache.a.row(working[k]);
  return rows;
}

Vector singular_values(const Matrix& A) {
  if (A.size() == 0) return Vector();
  return Eigen::BDCSVD<Matrix>(A).singularValues();
}

}  // namespace

IndexSets index_sets(const VectorRef& F, const VectorRef& z, double alpha, double lambda) {
  require_positive(alpha, "alpha");
  require_positive(lambda, "lambda");
  require_same_size(F, z);

  const double t = std::sqrt(2.0 * alpha * lambda);
  const double band = kBoundaryBand * std::max(1.0, t);
  IndexSets sets;
  for (Index i = 0; i < F.size(); ++i) {
    const double s = F[i] + alpha * z[i];
    if (std::abs(s) <= band || std::abs(s - t) <= band) {
      sets.t_2.push_back(i);
      if (std::abs(F[i]) <= band) sets.t_o.push_back(i);
    } else if (s > 0.0 && s < t) {
      sets.t_1.push_back(i);
    } else {
      sets.t_3.push_back(i);
    }
  }
  std::merge(sets.t_o.begin(), sets.t_o.end(), sets.t_1.begin(), sets.t_1.end(), std::back_inserter(sets.working));
  return sets;
}

ResidualParts residual(const VectorRef& theta, const VectorRef& z, const std::vector<Index>& working,
                       const DesignCache& cache) {
  if (z.size() != cache.n) throw InputError("z has the wrong length");
  require_working(working, cache.n);
  const Vector F = margins(theta, cache);

  ResidualParts out;
  out.grad_part = smooth_gradient(theta, cache);
  out.margin_part.resize(static_cast<Index>(working.size()));
  std::vector<char> in_working(static_cast<std::size_t>(cache.n), 0);
  for (std::size_t k = 0; k < working.size(); ++k) {
    const Index i = working[k];
    in_working[static_cast<std::size_t>(i)] = 1;
    out.grad_part.noalias() += z[i] * cache.a.row(i).transpose();
    out.margin_part[static_cast<Index>(k)] = F[i];
  }
  out.dual_part.resize(cache.n - static_cast<Index>(std::count(in_working.begin(), in_working.end(), 1)));
  Index slot = 0;
  for (Index i = 0; i < cache.n; ++i) {
    if (!in_working[static_cast<std::size_t>(i)]) out.dual_part[slot++] = z[i];
  }
  out.norm = std::sqrt(out.grad_part.squaredNorm() + out.margin_part.squaredNorm() + out.dual_part.squaredNorm());
  return out;
}

AlphaBounds alpha_bounds(const VectorRef& F, const VectorRef& z, double lambda, double zero_tol) {
  require_positive(lambda, "lambda");
  require_same_size(F, z);
  AlphaBounds out;
  for (Index i = 0; i < F.size(); ++i) {
    if (F[i] > zero_tol) out.alpha1 = std::min(out.alpha1, F[i] * F[i] / (2.0 * lambda));
    if (z[i] > zero_tol) out.alpha2 = std::min(out.alpha2, 2.0 * lambda / (z[i] * z[i]));
  }
  out.alpha_star = std::min(out.alpha1, out.alpha2);
  return out;
}

PStatCertificate pstationary_check(const VectorRef& theta, const VectorRef& z, double alpha, double lambda,
                                   const DesignCache& cache, double tol) {
  require_positive(alpha, "alpha");
  require_positive(lambda, "lambda");
  if (!(tol >= 0.0)) throw InputError("tolerance must be nonnegative");
  if (z.size() != cache.n) throw InputError("z has the wrong length");

  const Vector F = margins(theta, cache);
  const double t = std::sqrt(2.0 * alpha * lambda);
  const double z_cap = std::sqrt(2.0 * lambda / alpha);

  PStatCertificate cert;
  cert.alpha = alpha;
  cert.lambda = lambda;
  cert.tolerance = tol;
  cert.grad_residual = (smooth_gradient(theta, cache) + cache.a.transpose() * z).norm();

  cert.sign_ok = true;
  for (Index i = 0; i < cache.n; ++i) {
    const double u = F[i];
    const double v = u + alpha * z[i];
    const bool zero_branch = std::abs(u) <= tol && v >= -tol && v <= t + tol;
    const bool identity_branch = alpha * std::abs(z[i]) <= tol && (v <= tol || v >= t - tol);
    if (!zero_branch && !identity_branch) ++cert.prox_violations;

    if (std::abs(u) <= tol) {
      if (z[i] < -tol || z[i] > z_cap + tol) cert.sign_ok = false;
    } else if (std::abs(z[i]) > tol || (u > tol && u < t - tol)) {
      cert.sign_ok = false;
    }
  }
  cert.prox_ok = cert.prox_violations == 0;

  const AlphaBounds bounds = alpha_bounds(F, z, lambda, tol);
  cert.alpha1 = bounds.alpha1;
  cert.alpha2 = bounds.alpha2;
  cert.alpha_star = bounds.alpha_star;
  cert.passed = std::isfinite(cert.grad_residual) && cert.grad_residual <= tol && cert.prox_ok;
  return cert;
}

MultiplierRecovery recover_multiplier(const VectorRef& theta, const std::vector<Index>& working,
                                      const DesignCache& cache) {
  require_working(working, cache.n);
  MultiplierRecovery out;
  out.z = Vector::Zero(cache.n);
  if (working.empty()) return out;

  const Vector grad = smooth_gradient(theta, cache);
  const Matrix At = working_rows(working, cache).transpose();
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(At);
  const auto dim = static_cast<double>(std::max(At.rows(), At.cols()));
  cod.setThreshold(dim * std::numeric_limits<double>::epsilon());
  const Vector zt = cod.solve(-grad);
  out.rank = cod.rank();
  out.rank_deficient = out.rank < static_cast<Index>(working.size());
  for (std::size_t k = 0; k < working.size(); ++k) out.z[working[k]] = zt[static_cast<Index>(k)];
  return out;
}

RankCheck assumption_rank_check(const std::vector<Index>& working, const DesignCache& cache) {
  require_working(working, cache.n);
  RankCheck out;
  if (working.empty()) return out;
  const Matrix rows = working_rows(working, cache);
  const Vector sv = singular_values(rows);
  const double tol = static_cast<double>(std::max(rows.rows(), rows.cols())) *
                     std::numeric_limits<double>::epsilon() * sv[0];
  out.rank = static_cast<Index>((sv.array() > tol).count());
  out.independent = out.rank == rows.rows();
  return out;
}

Matrix augmented_matrix(const std::vector<Index>& working, const DesignCache& cache, double gamma) {
  require_working(working, cache.n);
  const auto k = static_cast<Index>(working.size());
  Matrix H = Matrix::Zero(cache.d + k, cache.d + k);
  H.topLeftCorner(cache.d, cache.d) = cache.G;
  if (k > 0) {
    const Matrix rows = working_rows(working, cache);
    H.block(cache.d, 0, k, cache.d) = rows;
    H.block(0, cache.d, cache.d, k) = rows.transpose();
    H.bottomRightCorner(k, k).diagonal().setConstant(-gamma);
  }
  return H;
}

namespace {

SecondOrderCheck factor_once(const std::vector<Index>& working, const DesignCache& cache, double gamma) {
  const Vector sv = singular_values(augmented_matrix(working, cache, gamma));
  SecondOrderCheck out;
  out.sigma_max = sv[0];
  out.sigma_min = sv[sv.size() - 1];
  out.nonsingular =
      out.sigma_min > static_cast<double>(cache.d) * std::numeric_limits<double>::epsilon() * out.sigma_max;
  return out;
}

}  // namespace

SecondOrderCheck second_order_check(const std::vector<Index>& working, const DesignCache& cache, double gamma,
                                    bool sweep_subsets) {
  if (!(gamma >= 0.0)) throw InputError("gamma must be nonnegative");
  SecondOrderCheck out = factor_once(working, cache, gamma);
  out.subsets_checked = 1;
  out.worst_sigma_min = out.sigma_min;
  if (!sweep_subsets) return out;

  const auto k = static_cast<Index>(working.size());
  if (k > kMaxSweepSize) {
    throw InputError("subset sweep limited to " + std::to_string(kMaxSweepSize) + " working indices");
  }
  const std::uint32_t full = (1u << k) - 1u;
  for (std::uint32_t mask = 0; mask < full; ++mask) {
    std::vector<Index> subset;
    for (Index j = 0; j < k; ++j) {
      if (mask & (1u << j)) subset.push_back(working[static_cast<std::size_t>(j)]);
    }
    const SecondOrderCheck sub = factor_once(subset, cache, gamma);
    ++out.subsets_checked;
    out.worst_sigma_min = std::min(out.worst_sigma_min, sub.sigma_min);
    out.nonsingular = out.nonsingular && sub.nonsingular;
  }
  return out;
}

}  // namespace qssvm
