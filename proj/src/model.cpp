#include "qssvm/model.hpp"

#include "qssvm/error.hpp"
#include "qssvm/kernels.hpp"

#include <cmath>
#include <string>

namespace qssvm {

namespace {

void require_theta(const VectorRef& theta, Index d) {
  if (theta.size() != d) {
    throw InputError("theta has length " + std::to_string(theta.size()) + ", expected " + std::to_string(d));
  }
}

}  // namespace

void Dataset::validate() const {
  if (size() < 1 || dim() < 1) throw InputError("dataset is empty");
  if (labels.size() != size()) throw InputError("label count does not match point count");
  for (Index i = 0; i < size(); ++i) {
    if (!points.row(i).allFinite()) throw InputError("non-finite feature in row " + std::to_string(i + 1));
    if (labels[i] != 1.0 && labels[i] != -1.0) {
      throw InputError("label in row " + std::to_string(i + 1) + " is not -1 or +1");
    }
  }
}

Dataset Dataset::subset(const std::vector<Index>& rows) const {
  Dataset out;
  out.points.resize(static_cast<Index>(rows.size()), dim());
  out.labels.resize(static_cast<Index>(rows.size()));
  for (std::size_t k = 0; k < rows.size(); ++k) {
    out.points.row(static_cast<Index>(k)) = points.row(rows[k]);
    out.labels[static_cast<Index>(k)] = labels[rows[k]];
  }
  return out;
}

SurfaceParams SurfaceParams::zeros(Index m) {
  return SurfaceParams{Vector::Zero(tri_size(m)), Vector::Zero(m), 0.0};
}

SurfaceParams SurfaceParams::from_vector(const VectorRef& theta, Index m) {
  require_theta(theta, param_dim(m));
  const Index p = tri_size(m);
  return SurfaceParams{theta.head(p), theta.segment(p, m), theta[p + m]};
}

Vector SurfaceParams::to_vector() const {
  const Index m = dim();
  const Index p = tri_size(m);
  Vector theta(param_dim(m));
  theta.head(p) = wtri;
  theta.segment(p, m) = b;
  theta[p + m] = c;
  return theta;
}

Matrix SurfaceParams::W() const {
  const Index m = dim();
  Matrix out = Matrix::Zero(m, m);
  for (Index j = 0; j < m; ++j) out(j, j) = wtri[j];
  Index slot = m;
  for (Index j = 0; j < m; ++j) {
    for (Index k = j + 1; k < m; ++k, ++slot) {
      out(j, k) = wtri[slot];
      out(k, j) = wtri[slot];
    }
  }
  return out;
}

Vector quadratic_features(const VectorRef& x) {
  const Index m = x.size();
  Vector s(tri_size(m));
  for (Index j = 0; j < m; ++j) s[j] = 0.5 * x[j] * x[j];
  Index slot = m;
  for (Index j = 0; j < m; ++j) {
    for (Index k = j + 1; k < m; ++k, ++slot) s[slot] = x[j] * x[k];
  }
  return s;
}

DesignCache build_design(const Dataset& data) {
  data.validate();
  DesignCache cache;
  cache.n = data.size();
  cache.m = data.dim();
  cache.p = tri_size(cache.m);
  cache.d = param_dim(cache.m);
  kernels::parallel::design_rows(data, cache.a, cache.M);
  cache.G = kernels::parallel::hessian(cache.M, cache.n, cache.m);
  cache.labels = data.labels;
  return cache;
}

Vector margins(const VectorRef& theta, const DesignCache& cache) {
  require_theta(theta, cache.d);
  Vector out;
  kernels::parallel::margins(cache.a, theta, out);
  return out;
}

double smooth_value(const VectorRef& theta, const DesignCache& cache) {
  require_theta(theta, cache.d);
  return kernels::parallel::smooth_value(cache.M, cache.m, theta);
}

Vector smooth_gradient(const VectorRef& theta, const DesignCache& cache) {
  require_theta(theta, cache.d);
  return cache.G * theta;
}

LossValue total_loss(const VectorRef& theta, const DesignCache& cache, double lambda) {
  if (!(lambda > 0.0)) throw InputError("lambda must be positive");
  LossValue out;
  out.smooth = smooth_value(theta, cache);
  const Vector F = margins(theta, cache);
  out.count = kernels::parallel::positive_count(std::span<const double>(F.data(), static_cast<std::size_t>(F.size())));
  out.total = out.smooth + lambda * static_cast<double>(out.count);
  return out;
}

double decision_value(const SurfaceParams& params, const VectorRef& x) {
  if (x.size() != params.dim()) {
    throw InputError("point has dimension " + std::to_string(x.size()) + ", expected " + std::to_string(params.dim()));
  }
  return quadratic_features(x).dot(params.wtri) + params.b.dot(x) + params.c;
}

int predict(const SurfaceParams& params, const VectorRef& x) { return decision_value(params, x) >= 0.0 ? 1 : -1; }

std::vector<int> predict_all(const SurfaceParams& params, const Dataset& data) {
  std::vector<int> out(static_cast<std::size_t>(data.size()));
  for (Index i = 0; i < data.size(); ++i) {
    out[static_cast<std::size_t>(i)] = predict(params, data.points.row(i).transpose());
  }
  return out;
}

double accuracy(const SurfaceParams& params, const Dataset& data) {
  if (data.size() == 0) throw InputError("accuracy of an empty dataset");
  const auto labels = predict_all(params, data);
  Index correct = 0;
  for (Index i = 0; i < data.size(); ++i) correct += labels[static_cast<std::size_t>(i)] == data.labels[i] ? 1 : 0;
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

}  // namespace qssvm
