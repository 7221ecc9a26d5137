#pragma once

// Kernel-free quadratic surface classifier h(x) = 1/2 x'Wx + b'x + c with
// symmetric W, in the reduced coordinates theta = (wtri, b, c).
//
// wtri stores the upper triangle of W: the m diagonal entries w_jj first,
// then the off-diagonal w_jk (j < k) in row-major order. With that layout
//   1/2 x'Wx = sum_j 1/2 w_jj x_j^2 + sum_{j<k} w_jk x_j x_k = s(x)'wtri.

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace qssvm {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using VectorRef = Eigen::Ref<const Vector>;

inline constexpr Index tri_size(Index m) { return m * (m + 1) / 2; }
inline constexpr Index param_dim(Index m) { return tri_size(m) + m + 1; }

/// n labelled points in R^m, labels in {-1, +1}.
struct Dataset {
  RowMatrix points;
  Vector labels;

  Index size() const { return points.rows(); }
  Index dim() const { return points.cols(); }

  /// Throws InputError on empty data, non-finite entries or labels outside {-1, +1}.
  void validate() const;
  Dataset subset(const std::vector<Index>& rows) const;
};

struct SurfaceParams {
  Vector wtri;
  Vector b;
  double c = 0.0;

  static SurfaceParams zeros(Index m);
  static SurfaceParams from_vector(const VectorRef& theta, Index m);

  Index dim() const { return b.size(); }
  Vector to_vector() const;
  /// Dense symmetric W.
  Matrix W() const;
};

/// Quadratic feature map s(x): 1/2 x_j^2 in the diagonal slots, x_j x_k off it.
Vector quadratic_features(const VectorRef& x);

/// Everything about a dataset the solver needs, computed once.
///
/// Row i of `a` is the gradient of F_i(theta) = 1 - y_i h(x^i), i.e.
/// a_i = -y_i (s(x^i), x^i, 1). Rows [i*m, (i+1)*m) of `M` hold the map
/// wtri -> W x^i. `G` is the constant Hessian of f = sum_i 1/2 |W x^i + b|^2;
/// its c row and column are zero.
struct DesignCache {
  Index n = 0;
  Index m = 0;
  Index p = 0;  // m(m+1)/2
  Index d = 0;  // p + m + 1
  RowMatrix a;
  RowMatrix M;
  Matrix G;
  Vector labels;

  auto sample_map(Index i) const { return M.middleRows(i * m, m); }
  Index c_index() const { return d - 1; }
};

DesignCache build_design(const Dataset& data);

/// F(theta) with F_i = 1 + a_i . theta.
Vector margins(const VectorRef& theta, const DesignCache& cache);

/// f(theta) = sum_i 1/2 |M_i wtri + b|^2, evaluated sample by sample.
double smooth_value(const VectorRef& theta, const DesignCache& cache);

/// G theta.
Vector smooth_gradient(const VectorRef& theta, const DesignCache& cache);

struct LossValue {
  double smooth = 0.0;
  Index count = 0;
  double total = 0.0;
};

/// f(theta) + lambda * #{i : F_i(theta) > 0}.
LossValue total_loss(const VectorRef& theta, const DesignCache& cache, double lambda);

double decision_value(const SurfaceParams& params, const VectorRef& x);

/// +1 when h(x) >= 0, -1 otherwise.
int predict(const SurfaceParams& params, const VectorRef& x);

std::vector<int> predict_all(const SurfaceParams& params, const Dataset& data);

double accuracy(const SurfaceParams& params, const Dataset& data);

}  // namespace qssvm
