#include "qssvm/kernels.hpp"

#include "qssvm/prox01.hpp"

#include <vector>

#ifdef QSSVM_HAVE_OPENMP
#include <omp.h>
#endif

namespace qssvm::kernels {

int max_threads() {
#ifdef QSSVM_HAVE_OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

namespace {

// Writes row i of `a` and block i of `M`.
void fill_sample(const Dataset& data, Index i, RowMatrix& a, RowMatrix& M) {
  const Index m = data.dim();
  const Index p = tri_size(m);
  const double y = data.labels[i];
  auto x = data.points.row(i);

  for (Index j = 0; j < m; ++j) {
    a(i, j) = -y * 0.5 * x[j] * x[j];
    a(i, p + j) = -y * x[j];
  }
  Index slot = m;
  for (Index j = 0; j < m; ++j) {
    for (Index k = j + 1; k < m; ++k, ++slot) {
      a(i, slot) = -y * x[j] * x[k];
    }
  }
  a(i, p + m) = -y;

  auto block = M.middleRows(i * m, m);
  block.setZero();
  for (Index j = 0; j < m; ++j) block(j, j) = x[j];
  slot = m;
  for (Index j = 0; j < m; ++j) {
    for (Index k = j + 1; k < m; ++k, ++slot) {
      block(j, slot) = x[k];
      block(k, slot) = x[j];
    }
  }
}

void assemble_hessian(Matrix& G, const Matrix& ww, const Matrix& wb, Index n, Index m) {
  const Index p = tri_size(m);
  G.setZero();
  G.topLeftCorner(p, p) = ww;
  G.block(0, p, p, m) = wb;
  G.block(p, 0, m, p) = wb.transpose();
  G.block(p, p, m, m).diagonal().setConstant(static_cast<double>(n));
}

Index chunk_count(Index n) { return (n + kChunk - 1) / kChunk; }

}  // namespace

namespace serial {

void design_rows(const Dataset& data, RowMatrix& a, RowMatrix& M) {
  const Index n = data.size();
  const Index m = data.dim();
  a.resize(n, param_dim(m));
  M.resize(n * m, tri_size(m));
  for (Index i = 0; i < n; ++i) fill_sample(data, i, a, M);
}

Matrix hessian(const RowMatrix& M, Index n, Index m) {
  const Index p = tri_size(m);
  Matrix ww = Matrix::Zero(p, p);
  Matrix wb = Matrix::Zero(p, m);
  for (Index i = 0; i < n; ++i) {
    auto block = M.middleRows(i * m, m);
    ww.noalias() += block.transpose() * block;
    wb += block.transpose();
  }
  Matrix G(param_dim(m), param_dim(m));
  assemble_hessian(G, ww, wb, n, m);
  return G;
}

void margins(const RowMatrix& a, const VectorRef& theta, Vector& out) {
  out.resize(a.rows());
  for (Index i = 0; i < a.rows(); ++i) out[i] = 1.0 + a.row(i).dot(theta);
}

double smooth_value(const RowMatrix& M, Index m, const VectorRef& theta) {
  const Index p = tri_size(m);
  const Index n = M.rows() / m;
  auto w = theta.head(p);
  auto b = theta.segment(p, m);
  double total = 0.0;
  for (Index i = 0; i < n; ++i) {
    total += 0.5 * (M.middleRows(i * m, m) * w + b).squaredNorm();
  }
  return total;
}

Index positive_count(std::span<const double> u) {
  Index count = 0;
  for (double v : u) count += v > 0.0 ? 1 : 0;
  return count;
}

void prox(std::span<const double> z, std::span<double> out, double threshold, bool tie_to_zero) {
  for (std::size_t i = 0; i < z.size(); ++i) out[i] = detail::prox_value(z[i], threshold, tie_to_zero);
}

}  // namespace serial

namespace parallel {

void design_rows(const Dataset& data, RowMatrix& a, RowMatrix& M) {
  const Index n = data.size();
  const Index m = data.dim();
  a.resize(n, param_dim(m));
  M.resize(n * m, tri_size(m));
#pragma omp parallel for schedule(static) if (n >= kParallelThreshold)
  for (Index i = 0; i < n; ++i) fill_sample(data, i, a, M);
}

Matrix hessian(const RowMatrix& M, Index n, Index m) {
  const Index p = tri_size(m);
  const Index chunks = chunk_count(n);
  std::vector<Matrix> ww(chunks, Matrix::Zero(p, p));
  std::vector<Matrix> wb(chunks, Matrix::Zero(p, m));

#pragma omp parallel for schedule(static) if (n >= kParallelThreshold)
  for (Index c = 0; c < chunks; ++c) {
    const Index end = std::min(n, (c + 1) * kChunk);
    for (Index i = c * kChunk; i < end; ++i) {
      auto block = M.middleRows(i * m, m);
      ww[c].noalias() += block.transpose() * block;
      wb[c] += block.transpose();
    }
  }
  for (Index c = 1; c < chunks; ++c) {
    ww[0] += ww[c];
    wb[0] += wb[c];
  }
  Matrix G(param_dim(m), param_dim(m));
  if (chunks == 0) {
    assemble_hessian(G, Matrix::Zero(p, p), Matrix::Zero(p, m), n, m);
  } else {
    assemble_hessian(G, ww[0], wb[0], n, m);
  }
  return G;
}

void margins(const RowMatrix& a, const VectorRef& theta, Vector& out) {
  const Index n = a.rows();
  out.resize(n);
#pragma omp parallel for schedule(static) if (n >= kParallelThreshold)
  for (Index i = 0; i < n; ++i) out[i] = 1.0 + a.row(i).dot(theta);
}

double smooth_value(const RowMatrix& M, Index m, const VectorRef& theta) {
  const Index p = tri_size(m);
  const Index n = M.rows() / m;
  const Index chunks = chunk_count(n);
  std::vector<double> partial(chunks, 0.0);
  auto w = theta.head(p);
  auto b = theta.segment(p, m);

#pragma omp parallel for schedule(static) if (n >= kParallelThreshold)
  for (Index c = 0; c < chunks; ++c) {
    const Index end = std::min(n, (c + 1) * kChunk);
    double sum = 0.0;
    for (Index i = c * kChunk; i < end; ++i) {
      sum += 0.5 * (M.middleRows(i * m, m) * w + b).squaredNorm();
    }
    partial[c] = sum;
  }
  double total = 0.0;
  for (double v : partial) total += v;
  return total;
}

Index positive_count(std::span<const double> u) {
  const auto n = static_cast<Index>(u.size());
  Index count = 0;
#pragma omp parallel for schedule(static) reduction(+ : count) if (n >= kParallelThreshold)
  for (Index i = 0; i < n; ++i) count += u[i] > 0.0 ? 1 : 0;
  return count;
}

void prox(std::span<const double> z, std::span<double> out, double threshold, bool tie_to_zero) {
  const auto n = static_cast<Index>(z.size());
#pragma omp parallel for schedule(static) if (n >= kParallelThreshold)
  for (Index i = 0; i < n; ++i) out[i] = detail::prox_value(z[i], threshold, tie_to_zero);
}

}  // namespace parallel

}  // namespace qssvm::kernels
