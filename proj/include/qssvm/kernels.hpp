#pragma once

// Data-parallel inner loops over samples. `parallel` is what the library
// calls; `serial` is the straightforward reference the tests and the
// kernel benchmark compare it against.
//
// Reductions in `parallel` are taken over fixed-size sample chunks and
// combined in chunk order, so results do not depend on the thread count.

#include "qssvm/model.hpp"

#include <span>

namespace qssvm::kernels {

/// Sample chunk used by the ordered reductions.
inline constexpr Index kChunk = 64;

/// Samples below which the parallel kernels run on the calling thread.
inline constexpr Index kParallelThreshold = 2048;

int max_threads();

namespace serial {

void design_rows(const Dataset& data, RowMatrix& a, RowMatrix& M);
Matrix hessian(const RowMatrix& M, Index n, Index m);
void margins(const RowMatrix& a, const VectorRef& theta, Vector& out);
double smooth_value(const RowMatrix& M, Index m, const VectorRef& theta);
Index positive_count(std::span<const double> u);
void prox(std::span<const double> z, std::span<double> out, double threshold, bool tie_to_zero);

}  // namespace serial

namespace parallel {

void design_rows(const Dataset& data, RowMatrix& a, RowMatrix& M);
Matrix hessian(const RowMatrix& M, Index n, Index m);
void margins(const RowMatrix& a, const VectorRef& theta, Vector& out);
double smooth_value(const RowMatrix& M, Index m, const VectorRef& theta);
Index positive_count(std::span<const double> u);
void prox(std::span<const double> z, std::span<double> out, double threshold, bool tie_to_zero);

}  // namespace parallel

}  // namespace qssvm::kernels
