#pragma once

// Data ingestion and the repeated random-split benchmark.

#include "qssvm/baselines.hpp"
#include "qssvm/model.hpp"
#include "qssvm/newton.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace qssvm {

struct CsvOptions {
  // Raw label values to keep; the smaller maps to -1. Compared numerically
  // when both parse as numbers, otherwise as strings.
  std::optional<std::pair<std::string, std::string>> class_pair;
};

/// Numeric features, label in the last column. A first row with any
/// non-numeric feature field is taken as a header. Labels {0, 1} map to
/// {-1, +1}; {-1, +1} pass through. Errors name the 1-based file row.
Dataset load_csv(const std::string& path, const CsvOptions& options = {});
Dataset parse_csv(std::istream& in, const CsvOptions& options = {});

void write_csv(std::ostream& out, const Dataset& data, bool header = true);

enum class Normalize { none, zscore, minmax };

std::string to_string(Normalize n);
Normalize parse_normalize(const std::string& name);

/// Per-feature affine map fitted on one dataset and applied to others.
struct Scaler {
  Vector shift;
  Vector scale;

  static Scaler fit(const Dataset& data, Normalize kind);
  Dataset apply(const Dataset& data) const;
};

/// Stratified split. Each label keeps round(rate * count) rows for training,
/// clamped so both sides get at least one row of every label.
std::pair<Dataset, Dataset> split(const Dataset& data, double train_rate, std::uint64_t seed);

/// Seed of trial t, a splitmix64 step over (seed, t).
std::uint64_t trial_seed(std::uint64_t seed, int trial);

struct BenchProtocol {
  double train_rate = 0.8;
  int trials = 50;
  std::uint64_t seed = 0;
  Normalize normalize = Normalize::zscore;
  std::vector<Method> methods = {Method::newton_l01, Method::ls_qssvm};

  void validate() const;
};

struct BenchResult {
  std::vector<MethodStats> rows;
  double wall_time = 0.0;
};

/// Trials run in parallel when OpenMP is enabled; every trial draws its
/// split from trial_seed(seed, t) and the statistics do not depend on the
/// execution order.
BenchResult run_bench(const Dataset& data, const BenchProtocol& protocol, const SolverConfig& solver);

/// CSV rows method,trials,failures,not_converged,min,max,mean,var,std,mean_time_s.
void write_stats_csv(std::ostream& out, const std::vector<MethodStats>& rows);

struct BoundingBox {
  double xmin = -2.0, xmax = 2.0, ymin = -2.0, ymax = 2.0;
};

struct GridNode {
  double x = 0.0;
  double y = 0.0;
  double h = 0.0;
  int sign = 1;
};

/// resolution x resolution cell centres of bbox, x varying fastest.
std::vector<GridNode> boundary_grid(const SurfaceParams& theta, const BoundingBox& bbox, int resolution);

void write_grid_csv(std::ostream& out, const std::vector<GridNode>& grid);

}  // namespace qssvm
