#include "qssvm/bench.hpp"

#include "qssvm/error.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <iomanip>
#include <map>
#include <numeric>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

namespace qssvm {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return {};
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::optional<double> to_number(const std::string& s) {
  if (s.empty()) return std::nullopt;
  const char* first = s.data();
  if (*first == '+') ++first;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

// Orders raw labels numerically when all of them are numbers.
struct LabelOrder {
  bool numeric = true;
  bool operator()(const std::string& a, const std::string& b) const {
    if (numeric) return *to_number(a) < *to_number(b);
    return a < b;
  }
};

bool same_label(const std::string& a, const std::string& b) {
  const auto x = to_number(a);
  const auto y = to_number(b);
  if (x && y) return *x == *y;
  return a == b;
}

struct RawRow {
  std::vector<double> features;
  std::string label;
  std::size_t line = 0;
};

}  // namespace

Dataset parse_csv(std::istream& in, const CsvOptions& options) {
  std::vector<RawRow> rows;
  std::string line;
  std::size_t line_no = 0;
  std::size_t width = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() < 2) throw InputError("row " + std::to_string(line_no) + ": need at least one feature and a label");

    RawRow row;
    row.line = line_no;
    bool numeric = true;
    for (std::size_t k = 0; k + 1 < fields.size(); ++k) {
      const auto v = to_number(fields[k]);
      if (!v) {
        numeric = false;
        break;
      }
      row.features.push_back(*v);
    }
    if (first) {
      first = false;
      width = fields.size();
      if (!numeric) continue;  // header
    }
    if (fields.size() != width) {
      throw InputError("row " + std::to_string(line_no) + ": expected " + std::to_string(width) + " fields, got " +
                       std::to_string(fields.size()));
    }
    if (!numeric) throw InputError("row " + std::to_string(line_no) + ": non-numeric feature");
    for (double v : row.features) {
      if (!std::isfinite(v)) throw InputError("row " + std::to_string(line_no) + ": non-finite feature");
    }
    row.label = fields.back();
    if (row.label.empty()) throw InputError("row " + std::to_string(line_no) + ": empty label");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw InputError("no data rows");

  if (options.class_pair) {
    const auto& [p, q] = *options.class_pair;
    std::erase_if(rows, [&](const RawRow& r) { return !same_label(r.label, p) && !same_label(r.label, q); });
  }

  LabelOrder order;
  for (const RawRow& r : rows) order.numeric = order.numeric && to_number(r.label).has_value();
  std::vector<std::string> distinct;
  for (const RawRow& r : rows) {
    if (std::none_of(distinct.begin(), distinct.end(), [&](const std::string& d) { return same_label(d, r.label); })) {
      distinct.push_back(r.label);
    }
  }
  if (distinct.size() < 2) {
    throw InputError("need two distinct labels, found " + std::to_string(distinct.size()) +
                     (rows.empty() ? "" : " (first data row " + std::to_string(rows.front().line) + ")"));
  }
  if (distinct.size() > 2) {
    throw InputError("found " + std::to_string(distinct.size()) + " labels; choose two with a class pair (row " +
                     std::to_string(rows.front().line) + ")");
  }
  std::sort(distinct.begin(), distinct.end(), order);

  Dataset data;
  data.points.resize(static_cast<Index>(rows.size()), static_cast<Index>(width - 1));
  data.labels.resize(static_cast<Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t k = 0; k < rows[i].features.size(); ++k) {
      data.points(static_cast<Index>(i), static_cast<Index>(k)) = rows[i].features[k];
    }
    data.labels[static_cast<Index>(i)] = same_label(rows[i].label, distinct[0]) ? -1.0 : 1.0;
  }
  return data;
}

Dataset load_csv(const std::string& path, const CsvOptions& options) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  return parse_csv(in, options);
}

void write_csv(std::ostream& out, const Dataset& data, bool header) {
  const auto old_precision = out.precision(17);
  if (header) {
    for (Index k = 0; k < data.dim(); ++k) out << "x" << k + 1 << ",";
    out << "label\n";
  }
  for (Index i = 0; i < data.size(); ++i) {
    for (Index k = 0; k < data.dim(); ++k) out << data.points(i, k) << ",";
    out << static_cast<int>(data.labels[i]) << "\n";
  }
  out.precision(old_precision);
}

std::string to_string(Normalize n) {
  switch (n) {
    case Normalize::none: return "none";
    case Normalize::zscore: return "zscore";
    case Normalize::minmax: return "minmax";
  }
  return "unknown";
}

Normalize parse_normalize(const std::string& name) {
  if (name == "none") return Normalize::none;
  if (name == "zscore") return Normalize::zscore;
  if (name == "minmax") return Normalize::minmax;
  throw InputError("unknown normalization '" + name + "'");
}

Scaler Scaler::fit(const Dataset& data, Normalize kind) {
  const Index m = data.dim();
  Scaler s{Vector::Zero(m), Vector::Ones(m)};
  if (kind == Normalize::none || data.size() == 0) return s;
  for (Index k = 0; k < m; ++k) {
    const auto col = data.points.col(k);
    double spread = 0.0;
    if (kind == Normalize::zscore) {
      s.shift[k] = col.mean();
      spread = std::sqrt((col.array() - s.shift[k]).square().mean());
    } else {
      s.shift[k] = col.minCoeff();
      spread = col.maxCoeff() - s.shift[k];
    }
    s.scale[k] = spread > 0.0 ? spread : 1.0;
  }
  return s;
}

Dataset Scaler::apply(const Dataset& data) const {
  Dataset out = data;
  for (Index i = 0; i < out.size(); ++i) {
    out.points.row(i) = (out.points.row(i) - shift.transpose()).cwiseQuotient(scale.transpose());
  }
  return out;
}

std::pair<Dataset, Dataset> split(const Dataset& data, double train_rate, std::uint64_t seed) {
  if (!(train_rate > 0.0 && train_rate < 1.0)) throw InputError("train rate must lie in (0, 1)");
  std::mt19937_64 rng(seed);
  std::vector<Index> train_rows;
  std::vector<Index> test_rows;
  for (double label : {-1.0, 1.0}) {
    std::vector<Index> rows;
    for (Index i = 0; i < data.size(); ++i) {
      if (data.labels[i] == label) rows.push_back(i);
    }
    const auto count = static_cast<Index>(rows.size());
    if (count < 2) {
      throw InputError("label " + std::to_string(static_cast<int>(label)) + " has " + std::to_string(count) +
                       " samples; splitting needs at least 2");
    }
    std::shuffle(rows.begin(), rows.end(), rng);
    Index k = static_cast<Index>(std::llround(train_rate * static_cast<double>(count)));
    k = std::clamp<Index>(k, 1, count - 1);
    train_rows.insert(train_rows.end(), rows.begin(), rows.begin() + k);
    test_rows.insert(test_rows.end(), rows.begin() + k, rows.end());
  }
  std::sort(train_rows.begin(), train_rows.end());
  std::sort(test_rows.begin(), test_rows.end());
  return {data.subset(train_rows), data.subset(test_rows)};
}

std::uint64_t trial_seed(std::uint64_t seed, int trial) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(trial) + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

void BenchProtocol::validate() const {
  if (!(train_rate > 0.0 && train_rate < 1.0)) throw InputError("train rate must lie in (0, 1)");
  if (trials < 1) throw InputError("trials must be at least 1");
  if (methods.empty()) throw InputError("no methods selected");
}

BenchResult run_bench(const Dataset& data, const BenchProtocol& protocol, const SolverConfig& solver) {
  protocol.validate();
  solver.validate();
  data.validate();
  const auto start = std::chrono::steady_clock::now();

  const std::size_t n_methods = protocol.methods.size();
  std::vector<std::vector<TrialResult>> results(n_methods, std::vector<TrialResult>(protocol.trials));
  std::exception_ptr error;

#pragma omp parallel for schedule(dynamic)
  for (int t = 0; t < protocol.trials; ++t) {
    try {
      auto [train, test] = split(data, protocol.train_rate, trial_seed(protocol.seed, t));
      const Scaler scaler = Scaler::fit(train, protocol.normalize);
      train = scaler.apply(train);
      test = scaler.apply(test);
      for (std::size_t k = 0; k < n_methods; ++k) {
        results[k][static_cast<std::size_t>(t)] = run_method(protocol.methods[k], train, test, solver);
      }
    } catch (...) {
#pragma omp critical(qssvm_bench_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);

  BenchResult out;
  for (std::size_t k = 0; k < n_methods; ++k) out.rows.push_back(summarize(protocol.methods[k], results[k]));
  out.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

void write_stats_csv(std::ostream& out, const std::vector<MethodStats>& rows) {
  const auto old_precision = out.precision(10);
  out << "method,trials,failures,not_converged,min,max,mean,var,std,mean_time_s\n";
  for (const MethodStats& s : rows) {
    out << to_string(s.method) << "," << s.trials << "," << s.failures << "," << s.not_converged << "," << s.min
        << "," << s.max << "," << s.mean << "," << s.variance << "," << s.std_frac << "," << s.mean_time << "\n";
  }
  out.precision(old_precision);
}

std::vector<GridNode> boundary_grid(const SurfaceParams& theta, const BoundingBox& bbox, int resolution) {
  if (theta.dim() != 2) throw InputError("boundary grid needs a 2-d surface, got m=" + std::to_string(theta.dim()));
  if (resolution < 1) throw InputError("grid resolution must be at least 1");
  if (!(bbox.xmax > bbox.xmin) || !(bbox.ymax > bbox.ymin)) throw InputError("empty bounding box");
  std::vector<GridNode> grid;
  grid.reserve(static_cast<std::size_t>(resolution) * static_cast<std::size_t>(resolution));
  const double dx = (bbox.xmax - bbox.xmin) / resolution;
  const double dy = (bbox.ymax - bbox.ymin) / resolution;
  Vector pt(2);
  for (int j = 0; j < resolution; ++j) {
    for (int i = 0; i < resolution; ++i) {
      GridNode node;
      node.x = bbox.xmin + (i + 0.5) * dx;
      node.y = bbox.ymin + (j + 0.5) * dy;
      pt << node.x, node.y;
      node.h = decision_value(theta, pt);
      node.sign = node.h >= 0.0 ? 1 : -1;
      grid.push_back(node);
    }
  }
  return grid;
}

void write_grid_csv(std::ostream& out, const std::vector<GridNode>& grid) {
  const auto old_precision = out.precision(17);
  out << "x,y,h,sign\n";
  for (const GridNode& g : grid) out << g.x << "," << g.y << "," << g.h << "," << g.sign << "\n";
  out.precision(old_precision);
}

}  // namespace qssvm
