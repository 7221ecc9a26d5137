// qssvm: generate data, fit, certify, benchmark and grid quadratic-surface
// classifiers trained under the 0-1 loss.
//
// Exit codes: 0 success, 2 bad input, 3 the solver (or a certificate) failed.

#include "qssvm/bench.hpp"
#include "qssvm/datagen.hpp"
#include "qssvm/error.hpp"
#include "qssvm/newton.hpp"
#include "qssvm/report.hpp"
#include "qssvm/stationarity.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using namespace qssvm;

namespace {

constexpr int kExitInput = 2;
constexpr int kExitSolver = 3;

struct SolverFlags {
  SolverConfig cfg;
  std::string warm = "hinge";
};

void add_solver_flags(CLI::App* app, SolverFlags& f) {
  app->add_option("--lambda", f.cfg.lambda, "0-1 loss weight")->capture_default_str();
  app->add_option("--alpha", f.cfg.alpha, "prox step")->capture_default_str();
  app->add_option("--tau", f.cfg.tau, "damping decay in (0,1)")->capture_default_str();
  app->add_option("--rho", f.cfg.rho, "damping residual factor")->capture_default_str();
  app->add_option("--gamma0", f.cfg.gamma_init, "initial damping")->capture_default_str();
  app->add_option("--eps", f.cfg.eps, "residual tolerance")->capture_default_str();
  app->add_option("--max-iter", f.cfg.max_iter, "Newton iteration cap")->capture_default_str();
  app->add_option("--warm-start", f.warm, "zeros | least_squares | hinge")->capture_default_str();
}

SolverConfig finish(const SolverFlags& f) {
  SolverConfig cfg = f.cfg;
  cfg.warm_start = parse_warm_start(f.warm);
  cfg.validate();
  return cfg;
}

CsvOptions csv_options(const std::vector<std::string>& pair) {
  CsvOptions o;
  if (!pair.empty()) {
    if (pair.size() != 2) throw InputError("--class-pair takes exactly two labels");
    o.class_pair = std::make_pair(pair[0], pair[1]);
  }
  return o;
}

// Writes to `path`, or stdout when it is empty or "-".
template <class Fn>
void emit(const std::string& path, Fn&& fn) {
  if (path.empty() || path == "-") {
    fn(std::cout);
    return;
  }
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path + "'");
  fn(out);
}

Json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw InputError("'" + path + "' is not valid JSON: " + e.what());
  }
}

Json scaler_json(const Scaler& s) {
  Json shift = Json::array(), scale = Json::array();
  for (Index j = 0; j < s.shift.size(); ++j) {
    shift.push_back(s.shift[j]);
    scale.push_back(s.scale[j]);
  }
  return Json{{"shift", shift}, {"scale", scale}};
}

std::optional<Scaler> scaler_from_json(const Json& model) {
  if (!model.contains("scaler")) return std::nullopt;
  const Json& j = model.at("scaler");
  Scaler s;
  const auto& shift = j.at("shift");
  const auto& scale = j.at("scale");
  if (shift.size() != scale.size()) throw InputError("scaler shift and scale differ in length");
  s.shift.resize(static_cast<Index>(shift.size()));
  s.scale.resize(static_cast<Index>(scale.size()));
  for (std::size_t k = 0; k < shift.size(); ++k) {
    s.shift[static_cast<Index>(k)] = shift[k].get<double>();
    s.scale[static_cast<Index>(k)] = scale[k].get<double>();
  }
  return s;
}

int run_gen(const std::string& kind, Index n, std::uint64_t seed, double noise, const std::string& out) {
  GenSpec spec{parse_gen_kind(kind), n, seed, noise};
  spec.validate();
  const Dataset data = generate(spec);
  emit(out, [&](std::ostream& os) { write_csv(os, data); });
  return 0;
}

int run_fit(const std::string& path, const std::vector<std::string>& pair, const std::string& normalize,
            const SolverFlags& flags, const std::string& out) {
  const SolverConfig cfg = finish(flags);
  Dataset data = load_csv(path, csv_options(pair));
  const Normalize norm = parse_normalize(normalize);
  const Scaler scaler = Scaler::fit(data, norm);
  if (norm != Normalize::none) data = scaler.apply(data);

  const SolveReport report = solve(data, cfg);
  Json j = to_json(report, cfg);
  j["train_accuracy"] = accuracy(report.final.theta, data);
  j["normalize"] = to_string(norm);
  if (norm != Normalize::none) j["scaler"] = scaler_json(scaler);
  const RateProbe probe = rate_probe(report.residuals, report.gammas, cfg.rho);
  j["rate_probe"] = {{"quadratic", probe.quadratic},
                     {"inconclusive", probe.inconclusive},
                     {"fitted_c", std::isfinite(probe.fitted_c) ? Json(probe.fitted_c) : Json(nullptr)},
                     {"fit_residual", std::isfinite(probe.fit_residual) ? Json(probe.fit_residual) : Json(nullptr)},
                     {"tail_length", probe.tail_length}};
  emit(out, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
  std::cerr << "status " << to_string(report.status) << ", " << report.iters() << " iterations, residual "
            << report.residuals.back() << '\n';
  return report.status == SolveStatus::converged ? 0 : kExitSolver;
}

int run_check(const std::string& model_path, const std::string& path, const std::vector<std::string>& pair,
              double tol, const std::string& out) {
  const Json model = read_json(model_path);
  const SurfaceParams theta = surface_from_json(model);
  Dataset data = load_csv(path, csv_options(pair));
  if (data.dim() != theta.dim())
    throw InputError("model has m=" + std::to_string(theta.dim()) + " but data has " + std::to_string(data.dim()) +
                     " features");
  if (auto s = scaler_from_json(model)) data = s->apply(data);

  SolverConfig cfg;
  if (model.contains("config")) {
    cfg.alpha = model.at("config").value("alpha", cfg.alpha);
    cfg.lambda = model.at("config").value("lambda", cfg.lambda);
  }
  const DesignCache cache = build_design(data);
  const Vector th = theta.to_vector();

  Vector z;
  bool recovered = false;
  if (model.contains("z") && model.at("z").is_array() && static_cast<Index>(model.at("z").size()) == cache.n) {
    z.resize(cache.n);
    for (Index i = 0; i < cache.n; ++i) z[i] = model.at("z")[static_cast<std::size_t>(i)].get<double>();
  } else {
    const Vector F = margins(th, cache);
    const IndexSets sets = index_sets(F, Vector::Zero(cache.n), cfg.alpha, cfg.lambda);
    z = recover_multiplier(th, sets.working, cache).z;
    recovered = true;
  }

  const PStatCertificate cert = pstationary_check(th, z, cfg.alpha, cfg.lambda, cache, tol);
  const IndexSets sets = index_sets(margins(th, cache), z, cfg.alpha, cfg.lambda);
  const SecondOrderCheck so = second_order_check(sets.working, cache);
  Json j = to_json(cert);
  j["z_recovered"] = recovered;
  j["working_size"] = sets.working.size();
  j["second_order"] = {{"sigma_min", so.sigma_min}, {"sigma_max", so.sigma_max}, {"nonsingular", so.nonsingular}};
  emit(out, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
  return cert.passed ? 0 : kExitSolver;
}

int run_bench_cmd(const std::string& path, const std::vector<std::string>& pair, BenchProtocol protocol,
                  const std::string& normalize, const std::vector<std::string>& methods, const SolverFlags& flags,
                  const std::string& out, const std::string& csv) {
  const SolverConfig cfg = finish(flags);
  protocol.normalize = parse_normalize(normalize);
  protocol.methods.clear();
  for (const std::string& m : methods) protocol.methods.push_back(parse_method(m));
  protocol.validate();
  const Dataset data = load_csv(path, csv_options(pair));
  const BenchResult result = run_bench(data, protocol, cfg);
  emit(out, [&](std::ostream& os) { os << to_json(result, protocol, cfg).dump(2) << '\n'; });
  if (!csv.empty()) emit(csv, [&](std::ostream& os) { write_stats_csv(os, result.rows); });
  for (const MethodStats& s : result.rows)
    if (s.failures == s.trials) return kExitSolver;
  return 0;
}

int run_grid(const std::string& model_path, const std::vector<double>& box, int resolution, const std::string& out) {
  const SurfaceParams theta = surface_from_json(read_json(model_path));
  BoundingBox bbox;
  if (!box.empty()) {
    if (box.size() != 4) throw InputError("--bbox takes xmin,xmax,ymin,ymax");
    bbox = {box[0], box[1], box[2], box[3]};
  }
  const auto grid = boundary_grid(theta, bbox, resolution);
  emit(out, [&](std::ostream& os) { write_grid_csv(os, grid); });
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quadratic-surface SVM under the 0-1 loss"};
  app.require_subcommand(1);

  std::string out;

  auto* gen = app.add_subcommand("gen", "write a synthetic dataset as CSV");
  std::string kind = "circular";
  Index n_per_class = 50;
  std::uint64_t gen_seed = 0;
  double noise = 0.0;
  gen->add_option("--kind", kind, "linear | circular | convex2d")->capture_default_str();
  gen->add_option("--n", n_per_class, "points per class")->capture_default_str();
  gen->add_option("--seed", gen_seed)->capture_default_str();
  gen->add_option("--noise", noise)->capture_default_str();
  gen->add_option("--out", out, "output file (stdout when omitted)");

  std::string data_path;
  std::vector<std::string> pair;
  std::string normalize_fit = "none";
  SolverFlags fit_flags;
  auto* fit = app.add_subcommand("fit", "train on a CSV file and write the JSON report");
  fit->add_option("data", data_path, "CSV file, label in the last column")->required();
  fit->add_option("--class-pair", pair, "two raw labels to keep")->delimiter(',');
  fit->add_option("--normalize", normalize_fit, "none | zscore | minmax")->capture_default_str();
  add_solver_flags(fit, fit_flags);
  fit->add_option("--out", out);

  std::string model_path;
  double tol = 1e-6;
  auto* check = app.add_subcommand("check", "certify a fitted model on its training data");
  check->add_option("model", model_path, "JSON written by fit")->required();
  check->add_option("data", data_path, "training CSV")->required();
  check->add_option("--class-pair", pair)->delimiter(',');
  check->add_option("--tol", tol)->capture_default_str();
  check->add_option("--out", out);

  BenchProtocol protocol;
  std::string normalize_bench = to_string(protocol.normalize);
  std::vector<std::string> methods = {"newton_l01", "ls_qssvm"};
  std::string csv;
  SolverFlags bench_flags;
  auto* bench = app.add_subcommand("bench", "repeated random-split benchmark");
  bench->add_option("data", data_path)->required();
  bench->add_option("--class-pair", pair)->delimiter(',');
  bench->add_option("--train-rate", protocol.train_rate)->capture_default_str();
  bench->add_option("--trials", protocol.trials)->capture_default_str();
  bench->add_option("--seed", protocol.seed)->capture_default_str();
  bench->add_option("--normalize", normalize_bench, "none | zscore | minmax")->capture_default_str();
  bench->add_option("--methods", methods, "newton_l01, ls_qssvm, sqssvm")->delimiter(',');
  bench->add_option("--csv", csv, "also write the statistics table as CSV");
  add_solver_flags(bench, bench_flags);
  bench->add_option("--out", out);

  std::vector<double> box;
  int resolution = 101;
  auto* grid = app.add_subcommand("grid", "evaluate a 2-d surface on a grid");
  grid->add_option("model", model_path)->required();
  grid->add_option("--bbox", box, "xmin,xmax,ymin,ymax")->delimiter(',');
  grid->add_option("--resolution", resolution)->capture_default_str();
  grid->add_option("--out", out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    if (gen->parsed()) return run_gen(kind, n_per_class, gen_seed, noise, out);
    if (fit->parsed()) return run_fit(data_path, pair, normalize_fit, fit_flags, out);
    if (check->parsed()) return run_check(model_path, data_path, pair, tol, out);
    if (bench->parsed())
      return run_bench_cmd(data_path, pair, protocol, normalize_bench, methods, bench_flags, out, csv);
    if (grid->parsed()) return run_grid(model_path, box, resolution, out);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << '\n';
    return kExitSolver;
  }
  return kExitInput;
}
