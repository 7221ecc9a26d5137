// End-to-end acceptance checks. One PASS/FAIL line per criterion; the exit
// status is nonzero if any criterion fails.

#include "oracles.hpp"
#include "qssvm/bench.hpp"
#include "qssvm/datagen.hpp"
#include "qssvm/newton.hpp"
#include "qssvm/prox01.hpp"
#include "qssvm/stationarity.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

using namespace qssvm;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// Converged outputs collected by criteria 3 and 4 for criterion 5.
struct Converged {
  Dataset data;
  SolveReport report;
  SolverConfig cfg;
};
std::vector<Converged> g_converged;

const GenKind kKinds[] = {GenKind::linear, GenKind::circular, GenKind::convex2d};

Outcome prox_oracle() {
  std::mt19937_64 rng(20240101);
  std::uniform_real_distribution<double> zd(-5.0, 5.0), pd(0.01, 10.0);
  const auto t0 = Clock::now();
  int bad = 0;
  double worst = 0.0;
  for (int k = 0; k < 10000; ++k) {
    const double z = zd(rng), a = pd(rng), l = pd(rng);
    const ProxParams p = ProxParams::make(a, l);
    Vector zv = Vector::Constant(1, z);
    const double u = prox_vector(zv, p)[0];
    const double gap = prox_objective(u, z, p) - oracle::prox_grid_min(z, a, l);
    worst = std::max(worst, gap);
    if (gap > 1e-9) ++bad;
  }
  const double s = seconds_since(t0);
  return {bad == 0 && s < 5.0, fmt("10000 triples, %d above oracle, worst gap %.2e, %.2f s", bad, worst, s)};
}

Outcome derivatives() {
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<int> nd(1, 30), md(1, 4);
  double worst_g = 0.0, worst_h = 0.0;
  for (int k = 0; k < 100; ++k) {
    const Dataset d = oracle::random_dataset(rng, nd(rng), md(rng), 1.5);
    const DesignCache c = build_design(d);
    Vector th = Vector::Random(c.d);
    const Vector g = oracle::fd_gradient(th, d);
    const Matrix H = oracle::fd_hessian(th, d);
    worst_g = std::max(worst_g, (smooth_gradient(th, c) - g).norm() / std::max(g.norm(), 1e-300));
    worst_h = std::max(worst_h, (c.G - H).norm() / H.norm());
  }
  return {worst_g < 1e-6 && worst_h < 1e-6, fmt("100 pairs, worst rel err gradient %.2e, G %.2e", worst_g, worst_h)};
}

Outcome synthetic() {
  int ok = 0, runs = 0;
  double slowest = 0.0, worst_res = 0.0;
  int max_iters = 0;
  std::string fails;
  for (GenKind kind : kKinds) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      ++runs;
      const Dataset d = generate({kind, 50, seed, 0.0});
      const SolverConfig cfg;
      const auto t0 = Clock::now();
      SolveReport r = solve(d, cfg);
      const double s = seconds_since(t0);
      slowest = std::max(slowest, s);
      max_iters = std::max(max_iters, r.iters());
      worst_res = std::max(worst_res, r.residuals.back());
      const bool pass = r.status == SolveStatus::converged && accuracy(r.final.theta, d) == 1.0 &&
                        r.residuals.back() < 1e-8 && s < 0.1;
      if (pass) {
        ++ok;
        g_converged.push_back({d, std::move(r), cfg});
      } else {
        fails += " " + to_string(kind) + "/" + std::to_string(seed);
      }
    }
  }
  return {ok == runs, fmt("%d/%d converged at 100%% training accuracy, max %d iters, worst residual %.2e, "
                          "slowest %.4f s%s",
                          ok, runs, max_iters, worst_res, slowest, fails.empty() ? "" : (" failed:" + fails).c_str())};
}

Outcome quadratic_rate() {
  int ok = 0, runs = 0, inconclusive = 0;
  double worst_fit = 0.0;
  std::string fails;
  for (GenKind kind : kKinds) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      ++runs;
      const Dataset d = generate({kind, 50, seed, 0.0});
      SolverConfig cfg;
      cfg.eps = 1e-11;
      SolveReport r = solve(d, cfg);
      const RateProbe probe = rate_probe(r.residuals, r.gammas, cfg.rho);
      int reached = -1;
      for (std::size_t k = 0; k < r.residuals.size(); ++k)
        if (r.residuals[k] < 1e-10) {
          reached = static_cast<int>(k);
          break;
        }
      inconclusive += probe.inconclusive;
      if (!probe.inconclusive) worst_fit = std::max(worst_fit, probe.fit_residual);
      if (probe.quadratic && reached >= 0 && reached <= 20) {
        ++ok;
      } else {
        fails += " " + to_string(kind) + "/" + std::to_string(seed);
      }
      if (r.status == SolveStatus::converged) g_converged.push_back({d, std::move(r), cfg});
    }
  }
  return {ok == runs, fmt("%d/%d quadratic with residual < 1e-10 within 20 iters, %d inconclusive, worst fit "
                          "residual %.3f%s",
                          ok, runs, inconclusive, worst_fit, fails.empty() ? "" : (" failed:" + fails).c_str())};
}

Outcome certificates() {
  int ok = 0;
  double worst_grad = 0.0, min_margin = INFINITY;
  for (const Converged& c : g_converged) {
    const DesignCache cache = build_design(c.data);
    const Vector th = c.report.final.theta.to_vector();
    const PStatCertificate cert = pstationary_check(th, c.report.final.z, c.cfg.alpha, c.cfg.lambda, cache, 1e-6);
    const AlphaBounds b = alpha_bounds(margins(th, cache), c.report.final.z, c.cfg.lambda, 1e-6);
    worst_grad = std::max(worst_grad, cert.grad_residual);
    min_margin = std::min(min_margin, b.alpha_star / c.cfg.alpha);
    ok += cert.passed && b.alpha_star > c.cfg.alpha;
  }
  const int total = static_cast<int>(g_converged.size());
  return {total > 0 && ok == total,
          fmt("%d/%d converged outputs certified at tol 1e-6, worst grad residual %.2e, min alpha_star/alpha %.3g",
              ok, total, worst_grad, min_margin)};
}

Outcome equivalence() {
  std::mt19937_64 rng(4242);
  int built = 0, ok = 0, attempts = 0;
  double worst_res = 0.0, min_jump = INFINITY;
  while (built < 100 && attempts < 200000) {
    ++attempts;
    auto p = oracle::build_stationary_pair(rng);
    if (!p) continue;
    ++built;
    const DesignCache c = build_design(p->data);
    const Vector F = margins(p->theta, c);
    const IndexSets s = index_sets(F, p->z, p->alpha, p->lambda);
    const double r0 = residual(p->theta, p->z, s.working, c).norm;
    const bool cert = pstationary_check(p->theta, p->z, p->alpha, p->lambda, c, 1e-9).passed;
    worst_res = std::max(worst_res, r0);
    bool jumps = true;
    for (Index i = 0; i < c.n; ++i) {
      if (std::binary_search(p->T.begin(), p->T.end(), i)) continue;
      Vector z = p->z;
      z[i] += 0.1;
      const IndexSets s2 = index_sets(F, z, p->alpha, p->lambda);
      const double r1 = residual(p->theta, z, s2.working, c).norm;
      min_jump = std::min(min_jump, r1 - r0);
      if (r1 - r0 < 0.1 - 1e-12) jumps = false;
    }
    ok += r0 < 1e-10 && cert && s.working == p->T && jumps;
  }
  return {built == 100 && ok == 100,
          fmt("%d/%d constructed pairs (%d draws), worst residual %.2e, min jump after perturbation %.4f", ok, built,
              attempts, worst_res, min_jump)};
}

Outcome iris_band() {
  CsvOptions o;
  o.class_pair = std::make_pair(std::string("1"), std::string("2"));
  const Dataset d = load_csv(std::string(QSSVM_SOURCE_DIR) + "/data/iris.csv", o);
  BenchProtocol p;  // 80% training, 50 trials, z-score, seed 0
  const SolverConfig cfg;
  const auto t0 = Clock::now();
  const BenchResult a = run_bench(d, p, cfg);
  const double s = seconds_since(t0);
  const BenchResult b = run_bench(d, p, cfg);
  bool same = a.rows.size() == b.rows.size();
  for (std::size_t k = 0; same && k < a.rows.size(); ++k) same = a.rows[k].accuracies == b.rows[k].accuracies;
  const MethodStats& nl = a.rows.at(0);
  const MethodStats& ls = a.rows.at(1);
  const bool in_band = nl.mean >= 85.0 && nl.mean <= 100.0 && ls.mean >= 85.0 && ls.mean <= 100.0;
  return {in_band && same && s < 60.0,
          fmt("Iris classes 1 vs 2: newton_l01 mean %.2f (min %.2f max %.2f std %.3f, %d not converged, %d failed), "
              "ls_qssvm mean %.2f, %.2f s, rerun %s",
              nl.mean, nl.min, nl.max, nl.std_frac, nl.not_converged, nl.failures, ls.mean, s,
              same ? "identical" : "DIFFERS")};
}

bool defined(const SolveReport& r) {
  return r.final.theta.to_vector().allFinite() && r.final.z.allFinite() && !r.residuals.empty();
}

Outcome degenerate() {
  int ok = 0, total = 0;
  std::string fails;
  auto run = [&](const std::string& name, const Dataset& d, const SolverConfig& cfg) {
    ++total;
    try {
      const SolveReport r = solve(d, cfg);
      if (defined(r)) {
        ++ok;
        return;
      }
      fails += " " + name + "(non-finite)";
    } catch (const std::exception& e) {
      fails += " " + name + "(" + e.what() + ")";
    }
  };

  Dataset one = generate({GenKind::circular, 25, 1, 0.0});
  one.labels.setOnes();
  for (WarmStart w : {WarmStart::hinge, WarmStart::least_squares, WarmStart::zeros}) {
    SolverConfig cfg;
    cfg.warm_start = w;
    run("one-label/" + to_string(w), one, cfg);
    one.labels.setConstant(-1.0);
    run("one-label-neg/" + to_string(w), one, cfg);
    one.labels.setOnes();
  }

  // Duplicated support points: every sample appears twice, plus exact copies
  // across the labels.
  const Dataset base = generate({GenKind::convex2d, 20, 2, 0.0});
  std::vector<Index> rows;
  for (Index i = 0; i < base.size(); ++i) rows.push_back(i), rows.push_back(i);
  run("duplicated", base.subset(rows), SolverConfig{});
  Dataset clash = base;
  clash.points.row(1) = clash.points.row(base.size() - 1);
  run("conflicting-duplicate", clash, SolverConfig{});
  Dataset same;
  same.points = RowMatrix::Constant(6, 2, 0.5);
  same.labels.resize(6);
  same.labels << 1, -1, 1, -1, 1, -1;
  run("all-identical", same, SolverConfig{});

  const Dataset circ = generate({GenKind::circular, 30, 3, 0.0});
  for (double prod : {1e-4, 1e-2, 1.0, 1e2, 1e4}) {
    for (double alpha : {1e-3, 1.0, 1e3}) {
      SolverConfig cfg;
      cfg.alpha = alpha;
      cfg.lambda = prod / alpha;
      for (WarmStart w : {WarmStart::hinge, WarmStart::least_squares}) {
        cfg.warm_start = w;
        run(fmt("alpha*lambda=%g/alpha=%g/%s", prod, alpha, to_string(w).c_str()), circ, cfg);
      }
    }
  }
  return {ok == total, fmt("%d/%d degenerate runs ended with a defined status and finite output%s", ok, total,
                           fails.empty() ? "" : (":" + fails).c_str())};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"prox oracle equivalence", prox_oracle},
      {"derivative correctness", derivatives},
      {"synthetic reproduction", synthetic},
      {"quadratic rate", quadratic_rate},
      {"certificate soundness", certificates},
      {"residual / P-stationarity equivalence", equivalence},
      {"Iris benchmark band", iris_band},
      {"degenerate inputs", degenerate},
  };
  int failed = 0;
  int index = 0;
  for (const auto& [name, fn] : criteria) {
    ++index;
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    std::printf("criterion %d %-40s %s  %s\n", index, name, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}
