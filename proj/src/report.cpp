#include "qssvm/report.hpp"

#include "qssvm/error.hpp"

#include <cmath>

namespace qssvm {

namespace {

Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json numbers(const Vector& v) {
  Json arr = Json::array();
  for (Index i = 0; i < v.size(); ++i) arr.push_back(number(v[i]));
  return arr;
}

Json numbers(const std::vector<double>& v) {
  Json arr = Json::array();
  for (double x : v) arr.push_back(number(x));
  return arr;
}

Vector read_vector(const Json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_array()) throw InputError(std::string("model JSON lacks array '") + key + "'");
  const Json& arr = j.at(key);
  Vector out(static_cast<Index>(arr.size()));
  for (std::size_t i = 0; i < arr.size(); ++i) {
    if (!arr[i].is_number()) throw InputError(std::string("non-numeric entry in '") + key + "'");
    out[static_cast<Index>(i)] = arr[i].get<double>();
  }
  return out;
}

}  // namespace

Json to_json(const PStatCertificate& cert) {
  return Json{{"passed", cert.passed},
              {"grad_residual", number(cert.grad_residual)},
              {"prox_ok", cert.prox_ok},
              {"prox_violations", cert.prox_violations},
              {"sign_ok", cert.sign_ok},
              {"alpha1", number(cert.alpha1)},
              {"alpha2", number(cert.alpha2)},
              {"alpha_star", number(cert.alpha_star)},
              {"alpha", number(cert.alpha)},
              {"lambda", number(cert.lambda)},
              {"tolerance", number(cert.tolerance)}};
}

Json to_json(const SurfaceParams& theta) {
  return Json{{"wtri", numbers(theta.wtri)}, {"b", numbers(theta.b)}, {"c", number(theta.c)}};
}

Json to_json(const SolverConfig& config) {
  return Json{{"lambda", config.lambda},
              {"alpha", config.alpha},
              {"tau", config.tau},
              {"rho", config.rho},
              {"gamma0", config.gamma_init},
              {"eps", number(config.eps)},
              {"max_iter", config.max_iter},
              {"warm_start", to_string(config.warm_start)},
              {"safeguard_window", config.safeguard_window},
              {"hinge_tol", config.hinge_tol}};
}

Json to_json(const MethodStats& s) {
  return Json{{"method", to_string(s.method)},
              {"trials", s.trials},
              {"failures", s.failures},
              {"not_converged", s.not_converged},
              {"min", number(s.min)},
              {"max", number(s.max)},
              {"mean", number(s.mean)},
              {"var", number(s.variance)},
              {"std", number(s.std_frac)},
              {"mean_time_s", number(s.mean_time)},
              {"accuracies", numbers(s.accuracies)}};
}

Json to_json(const SolveReport& report, const SolverConfig& config) {
  Json sizes = Json::array();
  for (Index s : report.working_sizes) sizes.push_back(s);
  return Json{{"status", to_string(report.status)},
              {"iters", report.iters()},
              {"residual_trace", numbers(report.residuals)},
              {"gamma_trace", numbers(report.gammas)},
              {"working_sizes", sizes},
              {"certificate", to_json(report.certificate)},
              {"theta", to_json(report.final.theta)},
              {"z", numbers(report.final.z)},
              {"sigma_min", number(report.sigma_min)},
              {"wall_time_s", report.wall_time},
              {"warm_start_time_s", report.warm_start_time},
              {"warm_start_restarts", report.warm_start_restarts},
              {"config", to_json(config)},
              {"m", report.final.theta.dim()},
              {"n", report.final.z.size()}};
}

Json to_json(const BenchResult& result, const BenchProtocol& protocol, const SolverConfig& config) {
  Json rows = Json::array();
  for (const MethodStats& s : result.rows) rows.push_back(to_json(s));
  return Json{{"protocol",
               {{"train_rate", protocol.train_rate},
                {"trials", protocol.trials},
                {"seed", protocol.seed},
                {"normalize", to_string(protocol.normalize)}}},
              {"config", to_json(config)},
              {"rows", rows},
              {"wall_time_s", result.wall_time}};
}

SurfaceParams surface_from_json(const Json& j) {
  const Json& t = j.contains("theta") ? j.at("theta") : j;
  SurfaceParams s;
  s.wtri = read_vector(t, "wtri");
  s.b = read_vector(t, "b");
  if (!t.contains("c") || !t.at("c").is_number()) throw InputError("model JSON lacks numeric 'c'");
  s.c = t.at("c").get<double>();
  if (s.b.size() < 1 || s.wtri.size() != tri_size(s.b.size())) throw InputError("model JSON has inconsistent sizes");
  return s;
}

}  // namespace qssvm
