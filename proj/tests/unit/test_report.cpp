#include "qssvm/datagen.hpp"
#include "qssvm/error.hpp"
#include "qssvm/report.hpp"

#include <doctest.h>

using namespace qssvm;

TEST_CASE("solve report schema") {
  const Dataset d = generate({GenKind::circular, 20, 0, 0.0});
  const SolverConfig cfg;
  const SolveReport r = solve(d, cfg);
  const Json j = to_json(r, cfg);
  for (const char* key : {"status", "iters", "residual_trace", "gamma_trace", "working_sizes", "certificate", "theta",
                          "z", "wall_time_s", "config"})
    CHECK(j.contains(key));
  CHECK(j["status"] == "converged");
  CHECK(j["residual_trace"].size() == r.residuals.size());
  CHECK(j["gamma_trace"].size() == r.gammas.size());
  CHECK(j["z"].size() == static_cast<std::size_t>(d.size()));
  CHECK(j["certificate"]["passed"] == true);

  const SurfaceParams back = surface_from_json(Json::parse(j.dump()));
  CHECK(back.to_vector() == r.final.theta.to_vector());
}

TEST_CASE("non-finite values become null") {
  PStatCertificate c;
  const Json j = to_json(c);
  CHECK(j["alpha1"].is_null());
  CHECK(j["alpha_star"].is_null());
}

TEST_CASE("malformed model JSON") {
  CHECK_THROWS_AS(surface_from_json(Json::parse(R"({"theta": {"wtri": [1], "b": [1, 2], "c": 0}})")), InputError);
  CHECK_THROWS_AS(surface_from_json(Json::parse(R"({"wtri": [1], "b": [1]})")), InputError);
  CHECK_THROWS_AS(surface_from_json(Json::parse(R"({"wtri": ["x"], "b": [1], "c": 0})")), InputError);
  CHECK(surface_from_json(Json::parse(R"({"wtri": [1], "b": [2], "c": 3})")).c == 3.0);
}
