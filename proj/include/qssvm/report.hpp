#pragma once

// JSON serialisation of solver reports, certificates and benchmark tables.
// Non-finite numbers are written as null.

#include "qssvm/bench.hpp"
#include "qssvm/newton.hpp"
#include "qssvm/stationarity.hpp"

#include <json.hpp>

namespace qssvm {

using Json = nlohmann::json;

Json to_json(const PStatCertificate& cert);
Json to_json(const SurfaceParams& theta);
Json to_json(const SolverConfig& config);
Json to_json(const MethodStats& stats);

/// {status, iters, residual_trace, gamma_trace, working_sizes, certificate,
///  theta, z, wall_time_s, warm_start_time_s, config, m, n}.
Json to_json(const SolveReport& report, const SolverConfig& config);

Json to_json(const BenchResult& result, const BenchProtocol& protocol, const SolverConfig& config);

/// Reads the "theta" object written by to_json(SurfaceParams).
SurfaceParams surface_from_json(const Json& j);

}  // namespace qssvm
