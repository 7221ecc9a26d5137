#include "qssvm/bench.hpp"
#include "qssvm/datagen.hpp"
#include "qssvm/error.hpp"

#include <doctest.h>

#include <algorithm>
#include <map>
#include <sstream>

using namespace qssvm;

namespace {

Dataset parse(const std::string& text, const CsvOptions& o = {}) {
  std::istringstream in(text);
  return parse_csv(in, o);
}

std::string iris_path() { return std::string(QSSVM_SOURCE_DIR) + "/data/iris.csv"; }

}  // namespace

TEST_CASE("csv label mapping") {
  const Dataset d = parse("1.0,2.0,0\n3.0,4.0,1\n5.0,6.0,0\n");
  REQUIRE(d.size() == 3);
  CHECK(d.labels[0] == -1.0);
  CHECK(d.labels[1] == 1.0);
  CHECK(d.labels[2] == -1.0);
  CHECK(d.points(2, 1) == 6.0);
  const Dataset s = parse("1,-1\n2,1\n");
  CHECK(s.labels[0] == -1.0);
  CHECK(s.labels[1] == 1.0);
}

TEST_CASE("csv header detection") {
  const Dataset a = parse("x,y,label\n1,2,0\n3,4,1\n");
  const Dataset b = parse("1,2,0\n3,4,1\n");
  CHECK(a.points == b.points);
  CHECK(a.labels == b.labels);
}

TEST_CASE("csv errors name the row") {
  auto message = [](const std::string& text) {
    try {
      parse(text);
    } catch (const InputError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(message("1,2,0\n3,1\n").find("row 2") != std::string::npos);
  CHECK(message("1,2,0\n3,abc,1\n").find("row 2") != std::string::npos);
  CHECK(!message("1,2,0\n3,4,0\n").empty());
  CHECK(!message("1,0\n2,1\n3,2\n").empty());
  CHECK_THROWS_AS(load_csv("/nonexistent/file.csv"), InputError);
}

TEST_CASE("iris with a class pair") {
  CsvOptions o;
  o.class_pair = std::make_pair(std::string("0"), std::string("1"));
  const Dataset d = load_csv(iris_path(), o);
  CHECK(d.size() == 100);
  CHECK(d.dim() == 4);
  CHECK((d.labels.array() > 0).count() == 50);
  CHECK_THROWS_AS(load_csv(iris_path()), InputError);
}

TEST_CASE("stratified split") {
  const Dataset d = generate({GenKind::circular, 50, 0, 0.0});
  const auto [train, test] = split(d, 0.8, 3);
  CHECK(train.size() == 80);
  CHECK(test.size() == 20);
  CHECK((train.labels.array() > 0).count() == 40);
  CHECK((test.labels.array() > 0).count() == 10);

  const auto [train2, test2] = split(d, 0.8, 3);
  CHECK(train.points == train2.points);
  CHECK(test.points == test2.points);

  // Union is the original multiset.
  std::vector<std::vector<double>> all, back;
  for (Index i = 0; i < d.size(); ++i) all.push_back({d.points(i, 0), d.points(i, 1), d.labels[i]});
  for (const Dataset* part : {&train, &test})
    for (Index i = 0; i < part->size(); ++i)
      back.push_back({part->points(i, 0), part->points(i, 1), part->labels[i]});
  std::sort(all.begin(), all.end());
  std::sort(back.begin(), back.end());
  CHECK(all == back);

  // Extreme rates still leave a row of every label on each side.
  const auto [tiny, rest] = split(d, 0.001, 1);
  CHECK((tiny.labels.array() > 0).count() == 1);
  CHECK((tiny.labels.array() < 0).count() == 1);
  CHECK_THROWS_AS(split(d, 1.0, 0), InputError);

  Dataset lone = d.subset({0, 50, 51});
  CHECK_THROWS_AS(split(lone, 0.5, 0), InputError);
}

TEST_CASE("scaler is fitted on one set and applied to another") {
  const Dataset d = generate({GenKind::convex2d, 30, 1, 0.0});
  const Scaler z = Scaler::fit(d, Normalize::zscore);
  const Dataset zd = z.apply(d);
  for (Index j = 0; j < 2; ++j) {
    CHECK(zd.points.col(j).mean() == doctest::Approx(0.0).epsilon(1e-12).scale(1.0));
    const double var = (zd.points.col(j).array() - zd.points.col(j).mean()).square().mean();
    CHECK(var == doctest::Approx(1.0));
  }
  const Dataset md = Scaler::fit(d, Normalize::minmax).apply(d);
  CHECK(md.points.minCoeff() == doctest::Approx(0.0));
  CHECK(md.points.maxCoeff() == doctest::Approx(1.0));
  const Dataset nd = Scaler::fit(d, Normalize::none).apply(d);
  CHECK(nd.points == d.points);
  Dataset flat = d;
  flat.points.col(0).setConstant(3.0);
  CHECK(Scaler::fit(flat, Normalize::zscore).apply(flat).points.allFinite());
}

TEST_CASE("run_bench on the circular set") {
  const Dataset d = generate({GenKind::circular, 50, 0, 0.0});
  BenchProtocol p;
  p.trials = 4;
  const BenchResult a = run_bench(d, p, SolverConfig{});
  const BenchResult b = run_bench(d, p, SolverConfig{});
  REQUIRE(a.rows.size() == 2);
  for (std::size_t r = 0; r < a.rows.size(); ++r) CHECK(a.rows[r].accuracies == b.rows[r].accuracies);
  // Held-out points can fall outside the fitted circle; training accuracy is
  // where the separable sets reach 100.
  CHECK(a.rows[0].mean >= 97.0);
  CHECK(a.rows[0].mean >= a.rows[1].mean);
  std::ostringstream out;
  write_stats_csv(out, a.rows);
  CHECK(out.str().rfind("method,trials,failures,not_converged,min,max,mean,var,std,mean_time_s", 0) == 0);
  p.train_rate = 0.0;
  CHECK_THROWS_AS(run_bench(d, p, SolverConfig{}), InputError);
}

TEST_CASE("reported accuracy matches a recount") {
  const Dataset d = generate({GenKind::convex2d, 50, 2, 0.0});
  const auto [train, test] = split(d, 0.4, 9);
  const SurfaceParams s = solve(train, SolverConfig{}).final.theta;
  const std::vector<int> pred = predict_all(s, test);
  int correct = 0;
  for (Index i = 0; i < test.size(); ++i) correct += pred[static_cast<std::size_t>(i)] == static_cast<int>(test.labels[i]);
  CHECK(accuracy(s, test) == static_cast<double>(correct) / static_cast<double>(test.size()));
}

TEST_CASE("boundary grid") {
  SurfaceParams s = SurfaceParams::zeros(2);
  s.wtri << 2.0, 2.0, 0.0;  // h = |x|^2 - 1
  s.c = -1.0;
  const auto g = boundary_grid(s, {}, 3);
  REQUIRE(g.size() == 9);
  CHECK(g[4].sign == -1);
  CHECK(g[4].x == doctest::Approx(0.0));
  for (std::size_t k : {0u, 2u, 6u, 8u}) CHECK(g[k].sign == 1);
  const auto one = boundary_grid(s, {-1.0, 3.0, 0.0, 2.0}, 1);
  REQUIRE(one.size() == 1);
  CHECK(one[0].x == doctest::Approx(1.0));
  CHECK(one[0].y == doctest::Approx(1.0));
  for (const GridNode& n : boundary_grid(s, {}, 17)) CHECK(n.sign == predict(s, Eigen::Vector2d(n.x, n.y)));
  CHECK_THROWS_AS(boundary_grid(SurfaceParams::zeros(3), {}, 3), InputError);
  CHECK_THROWS_AS(boundary_grid(s, {}, 0), InputError);
}
