#include "oracles.hpp"
#include "qssvm/error.hpp"
#include "qssvm/prox01.hpp"

#include <doctest.h>

using namespace qssvm;

TEST_CASE("zero-one loss") {
  CHECK(zero_one_loss(0.0) == 0);
  CHECK(zero_one_loss(1e-12) == 1);
  CHECK(zero_one_loss(-3.0) == 0);
  CHECK(zero_one_loss(-0.0) == 0);
}

TEST_CASE("positive count") {
  CHECK(positive_count(Vector::Zero(3)) == 0);
  Vector u(3);
  u << 1.0, -1.0, 2.0;
  CHECK(positive_count(u) == 2);
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g;
  Vector r(5000);
  for (Index i = 0; i < r.size(); ++i) r[i] = (i % 7 == 0) ? 0.0 : g(rng);
  Index brute = 0;
  for (Index i = 0; i < r.size(); ++i) brute += zero_one_loss(r[i]);
  CHECK(positive_count(r) == brute);
}

TEST_CASE("prox params") {
  CHECK_THROWS_AS(ProxParams::make(0.0, 1.0), InputError);
  CHECK_THROWS_AS(ProxParams::make(1.0, -1.0), InputError);
  CHECK_THROWS_AS(ProxParams::make(INFINITY, 1.0), InputError);
  CHECK(ProxParams::make(0.5, 1.0).threshold() == doctest::Approx(1.0));
}

TEST_CASE("prox closed form at threshold 1") {
  const ProxParams p = ProxParams::make(1.0, 0.5);
  CHECK(prox_scalar(0.5, p) == 0.0);
  CHECK(prox_scalar(-1.0, p) == -1.0);
  CHECK(prox_scalar(2.0, p) == 2.0);
  CHECK(prox_scalar(1.0, p) == 0.0);
  CHECK(prox_scalar(1.0, p, BoundaryTie::identity) == 1.0);
  CHECK(prox_scalar(0.0, p) == 0.0);
  CHECK(prox_scalar(0.0, p, BoundaryTie::identity) == 0.0);
  CHECK_THROWS_AS(prox_scalar(std::nan(""), p), InputError);
  CHECK_THROWS_AS(prox_scalar(INFINITY, p), InputError);

  Vector z(3);
  z << 0.5, -1.0, 2.0;
  const Vector out = prox_vector(z, p);
  CHECK(out[0] == 0.0);
  CHECK(out[1] == -1.0);
  CHECK(out[2] == 2.0);
  CHECK(prox_vector(Vector::Zero(4), p).isZero());
}

TEST_CASE("prox membership") {
  const ProxParams p = ProxParams::make(1.0, 0.5);
  const double t = p.threshold();
  CHECK(prox_contains(0.0, t, p));
  CHECK(prox_contains(t, t, p));
  CHECK_FALSE(prox_contains(0.3, 0.3, p));
  CHECK(prox_contains(0.0, 0.3, p));
  CHECK(prox_contains(-2.0, -2.0, p));
  CHECK_FALSE(prox_contains(0.0, -2.0, p));
  CHECK(prox_contains(5.0, 5.0, p));
}

TEST_CASE("prox against the grid oracle") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> zd(-5.0, 5.0), pd(0.01, 10.0);
  for (int trial = 0; trial < 500; ++trial) {
    const double z = zd(rng), a = pd(rng), l = pd(rng);
    const ProxParams p = ProxParams::make(a, l);
    const double u = prox_scalar(z, p);
    CHECK(prox_objective(u, z, p) <= oracle::prox_grid_min(z, a, l) + 1e-9);
    CHECK(prox_contains(u, z, p));
  }
}

TEST_CASE("prox idempotence and scaling") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> zd(-5.0, 5.0), pd(0.01, 10.0), sd(0.1, 10.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const double z = zd(rng), a = pd(rng), l = pd(rng), s = sd(rng);
    const ProxParams p = ProxParams::make(a, l);
    const double u = prox_scalar(z, p);
    CHECK(prox_scalar(u, p) == u);
    // The threshold depends only on alpha * lambda.
    const ProxParams q = ProxParams::make(a * s, l / s);
    if (std::abs(z - p.threshold()) > 1e-9) CHECK(prox_scalar(z, q) == u);
  }
}
