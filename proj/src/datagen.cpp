#include "qssvm/datagen.hpp"

#include "qssvm/error.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace qssvm {

namespace {

constexpr double kLineGap = 0.2;
constexpr double kInnerRadius = 1.0;
constexpr double kOuterMin = 1.4;
constexpr double kOuterMax = 2.5;
constexpr double kParabolaGap = 0.3;

struct Line {
  double nx, ny, offset;
};

// Consumes the first three draws of the stream.
Line draw_line(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  std::uniform_real_distribution<double> offset(-0.5, 0.5);
  const double t = angle(rng);
  return Line{std::cos(t), std::sin(t), offset(rng)};
}

}  // namespace

std::string to_string(GenKind k) {
  switch (k) {
    case GenKind::linear: return "linear";
    case GenKind::circular: return "circular";
    case GenKind::convex2d: return "convex2d";
  }
  return "unknown";
}

GenKind parse_gen_kind(const std::string& name) {
  if (name == "linear") return GenKind::linear;
  if (name == "circular") return GenKind::circular;
  if (name == "convex2d") return GenKind::convex2d;
  throw InputError("unknown dataset kind '" + name + "'");
}

void GenSpec::validate() const {
  if (n_per_class < 1) throw InputError("n_per_class must be at least 1");
  if (!(noise >= 0.0) || !std::isfinite(noise)) throw InputError("noise must be nonnegative");
}

Dataset generate(const GenSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  const Index n = 2 * spec.n_per_class;
  Dataset data;
  data.points.resize(n, 2);
  data.labels.resize(n);

  if (spec.kind == GenKind::linear) {
    const Line line = draw_line(rng);
    std::uniform_real_distribution<double> along(-2.0, 2.0);
    for (Index i = 0; i < n; ++i) {
      const double y = i < spec.n_per_class ? 1.0 : -1.0;
      const double u = along(rng);
      const double v = y * (kLineGap + 1.5 * unit(rng) + spec.noise * std::abs(gauss(rng)));
      // Foot of the normal from the origin, then move along the tangent and normal.
      data.points(i, 0) = line.offset * line.nx - u * line.ny + v * line.nx;
      data.points(i, 1) = line.offset * line.ny + u * line.nx + v * line.ny;
      data.labels[i] = y;
    }
  } else if (spec.kind == GenKind::circular) {
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    for (Index i = 0; i < n; ++i) {
      const bool inner = i < spec.n_per_class;
      const double t = angle(rng);
      double r;
      if (inner) {
        r = kInnerRadius * std::sqrt(unit(rng));
        if (r >= kInnerRadius) r = std::nextafter(kInnerRadius, 0.0);
      } else {
        r = kOuterMin + (kOuterMax - kOuterMin) * unit(rng) + spec.noise * std::abs(gauss(rng));
      }
      data.points(i, 0) = r * std::cos(t);
      data.points(i, 1) = r * std::sin(t);
      data.labels[i] = inner ? 1.0 : -1.0;
    }
  } else {
    std::uniform_real_distribution<double> xs(-1.5, 1.5);
    for (Index i = 0; i < n; ++i) {
      const double y = i < spec.n_per_class ? 1.0 : -1.0;
      const double x = xs(rng);
      const double lift = kParabolaGap + 1.5 * unit(rng) + spec.noise * std::abs(gauss(rng));
      data.points(i, 0) = x;
      data.points(i, 1) = x * x + y * lift;
      data.labels[i] = y;
    }
  }
  return data;
}

SurfaceParams generating_surface(const GenSpec& spec) {
  SurfaceParams s = SurfaceParams::zeros(2);
  switch (spec.kind) {
    case GenKind::linear: {
      std::mt19937_64 rng(spec.seed);
      const Line line = draw_line(rng);
      s.b << line.nx / kLineGap, line.ny / kLineGap;
      s.c = -line.offset / kLineGap;
      break;
    }
    case GenKind::circular: {
      // h = A - B r^2 with h(1) = 1 and h(1.4) = -1.
      const double B = 2.0 / (kOuterMin * kOuterMin - kInnerRadius * kInnerRadius);
      s.wtri << -2.0 * B, -2.0 * B, 0.0;
      s.c = 1.0 + B;
      break;
    }
    case GenKind::convex2d:
      s.wtri << -2.0 / kParabolaGap, 0.0, 0.0;
      s.b << 0.0, 1.0 / kParabolaGap;
      break;
  }
  return s;
}

}  // namespace qssvm
