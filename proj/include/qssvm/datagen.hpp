#pragma once

// Seeded 2-d point clouds with a guaranteed separation gap: two classes
// either side of a line, a disc inside an annulus, and two classes either
// side of a parabola. Points of class +1 come first.

#include "qssvm/model.hpp"

#include <cstdint>
#include <string>

namespace qssvm {

enum class GenKind { linear, circular, convex2d };

std::string to_string(GenKind k);
GenKind parse_gen_kind(const std::string& name);

struct GenSpec {
  GenKind kind = GenKind::circular;
  Index n_per_class = 50;
  std::uint64_t seed = 0;
  double noise = 0.0;  // spreads points away from the boundary; never closes the gap

  void validate() const;
};

Dataset generate(const GenSpec& spec);

/// A surface that separates every dataset of this kind with F_i <= 0 on all
/// points. For linear data it depends on the seed through the random line.
SurfaceParams generating_surface(const GenSpec& spec);

}  // namespace qssvm
