#pragma once

#include <stdexcept>
#include <string>

namespace qssvm {

/// Malformed data, invalid parameters, or mismatched dimensions.
class InputError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace qssvm
