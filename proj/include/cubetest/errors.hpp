#pragma once

#include <stdexcept>
#include <string>

namespace cubetest {

// Malformed input: bad files, bad parameters, dimension mismatches.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// The requested class has no membership checker or core enumeration.
class UnsupportedClass : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An exhaustive enumeration or search would exceed its configured budget,
// or no instance with the requested certified distance exists.
class BudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cubetest
