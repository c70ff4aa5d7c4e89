#ifndef BBPL_ERRORS_HPP
#define BBPL_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace bbpl {

/// Joint state space is too large for exhaustive enumeration.
class StateSpaceTooLarge : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad user-facing configuration (spec strings, config files, flags).
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// File could not be read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace bbpl

#endif  // BBPL_ERRORS_HPP
