#pragma once

#include <stdexcept>
#include <string>

namespace fppc {

/// Invalid parameters or an operation requested on the wrong topology.
class ConfigError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// A site sequence that is not a path (consecutive sites not adjacent).
class PathError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// An operation applied outside its domain (e.g. parent of the root).
class DomainError : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

/// Internal invariant broken during a trial. Always a bug.
class InvariantViolation : public std::logic_error {
  public:
    using std::logic_error::logic_error;
};

}  // namespace fppc
