#pragma once

#include <stdexcept>
#include <string>

namespace tnare {

/// Bad parameters, dimension mismatches, malformed files.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A Sherman-Morrison denominator or an inner system is numerically singular.
/// Raised at (or near) the critical case c = 1, alpha = 0 where K is singular.
class NearCriticalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The truncated rank of an iterate exceeded SolverConfig::max_rank.
class RankOverflowError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A dense or large-scale iteration hit max_iter before meeting its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace tnare
