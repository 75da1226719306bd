#ifndef SRAMDP_ERRORS_HPP_
#define SRAMDP_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace sramdp {

// Base class for all errors thrown by this library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Invalid configuration or arguments: bad widths, out-of-range
// probabilities, malformed files, unsupported voltages, ...
// The command line tool maps this to exit code 2.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(what) {}
};

// Numeric or convergence failures: unbounded privacy loss, infeasible
// constraint systems, degenerate likelihoods, solvers that give up.
// The command line tool maps this to exit code 3.
class NumericError : public Error {
 public:
  explicit NumericError(const std::string& what) : Error(what) {}
};

}  // namespace sramdp

#endif  // SRAMDP_ERRORS_HPP_
