// Error taxonomy shared by the library and the command-line front end.
//
// The CLI maps these onto process exit codes:
//   invalid_argument_error / any std::invalid_argument  -> 2 (configuration)
//   convergence_error, solution_class_error             -> 3 (solver failure)
//   resource_error                                      -> 4 (resource cap)
//   grid_mismatch_error                                 -> 5 (input mismatch)
#pragma once

#include <stdexcept>
#include <string>

namespace latspec {

// Bad programmatic or user-supplied values (out-of-range indices, invalid
// dimension lists, malformed grids, non-symmetric matrices, ...).
class invalid_argument_error : public std::invalid_argument {
public:
  explicit invalid_argument_error(const std::string& what)
      : std::invalid_argument(what) {}
};

// A dense operation was requested beyond the configured size cap.
class resource_error : public std::runtime_error {
public:
  explicit resource_error(const std::string& what) : std::runtime_error(what) {}
};

// An iterative solver failed to reach its tolerance.  Carries the last
// residual and the number of iterations spent so callers can report them.
class convergence_error : public std::runtime_error {
public:
  convergence_error(const std::string& what, double residual, long iterations)
      : std::runtime_error(what), residual(residual), iterations(iterations) {}
  double residual;
  long iterations;
};

// A solver converged to a point violating the sign condition
// Im(z) * Im(S(z)) > 0 that characterizes admissible Stieltjes transforms.
class solution_class_error : public std::runtime_error {
public:
  explicit solution_class_error(const std::string& what)
      : std::runtime_error(what) {}
};

// Two curves that must share an evaluation grid do not.
class grid_mismatch_error : public std::runtime_error {
public:
  explicit grid_mismatch_error(const std::string& what)
      : std::runtime_error(what) {}
};

}  // namespace latspec
