#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace mahdg {

/// Nonlinear source or density evaluation failed (negative radicand,
/// nonpositive density, ...). Carries the offending element when known.
class EvaluationError : public std::runtime_error {
public:
  explicit EvaluationError(const std::string& what, int element = -1)
      : std::runtime_error(element >= 0 ? what + " (element " + std::to_string(element) + ")" : what),
        element(element) {}
  int element;
};

/// Local elimination failed: the interior block of an element is singular
/// (or numerically close to it).
class CondensationError : public std::runtime_error {
public:
  CondensationError(const std::string& what, int element, double rcond)
      : std::runtime_error(what + " (element " + std::to_string(element) +
                           ", rcond " + std::to_string(rcond) + ")"),
        element(element), rcond(rcond) {}
  int element;
  double rcond;
};

/// Sparse factorization or back-substitution of the trace system failed.
class SingularSystemError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Iteration budget exhausted before the stopping tolerance was met.
class NonConvergenceError : public std::runtime_error {
public:
  NonConvergenceError(const std::string& what, int iterations, double final_norm)
      : std::runtime_error(what + " after " + std::to_string(iterations) +
                           " iterations, final norm " + std::to_string(final_norm)),
        iterations(iterations), final_norm(final_norm) {}
  int iterations;
  double final_norm;
};

/// Backtracking found no step that decreases the residual.
class LineSearchError : public std::runtime_error {
public:
  LineSearchError(const std::string& what, double residual)
      : std::runtime_error(what), residual(residual) {}
  double residual;
};

/// An extracted mesh has nonpositive Jacobian somewhere.
class TangledMeshError : public std::runtime_error {
public:
  TangledMeshError(const std::string& what, std::vector<int> elements)
      : std::runtime_error(what + " (" + std::to_string(elements.size()) + " elements)"),
        elements(std::move(elements)) {}
  std::vector<int> elements;
};

/// File I/O failure; message carries the path.
class IoError : public std::runtime_error {
public:
  explicit IoError(const std::string& what, const std::string& path)
      : std::runtime_error(what + ": " + path), path(path) {}
  std::string path;
};

} // namespace mahdg
