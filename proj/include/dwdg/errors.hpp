#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace dwdg {

/// Mesh connectivity inconsistency (dangling edge, mismatched normal, ...).
/// Carries the index of the offending entity.
class TopologyError : public std::runtime_error {
 public:
  TopologyError(const std::string& what, long entity)
      : std::runtime_error(what + " (entity " + std::to_string(entity) + ")"),
        entity_(entity) {}
  long entity() const { return entity_; }

 private:
  long entity_;
};

class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Iterative solve did not reach tolerance; carries the best iterate and its
/// recomputed residual.
class ConvergenceError : public SolverError {
 public:
  ConvergenceError(const std::string& what, double residual,
                   std::vector<double> best_iterate = {})
      : SolverError(what), residual_(residual), iterate_(std::move(best_iterate)) {}
  double residual() const { return residual_; }
  const std::vector<double>& best_iterate() const { return iterate_; }

 private:
  double residual_;
  std::vector<double> iterate_;
};

/// A requested computation needs data the caller did not supply
/// (e.g. derivative callables for a gradient-bearing error norm).
class CapabilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace dwdg
