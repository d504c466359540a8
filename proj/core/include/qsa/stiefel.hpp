#pragma once

#include <cstddef>
#include <functional>

#include "qsa/qstate.hpp"

namespace qsa {

/// Smooth objective on the complex Stiefel manifold {V in C^{k x r} : V^dagger V = I}.
///
/// Returns f(V). When `egrad` is non-null it receives the Euclidean gradient G
/// in the convention df = 2 Re tr(G^dagger dV).
using StiefelObjective = std::function<double(const ComplexMatrix& v, ComplexMatrix* egrad)>;

struct LocalSearchOptions {
  std::size_t max_iters = 2000;
  /// Stop once the per-iteration decrease stays below 1e-3 * value_tol for
  /// several consecutive iterations.
  double value_tol = 1e-7;
  /// Stop once a retraction step is shorter than this (Frobenius norm).
  double step_tol = 1e-10;
};

struct LocalSearchResult {
  ComplexMatrix point;
  double value = 0.0;
  std::size_t iterations = 0;
  double grad_norm = 0.0;
};

/// Q factor of a thin QR decomposition with the phases of R's diagonal
/// absorbed, so the map is continuous and returns an isometry.
ComplexMatrix stiefel_retract(const ComplexMatrix& m);

/// Projection of Z onto the tangent space at V: Z - V herm(V^dagger Z).
ComplexMatrix stiefel_project(const ComplexMatrix& v, const ComplexMatrix& z);

/// Limited-memory BFGS with Armijo backtracking on the Stiefel manifold.
/// Curvature pairs are transported by projection and points are retracted
/// with `stiefel_retract`. Every accepted step decreases f.
LocalSearchResult minimize_on_stiefel(const StiefelObjective& f, const ComplexMatrix& start,
                                      const LocalSearchOptions& options);

}  // namespace qsa
