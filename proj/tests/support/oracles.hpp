#pragma once

// Reference computations used only by the tests. They deliberately avoid the
// library's own code paths: index loops instead of block arithmetic, the
// general (non-Hermitian) eigensolver instead of sorted_eigen, and explicit
// affine formulas instead of Kraus sums.

#include <cstddef>
#include <functional>
#include <vector>

#include "qsa/qstate.hpp"

namespace qsa_test {

using qsa::ComplexMatrix;
using qsa::cplx;

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

/// Sum over i of <i|_H rho |i>_H, written as a double loop over indices.
ComplexMatrix trace_out_h(const ComplexMatrix& rho, std::size_t dh, std::size_t dk);
ComplexMatrix trace_out_k(const ComplexMatrix& rho, std::size_t dh, std::size_t dk);

/// (1 - p) x + (p / d) Tr(x) I.
ComplexMatrix depolarize(const ComplexMatrix& x, double p);

/// (Phi_dep (x) Psi)(rho) via the affine form
///   (1 - p)(I (x) Psi)(rho) + p (I_d / d) (x) Psi(Tr_H rho).
ComplexMatrix depolarize_h_then(const ComplexMatrix& rho, std::size_t dh, std::size_t dk, double p,
                                const std::function<ComplexMatrix(const ComplexMatrix&)>& psi);

/// -sum lambda ln lambda from the general complex eigensolver.
double entropy(const ComplexMatrix& m);

/// Entropy of the spectrum {1 - (d-1)p/d, p/d, ..., p/d}.
double depolarized_spectrum_entropy(std::size_t d, double p);

double min_eigenvalue(const ComplexMatrix& hermitian);

/// Qubit density matrix (I + n.sigma)/2 for a Bloch vector n.
ComplexMatrix bloch_state(double x, double y, double z);

/// Minimum of w1 S(phi(psi1)) + w2 S(phi(psi2)) over two-member pure
/// decompositions of the qubit state rho. psi1 runs over a (theta, phi) grid
/// with the given step; psi2 is where the chord from psi1 through rho meets
/// the sphere again.
double bloch_grid_hhat(const std::function<ComplexMatrix(const ComplexMatrix&)>& channel,
                       const ComplexMatrix& rho, double step);

/// Kraus pair {diag(1, sqrt(1-g)), sqrt(g)|0><1|}.
std::vector<ComplexMatrix> amplitude_damping(double gamma);

}  // namespace qsa_test
