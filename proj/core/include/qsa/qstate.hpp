#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "qsa/errors.hpp"

namespace qsa {

using cplx = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

namespace tol {
inline constexpr double kHermitian = 1e-10;
inline constexpr double kTrace = 1e-10;
// PSD slack is scaled by the dimension: min eigenvalue >= -kPsdPerDim * d.
inline constexpr double kPsdPerDim = 1e-10;
inline constexpr double kEntropyFloor = 1e-15;
inline constexpr double kPureNorm = 1e-12;
inline constexpr double kGram = 1e-10;
}  // namespace tol

/// Seed for every stochastic routine. Identical seeds give identical samples.
struct RngSeed {
  std::uint64_t value = 0;
  friend bool operator==(RngSeed, RngSeed) = default;
};

/// Deterministically derives an independent child seed (splitmix64 mixing).
RngSeed derive_seed(RngSeed base, std::uint64_t stream);

using Rng = std::mt19937_64;
inline Rng make_rng(RngSeed seed) { return Rng(seed.value); }

/// Dimensions of H (left factor) and K (right factor) of a bipartite space.
class BipartiteDims {
 public:
  BipartiteDims(std::size_t dim_h, std::size_t dim_k);

  std::size_t dim_h() const { return dim_h_; }
  std::size_t dim_k() const { return dim_k_; }
  std::size_t total() const { return dim_h_ * dim_k_; }

 private:
  std::size_t dim_h_;
  std::size_t dim_k_;
};

class PureState {
 public:
  /// Throws NotAPureState unless the vector has unit norm within 1e-12.
  explicit PureState(ComplexVector amplitudes);
  /// Rescales a nonzero vector to unit norm.
  static PureState normalized(const ComplexVector& v);

  std::size_t dim() const { return static_cast<std::size_t>(amps_.size()); }
  const ComplexVector& amplitudes() const { return amps_; }
  ComplexMatrix projector() const { return amps_ * amps_.adjoint(); }

 private:
  ComplexVector amps_;
};

/// Hermitian, positive semidefinite, unit-trace operator.
///
/// The invariants are checked on construction (Hermiticity and trace to 1e-10,
/// smallest eigenvalue >= -1e-10 * d). The stored matrix is the Hermitian
/// part of the input, so round-off asymmetry never propagates.
class DensityMatrix {
 public:
  explicit DensityMatrix(const ComplexMatrix& m);

  static DensityMatrix maximally_mixed(std::size_t dim);
  static DensityMatrix from_pure(const PureState& psi);
  /// Builds a state from a PSD operator with positive trace by dividing out
  /// the trace.
  static DensityMatrix normalized(const ComplexMatrix& m);

  std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }
  const ComplexMatrix& matrix() const { return m_; }

 private:
  ComplexMatrix m_;
};

/// d unit vectors stored as the columns of a d x d unitary.
class OrthonormalBasis {
 public:
  explicit OrthonormalBasis(ComplexMatrix columns);

  std::size_t dim() const { return static_cast<std::size_t>(u_.rows()); }
  const ComplexMatrix& unitary() const { return u_; }
  ComplexVector vector(std::size_t s) const { return u_.col(static_cast<Eigen::Index>(s)); }

 private:
  ComplexMatrix u_;
};

enum class TraceOut { H, K };

ComplexMatrix tensor_product(const ComplexMatrix& a, const ComplexMatrix& b);

/// Partial trace of an arbitrary operator on H (x) K. No state validation.
ComplexMatrix partial_trace_op(const ComplexMatrix& x, const BipartiteDims& dims, TraceOut side);

/// Tr_H(rho) (a d_K x d_K state) or Tr_K(rho) (a d x d state).
DensityMatrix partial_trace(const DensityMatrix& rho, const BipartiteDims& dims, TraceOut side);

/// Shannon entropy in nats of a probability vector; entries below 1e-15 are
/// treated as zero.
double spectrum_entropy(std::span<const double> probs);

/// Entropy in nats of a Hermitian PSD matrix, without validating it.
double hermitian_entropy(const ComplexMatrix& m);

/// S(rho) = -Tr rho ln rho in nats, clamped to [0, ln d].
double von_neumann_entropy(const DensityMatrix& rho);

/// Max-entry norm, the distance used by every tolerance check in this library.
double max_abs(const ComplexMatrix& m);

/// Matrix of i.i.d. standard complex Gaussians (E|z|^2 = 1).
ComplexMatrix ginibre(std::size_t rows, std::size_t cols, Rng& rng);

/// G G^dagger / Tr(G G^dagger), G a dim x rank Ginibre matrix.
DensityMatrix random_density(std::size_t dim, std::size_t rank, RngSeed seed);

/// Haar-random unitary via QR of a Ginibre matrix with phase-fixed R diagonal.
ComplexMatrix random_unitary(std::size_t dim, RngSeed seed);

/// First `cols` columns of a Haar unitary.
ComplexMatrix random_isometry(std::size_t rows, std::size_t cols, RngSeed seed);

PureState random_pure_state(std::size_t dim, RngSeed seed);

/// Eigen-decomposition sorted by descending eigenvalue. Ties are broken by a
/// lexicographic comparison of the rounded, phase-fixed eigenvectors.
struct SortedEigen {
  Eigen::VectorXd values;
  ComplexMatrix vectors;
};
SortedEigen sorted_eigen(const ComplexMatrix& hermitian);

/// The d-point discrete Fourier matrix F_{jk} = exp(2 pi i jk/d) / sqrt(d).
ComplexMatrix fourier_matrix(std::size_t dim);

/// Orthonormal basis {e_s} with <e_s|a|e_s> = 1/d for every s.
///
/// Built as U * D1 * F * D2 where U is the sorted eigenbasis of `a`, F the
/// Fourier matrix, and D1, D2 diagonal phase unitaries drawn from
/// `phase_seed` (identity when no seed is given). For every Fourier column the
/// diagonal entry is the mean of the eigenvalues of `a`, which is 1/d.
OrthonormalBasis balanced_basis(const DensityMatrix& a, std::optional<RngSeed> phase_seed = std::nullopt);

}  // namespace qsa
