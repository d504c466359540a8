#include "qsa/qstate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

namespace qsa {

RngSeed derive_seed(RngSeed base, std::uint64_t stream) {
  std::uint64_t z = base.value + (stream + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return RngSeed{z ^ (z >> 31)};
}

BipartiteDims::BipartiteDims(std::size_t dim_h, std::size_t dim_k) : dim_h_(dim_h), dim_k_(dim_k) {
  if (dim_h == 0 || dim_k == 0) {
    throw DimensionMismatch("bipartite dimensions must be >= 1");
  }
}

PureState::PureState(ComplexVector amplitudes) : amps_(std::move(amplitudes)) {
  if (amps_.size() == 0 || std::abs(amps_.norm() - 1.0) > tol::kPureNorm) {
    throw NotAPureState("pure state amplitudes must have unit norm");
  }
}

PureState PureState::normalized(const ComplexVector& v) {
  const double n = v.norm();
  if (!(n > 0.0)) {
    throw NotAPureState("cannot normalize a zero vector");
  }
  return PureState(v / n);
}

double max_abs(const ComplexMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

DensityMatrix::DensityMatrix(const ComplexMatrix& m) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw NotADensityMatrix("density matrix must be square and non-empty");
  }
  const double herm_err = max_abs(m - m.adjoint());
  if (herm_err > tol::kHermitian) {
    throw NotADensityMatrix("matrix is not Hermitian (deviation " + std::to_string(herm_err) + ")");
  }
  m_ = 0.5 * (m + m.adjoint());
  const double tr = m_.trace().real();
  if (std::abs(tr - 1.0) > tol::kTrace) {
    throw NotADensityMatrix("trace " + std::to_string(tr) + " differs from 1");
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m_, Eigen::EigenvaluesOnly);
  const double min_eig = es.eigenvalues().minCoeff();
  if (min_eig < -tol::kPsdPerDim * static_cast<double>(m_.rows())) {
    throw NotADensityMatrix("matrix is not positive semidefinite (min eigenvalue " +
                            std::to_string(min_eig) + ")");
  }
}

DensityMatrix DensityMatrix::maximally_mixed(std::size_t dim) {
  const auto n = static_cast<Eigen::Index>(dim);
  return DensityMatrix(ComplexMatrix::Identity(n, n) / static_cast<double>(dim));
}

DensityMatrix DensityMatrix::from_pure(const PureState& psi) { return DensityMatrix(psi.projector()); }

DensityMatrix DensityMatrix::normalized(const ComplexMatrix& m) {
  const double tr = m.trace().real();
  if (!(tr > 0.0)) {
    throw NotADensityMatrix("cannot normalize an operator with non-positive trace");
  }
  return DensityMatrix(m / tr);
}

OrthonormalBasis::OrthonormalBasis(ComplexMatrix columns) : u_(std::move(columns)) {
  if (u_.rows() != u_.cols() || u_.rows() == 0) {
    throw NotOrthonormal("basis must hold d vectors of dimension d");
  }
  const auto n = u_.rows();
  if (max_abs(u_.adjoint() * u_ - ComplexMatrix::Identity(n, n)) > tol::kGram) {
    throw NotOrthonormal("basis vectors are not orthonormal");
  }
}

ComplexMatrix tensor_product(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

ComplexMatrix partial_trace_op(const ComplexMatrix& x, const BipartiteDims& dims, TraceOut side) {
  const auto dh = static_cast<Eigen::Index>(dims.dim_h());
  const auto dk = static_cast<Eigen::Index>(dims.dim_k());
  if (x.rows() != dh * dk || x.cols() != dh * dk) {
    throw DimensionMismatch("operator dimension " + std::to_string(x.rows()) + " does not match " +
                            std::to_string(dh) + " x " + std::to_string(dk));
  }
  if (side == TraceOut::H) {
    ComplexMatrix out = ComplexMatrix::Zero(dk, dk);
    for (Eigen::Index i = 0; i < dh; ++i) {
      out += x.block(i * dk, i * dk, dk, dk);
    }
    return out;
  }
  ComplexMatrix out(dh, dh);
  for (Eigen::Index i = 0; i < dh; ++i) {
    for (Eigen::Index j = 0; j < dh; ++j) {
      out(i, j) = x.block(i * dk, j * dk, dk, dk).trace();
    }
  }
  return out;
}

DensityMatrix partial_trace(const DensityMatrix& rho, const BipartiteDims& dims, TraceOut side) {
  return DensityMatrix(partial_trace_op(rho.matrix(), dims, side));
}

double spectrum_entropy(std::span<const double> probs) {
  double s = 0.0;
  for (double p : probs) {
    if (p > tol::kEntropyFloor) s -= p * std::log(p);
  }
  return s;
}

double hermitian_entropy(const ComplexMatrix& m) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd& ev = es.eigenvalues();
  return spectrum_entropy(std::span<const double>(ev.data(), static_cast<std::size_t>(ev.size())));
}

double von_neumann_entropy(const DensityMatrix& rho) {
  const double s = hermitian_entropy(rho.matrix());
  return std::clamp(s, 0.0, std::log(static_cast<double>(rho.dim())));
}

ComplexMatrix ginibre(std::size_t rows, std::size_t cols, Rng& rng) {
  std::normal_distribution<double> normal(0.0, std::numbers::sqrt2 / 2.0);
  ComplexMatrix g(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  // Column-major fill order is part of the determinism contract.
  for (Eigen::Index j = 0; j < g.cols(); ++j) {
    for (Eigen::Index i = 0; i < g.rows(); ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      g(i, j) = cplx(re, im);
    }
  }
  return g;
}

DensityMatrix random_density(std::size_t dim, std::size_t rank, RngSeed seed) {
  if (rank < 1 || rank > dim) {
    throw BadRank("rank " + std::to_string(rank) + " outside [1, " + std::to_string(dim) + "]");
  }
  Rng rng = make_rng(seed);
  const ComplexMatrix g = ginibre(dim, rank, rng);
  return DensityMatrix::normalized(g * g.adjoint());
}

ComplexMatrix random_unitary(std::size_t dim, RngSeed seed) {
  if (dim == 0) {
    throw DimensionMismatch("unitary dimension must be >= 1");
  }
  Rng rng = make_rng(seed);
  const ComplexMatrix z = ginibre(dim, dim, rng);
  Eigen::HouseholderQR<ComplexMatrix> qr(z);
  const auto n = static_cast<Eigen::Index>(dim);
  ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(n, n);
  const ComplexMatrix& r = qr.matrixQR();
  for (Eigen::Index j = 0; j < n; ++j) {
    const cplx d = r(j, j);
    const double a = std::abs(d);
    q.col(j) *= (a > 0.0 ? d / a : cplx(1.0, 0.0));
  }
  return q;
}

ComplexMatrix random_isometry(std::size_t rows, std::size_t cols, RngSeed seed) {
  if (cols > rows) {
    throw NotAnIsometry("isometry needs cols <= rows");
  }
  return random_unitary(rows, seed).leftCols(static_cast<Eigen::Index>(cols));
}

PureState random_pure_state(std::size_t dim, RngSeed seed) {
  Rng rng = make_rng(seed);
  return PureState::normalized(ginibre(dim, 1, rng).col(0));
}

SortedEigen sorted_eigen(const ComplexMatrix& hermitian) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian);
  const Eigen::Index n = hermitian.rows();
  ComplexMatrix vecs = es.eigenvectors();

  // Fix the global phase of each eigenvector: first significant entry real positive.
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double a = std::abs(vecs(i, j));
      if (a > 1e-8) {
        vecs.col(j) *= std::conj(vecs(i, j)) / a;
        break;
      }
    }
  }

  auto rounded = [](double x, double grid) { return std::llround(x / grid); };
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  const Eigen::VectorXd& ev = es.eigenvalues();
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    const auto la = rounded(ev(a), 1e-12);
    const auto lb = rounded(ev(b), 1e-12);
    if (la != lb) return la > lb;
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto ra = std::pair(rounded(vecs(i, a).real(), 1e-9), rounded(vecs(i, a).imag(), 1e-9));
      const auto rb = std::pair(rounded(vecs(i, b).real(), 1e-9), rounded(vecs(i, b).imag(), 1e-9));
      if (ra != rb) return ra > rb;
    }
    return false;
  });

  SortedEigen out{Eigen::VectorXd(n), ComplexMatrix(n, n)};
  for (Eigen::Index j = 0; j < n; ++j) {
    out.values(j) = ev(order[static_cast<std::size_t>(j)]);
    out.vectors.col(j) = vecs.col(order[static_cast<std::size_t>(j)]);
  }
  return out;
}

ComplexMatrix fourier_matrix(std::size_t dim) {
  const auto n = static_cast<Eigen::Index>(dim);
  ComplexMatrix f(n, n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(dim));
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index k = 0; k < n; ++k) {
      // Reduce jk mod d first so the phase argument stays exact for large indices.
      const double angle = 2.0 * std::numbers::pi * static_cast<double>((j * k) % n) / static_cast<double>(dim);
      f(j, k) = std::polar(scale, angle);
    }
  }
  return f;
}

OrthonormalBasis balanced_basis(const DensityMatrix& a, std::optional<RngSeed> phase_seed) {
  const std::size_t d = a.dim();
  const auto n = static_cast<Eigen::Index>(d);
  ComplexMatrix u = sorted_eigen(a.matrix()).vectors;
  const ComplexMatrix f = fourier_matrix(d);
  if (!phase_seed) {
    return OrthonormalBasis(u * f);
  }
  Rng rng = make_rng(*phase_seed);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  Eigen::VectorXcd d1(n);
  Eigen::VectorXcd d2(n);
  for (Eigen::Index i = 0; i < n; ++i) d1(i) = std::polar(1.0, angle(rng));
  for (Eigen::Index i = 0; i < n; ++i) d2(i) = std::polar(1.0, angle(rng));
  return OrthonormalBasis(u * d1.asDiagonal() * f * d2.asDiagonal());
}

}  // namespace qsa
