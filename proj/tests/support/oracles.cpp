#include "oracles.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace qsa_test {

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      for (Eigen::Index k = 0; k < b.rows(); ++k)
        for (Eigen::Index l = 0; l < b.cols(); ++l) out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
  return out;
}

ComplexMatrix trace_out_h(const ComplexMatrix& rho, std::size_t dh, std::size_t dk) {
  const auto h = static_cast<Eigen::Index>(dh);
  const auto k = static_cast<Eigen::Index>(dk);
  ComplexMatrix out = ComplexMatrix::Zero(k, k);
  for (Eigen::Index a = 0; a < k; ++a)
    for (Eigen::Index b = 0; b < k; ++b)
      for (Eigen::Index i = 0; i < h; ++i) out(a, b) += rho(i * k + a, i * k + b);
  return out;
}

ComplexMatrix trace_out_k(const ComplexMatrix& rho, std::size_t dh, std::size_t dk) {
  const auto h = static_cast<Eigen::Index>(dh);
  const auto k = static_cast<Eigen::Index>(dk);
  ComplexMatrix out = ComplexMatrix::Zero(h, h);
  for (Eigen::Index i = 0; i < h; ++i)
    for (Eigen::Index j = 0; j < h; ++j)
      for (Eigen::Index a = 0; a < k; ++a) out(i, j) += rho(i * k + a, j * k + a);
  return out;
}

ComplexMatrix depolarize(const ComplexMatrix& x, double p) {
  const auto d = static_cast<double>(x.rows());
  return (1.0 - p) * x + (p / d) * x.trace() * ComplexMatrix::Identity(x.rows(), x.cols());
}

ComplexMatrix depolarize_h_then(const ComplexMatrix& rho, std::size_t dh, std::size_t dk, double p,
                                const std::function<ComplexMatrix(const ComplexMatrix&)>& psi) {
  const auto h = static_cast<Eigen::Index>(dh);
  const auto k = static_cast<Eigen::Index>(dk);
  // (I (x) Psi)(rho): apply Psi to every k x k block.
  ComplexMatrix blockwise(rho.rows(), rho.cols());
  for (Eigen::Index i = 0; i < h; ++i)
    for (Eigen::Index j = 0; j < h; ++j) blockwise.block(i * k, j * k, k, k) = psi(rho.block(i * k, j * k, k, k));
  const ComplexMatrix mixed = ComplexMatrix::Identity(h, h) / static_cast<double>(dh);
  return (1.0 - p) * blockwise + p * kron(mixed, psi(trace_out_h(rho, dh, dk)));
}

double entropy(const ComplexMatrix& m) {
  Eigen::ComplexEigenSolver<ComplexMatrix> es(m, false);
  double s = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double x = es.eigenvalues()(i).real();
    if (x > 1e-300) s -= x * std::log(x);
  }
  return s;
}

double depolarized_spectrum_entropy(std::size_t d, double p) {
  const auto dd = static_cast<double>(d);
  const double top = 1.0 - p + p / dd;
  const double rest = p / dd;
  double s = 0.0;
  if (top > 0.0) s -= top * std::log(top);
  if (rest > 0.0) s -= (dd - 1.0) * rest * std::log(rest);
  return s;
}

double min_eigenvalue(const ComplexMatrix& hermitian) {
  Eigen::ComplexEigenSolver<ComplexMatrix> es(hermitian, false);
  double lo = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) lo = std::min(lo, es.eigenvalues()(i).real());
  return lo;
}

ComplexMatrix bloch_state(double x, double y, double z) {
  ComplexMatrix m(2, 2);
  m << cplx(1.0 + z, 0.0), cplx(x, -y), cplx(x, y), cplx(1.0 - z, 0.0);
  return 0.5 * m;
}

namespace {

// Entropy of a 2x2 Hermitian matrix from its trace and determinant.
double qubit_entropy(const ComplexMatrix& m) {
  const double t = m.trace().real();
  const double det = (m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0)).real();
  const double disc = std::sqrt(std::max(0.0, t * t - 4.0 * det));
  double s = 0.0;
  for (double l : {(t + disc) / 2.0, (t - disc) / 2.0}) {
    if (l > 1e-300) s -= l * std::log(l);
  }
  return s;
}

}  // namespace

double bloch_grid_hhat(const std::function<ComplexMatrix(const ComplexMatrix&)>& channel, const ComplexMatrix& rho,
                       double step) {
  const double rx = 2.0 * rho(1, 0).real();
  const double ry = 2.0 * rho(1, 0).imag();
  const double rz = (rho(0, 0) - rho(1, 1)).real();
  double best = std::numeric_limits<double>::infinity();
  for (double theta = 0.0; theta <= std::numbers::pi + 1e-12; theta += step) {
    for (double phi = 0.0; phi < 2.0 * std::numbers::pi; phi += step) {
      const double ax = std::sin(theta) * std::cos(phi);
      const double ay = std::sin(theta) * std::sin(phi);
      const double az = std::cos(theta);
      // Second point b = a + t (r - a) with |b| = 1 and t > 1.
      const double ux = rx - ax, uy = ry - ay, uz = rz - az;
      const double uu = ux * ux + uy * uy + uz * uz;
      if (uu < 1e-14) {
        best = std::min(best, qubit_entropy(channel(bloch_state(ax, ay, az))));
        continue;
      }
      const double au = ax * ux + ay * uy + az * uz;
      const double t = -2.0 * au / uu;
      if (t <= 1.0) continue;
      const double bx = ax + t * ux, by = ay + t * uy, bz = az + t * uz;
      // r = w_a a + w_b b with w_b = 1/t.
      const double wb = 1.0 / t;
      const double value = (1.0 - wb) * qubit_entropy(channel(bloch_state(ax, ay, az))) +
                           wb * qubit_entropy(channel(bloch_state(bx, by, bz)));
      best = std::min(best, value);
    }
  }
  return best;
}

std::vector<ComplexMatrix> amplitude_damping(double gamma) {
  ComplexMatrix k0 = ComplexMatrix::Zero(2, 2);
  ComplexMatrix k1 = ComplexMatrix::Zero(2, 2);
  k0(0, 0) = 1.0;
  k0(1, 1) = std::sqrt(1.0 - gamma);
  k1(0, 1) = std::sqrt(gamma);
  return {k0, k1};
}

}  // namespace qsa_test
