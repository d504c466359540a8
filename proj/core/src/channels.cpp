#include "qsa/channels.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace qsa {

namespace {

constexpr double kTpTol = 1e-10;
constexpr double kChoiSlack = 1e-9;
constexpr double kBistochasticTol = 1e-10;

}  // namespace

Channel::Channel(std::size_t dim_in, std::size_t dim_out, std::vector<ComplexMatrix> kraus)
    : dim_in_(dim_in), dim_out_(dim_out), kraus_(std::move(kraus)), signs_(kraus_.size(), 1.0) {
  check_shapes();
  const double tp = trace_preservation_error(*this);
  if (tp > kTpTol) {
    throw NotAChannel("Kraus operators are not trace preserving (error " + std::to_string(tp) + ")");
  }
  const double min_eig = min_choi_eigenvalue(*this);
  if (min_eig < -kChoiSlack) {
    throw NotAChannel("Choi matrix is not positive (min eigenvalue " + std::to_string(min_eig) + ")");
  }
  validated_ = true;
}

Channel Channel::unchecked(std::size_t dim_in, std::size_t dim_out, std::vector<ComplexMatrix> kraus,
                           std::vector<double> signs) {
  Channel ch;
  ch.dim_in_ = dim_in;
  ch.dim_out_ = dim_out;
  ch.kraus_ = std::move(kraus);
  ch.signs_ = signs.empty() ? std::vector<double>(ch.kraus_.size(), 1.0) : std::move(signs);
  if (ch.signs_.size() != ch.kraus_.size()) {
    throw DimensionMismatch("one sign per Kraus operator required");
  }
  ch.check_shapes();
  return ch;
}

Channel Channel::identity(std::size_t dim) {
  const auto n = static_cast<Eigen::Index>(dim);
  return Channel(dim, dim, {ComplexMatrix::Identity(n, n)});
}

void Channel::check_shapes() const {
  if (dim_in_ == 0 || dim_out_ == 0 || kraus_.empty()) {
    throw DimensionMismatch("channel needs positive dimensions and at least one Kraus operator");
  }
  for (const auto& k : kraus_) {
    if (k.rows() != static_cast<Eigen::Index>(dim_out_) || k.cols() != static_cast<Eigen::Index>(dim_in_)) {
      throw DimensionMismatch("Kraus operator shape does not match dim_out x dim_in");
    }
  }
}

ComplexMatrix Channel::apply(const ComplexMatrix& x) const {
  if (x.rows() != static_cast<Eigen::Index>(dim_in_) || x.cols() != x.rows()) {
    throw DimensionMismatch("channel input dimension " + std::to_string(dim_in_) + " but operator is " +
                            std::to_string(x.rows()) + " x " + std::to_string(x.cols()));
  }
  const auto n = static_cast<Eigen::Index>(dim_out_);
  ComplexMatrix out = ComplexMatrix::Zero(n, n);
  for (std::size_t a = 0; a < kraus_.size(); ++a) {
    out.noalias() += signs_[a] * (kraus_[a] * x * kraus_[a].adjoint());
  }
  return out;
}

ComplexMatrix Channel::apply_adjoint(const ComplexMatrix& y) const {
  if (y.rows() != static_cast<Eigen::Index>(dim_out_) || y.cols() != y.rows()) {
    throw DimensionMismatch("adjoint channel expects a dim_out x dim_out operator");
  }
  const auto n = static_cast<Eigen::Index>(dim_in_);
  ComplexMatrix out = ComplexMatrix::Zero(n, n);
  for (std::size_t a = 0; a < kraus_.size(); ++a) {
    out.noalias() += signs_[a] * (kraus_[a].adjoint() * y * kraus_[a]);
  }
  return out;
}

double DepolarizingParams::max_p(std::size_t dim) {
  const double d2 = static_cast<double>(dim * dim);
  return d2 / (d2 - 1.0);
}

void DepolarizingParams::validate() const {
  if (dim < 2) {
    throw DimensionMismatch("depolarizing channel needs d >= 2");
  }
  if (!(p >= 0.0 && p <= max_p(dim))) {
    throw POutOfRange("p = " + std::to_string(p) + " outside [0, d^2/(d^2-1)] = [0, " +
                      std::to_string(max_p(dim)) + "] for d = " + std::to_string(dim));
  }
}

ComplexMatrix weyl_operator(std::size_t dim, std::size_t a, std::size_t b) {
  const auto n = static_cast<Eigen::Index>(dim);
  ComplexMatrix w = ComplexMatrix::Zero(n, n);
  for (std::size_t j = 0; j < dim; ++j) {
    const double angle = 2.0 * std::numbers::pi * static_cast<double>((b * j) % dim) / static_cast<double>(dim);
    w(static_cast<Eigen::Index>((j + a) % dim), static_cast<Eigen::Index>(j)) = std::polar(1.0, angle);
  }
  return w;
}

namespace {

// Identity weight 1 - p (d^2 - 1)/d^2 is negative only past the CP boundary.
std::pair<std::vector<ComplexMatrix>, std::vector<double>> depolarizing_kraus(std::size_t dim, double p) {
  const double d = static_cast<double>(dim);
  const double id_weight = 1.0 - p * (d * d - 1.0) / (d * d);
  const double other = std::sqrt(std::max(p, 0.0)) / d;
  std::vector<ComplexMatrix> kraus;
  std::vector<double> signs;
  kraus.reserve(dim * dim);
  for (std::size_t a = 0; a < dim; ++a) {
    for (std::size_t b = 0; b < dim; ++b) {
      if (a == 0 && b == 0) {
        kraus.push_back(std::sqrt(std::abs(id_weight)) * weyl_operator(dim, 0, 0));
        signs.push_back(id_weight < 0.0 ? -1.0 : 1.0);
      } else {
        kraus.push_back(other * weyl_operator(dim, a, b));
        signs.push_back(1.0);
      }
    }
  }
  return {std::move(kraus), std::move(signs)};
}

}  // namespace

Channel depolarizing_channel(const DepolarizingParams& params) {
  params.validate();
  auto [kraus, signs] = depolarizing_kraus(params.dim, params.p);
  return Channel(params.dim, params.dim, std::move(kraus));
}

Channel depolarizing_channel_unchecked(std::size_t dim, double p) {
  auto [kraus, signs] = depolarizing_kraus(dim, p);
  return Channel::unchecked(dim, dim, std::move(kraus), std::move(signs));
}

Channel random_kraus_channel(std::size_t dim, std::size_t env_dim, RngSeed seed) {
  if (dim == 0 || env_dim == 0) {
    throw DimensionMismatch("random channel needs positive dimensions");
  }
  // Rows of the isometry are indexed (output i, environment e) -> i * env + e.
  const ComplexMatrix v = random_isometry(dim * env_dim, dim, seed);
  const auto n = static_cast<Eigen::Index>(dim);
  const auto m = static_cast<Eigen::Index>(env_dim);
  std::vector<ComplexMatrix> kraus;
  kraus.reserve(env_dim);
  for (Eigen::Index e = 0; e < m; ++e) {
    ComplexMatrix k(n, n);
    for (Eigen::Index i = 0; i < n; ++i) k.row(i) = v.row(i * m + e);
    kraus.push_back(std::move(k));
  }
  return Channel(dim, dim, std::move(kraus));
}

Channel tensor_channels(const Channel& a, const Channel& b) {
  std::vector<ComplexMatrix> kraus;
  std::vector<double> signs;
  kraus.reserve(a.kraus().size() * b.kraus().size());
  for (std::size_t i = 0; i < a.kraus().size(); ++i) {
    for (std::size_t j = 0; j < b.kraus().size(); ++j) {
      kraus.push_back(tensor_product(a.kraus()[i], b.kraus()[j]));
      signs.push_back(a.signs()[i] * b.signs()[j]);
    }
  }
  const std::size_t din = a.dim_in() * b.dim_in();
  const std::size_t dout = a.dim_out() * b.dim_out();
  Channel out = Channel::unchecked(din, dout, std::move(kraus), std::move(signs));
  // A tensor product of CPTP maps is CPTP, so the Choi check can be skipped.
  out.validated_ = a.validated() && b.validated();
  return out;
}

DensityMatrix apply_channel(const Channel& ch, const DensityMatrix& rho) {
  return DensityMatrix(ch.apply(rho.matrix()));
}

ComplexMatrix choi_matrix(const Channel& ch) {
  const auto din = static_cast<Eigen::Index>(ch.dim_in());
  const auto dout = static_cast<Eigen::Index>(ch.dim_out());
  ComplexMatrix choi = ComplexMatrix::Zero(dout * din, dout * din);
  // Block (i, j) of the Choi matrix is Phi(|i><j|) / d_in.
  for (Eigen::Index i = 0; i < din; ++i) {
    for (Eigen::Index j = 0; j < din; ++j) {
      ComplexMatrix unit = ComplexMatrix::Zero(din, din);
      unit(i, j) = 1.0;
      const ComplexMatrix out = ch.apply(unit) / static_cast<double>(din);
      for (Eigen::Index r = 0; r < dout; ++r) {
        for (Eigen::Index c = 0; c < dout; ++c) {
          choi(r * din + i, c * din + j) = out(r, c);
        }
      }
    }
  }
  return choi;
}

double min_choi_eigenvalue(const Channel& ch) {
  const ComplexMatrix c = choi_matrix(ch);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (c + c.adjoint()), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double trace_preservation_error(const Channel& ch) {
  const auto n = static_cast<Eigen::Index>(ch.dim_in());
  ComplexMatrix sum = ComplexMatrix::Zero(n, n);
  for (std::size_t a = 0; a < ch.kraus().size(); ++a) {
    sum.noalias() += ch.signs()[a] * (ch.kraus()[a].adjoint() * ch.kraus()[a]);
  }
  return max_abs(sum - ComplexMatrix::Identity(n, n));
}

DensityMatrix apply_product_channel(const Channel& ch_h, const Channel& ch_k, const DensityMatrix& rho,
                                    const BipartiteDims& dims) {
  if (ch_h.dim_in() != dims.dim_h() || ch_k.dim_in() != dims.dim_k() || rho.dim() != dims.total()) {
    throw DimensionMismatch("product channel dimensions do not match the bipartite state");
  }
  const auto dh = static_cast<Eigen::Index>(dims.dim_h());
  const auto dk = static_cast<Eigen::Index>(dims.dim_k());
  const auto dk_out = static_cast<Eigen::Index>(ch_k.dim_out());
  const auto dh_out = static_cast<Eigen::Index>(ch_h.dim_out());

  // Stage 1: id (x) Psi acts on every d_K x d_K block of rho.
  ComplexMatrix mid(dh * dk_out, dh * dk_out);
  for (Eigen::Index i = 0; i < dh; ++i) {
    for (Eigen::Index j = 0; j < dh; ++j) {
      const ComplexMatrix blk = rho.matrix().block(i * dk, j * dk, dk, dk);
      ComplexMatrix out = ComplexMatrix::Zero(dk_out, dk_out);
      for (std::size_t b = 0; b < ch_k.kraus().size(); ++b) {
        out.noalias() += ch_k.signs()[b] * (ch_k.kraus()[b] * blk * ch_k.kraus()[b].adjoint());
      }
      mid.block(i * dk_out, j * dk_out, dk_out, dk_out) = out;
    }
  }

  // Stage 2: Phi (x) id mixes blocks: block (r, c) = sum_a sum_{ij} K_a(r,i) mid_ij conj(K_a(c,j)).
  ComplexMatrix result = ComplexMatrix::Zero(dh_out * dk_out, dh_out * dk_out);
  for (std::size_t a = 0; a < ch_h.kraus().size(); ++a) {
    const ComplexMatrix& k = ch_h.kraus()[a];
    const double s = ch_h.signs()[a];
    for (Eigen::Index r = 0; r < dh_out; ++r) {
      for (Eigen::Index c = 0; c < dh_out; ++c) {
        ComplexMatrix acc = ComplexMatrix::Zero(dk_out, dk_out);
        for (Eigen::Index i = 0; i < dh; ++i) {
          if (k(r, i) == cplx(0.0)) continue;
          for (Eigen::Index j = 0; j < dh; ++j) {
            const cplx coeff = k(r, i) * std::conj(k(c, j));
            if (coeff == cplx(0.0)) continue;
            acc += coeff * mid.block(i * dk_out, j * dk_out, dk_out, dk_out);
          }
        }
        result.block(r * dk_out, c * dk_out, dk_out, dk_out) += s * acc;
      }
    }
  }
  return DensityMatrix(result);
}

bool is_bistochastic(const Channel& ch) {
  if (ch.dim_in() != ch.dim_out()) {
    throw DimensionMismatch("bistochastic check needs dim_in == dim_out");
  }
  const auto n = static_cast<Eigen::Index>(ch.dim_in());
  const ComplexMatrix mixed = ComplexMatrix::Identity(n, n) / static_cast<double>(n);
  return max_abs(ch.apply(mixed) - mixed) <= kBistochasticTol;
}

}  // namespace qsa
