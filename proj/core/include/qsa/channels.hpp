#pragma once

#include <cstddef>
#include <vector>

#include "qsa/qstate.hpp"

namespace qsa {

/// Quantum channel in Kraus form, rho -> sum_a s_a K_a rho K_a^dagger.
///
/// Channels built through the public constructor are validated: trace
/// preservation (sum K^dagger K = I within 1e-10) and complete positivity
/// (Choi matrix PSD within -1e-9). Every sign s_a is then +1.
/// `Channel::unchecked` skips validation and admits signed terms, which is how
/// a Hermiticity-preserving but not completely positive map can be expressed.
class Channel {
 public:
  Channel(std::size_t dim_in, std::size_t dim_out, std::vector<ComplexMatrix> kraus);

  static Channel unchecked(std::size_t dim_in, std::size_t dim_out, std::vector<ComplexMatrix> kraus,
                           std::vector<double> signs = {});
  static Channel identity(std::size_t dim);

  std::size_t dim_in() const { return dim_in_; }
  std::size_t dim_out() const { return dim_out_; }
  const std::vector<ComplexMatrix>& kraus() const { return kraus_; }
  const std::vector<double>& signs() const { return signs_; }
  bool validated() const { return validated_; }

  /// Action on an arbitrary dim_in x dim_in operator.
  ComplexMatrix apply(const ComplexMatrix& x) const;
  /// Heisenberg-picture action sum_a s_a K_a^dagger Y K_a.
  ComplexMatrix apply_adjoint(const ComplexMatrix& y) const;

 private:
  friend Channel tensor_channels(const Channel& a, const Channel& b);

  Channel() = default;
  void check_shapes() const;

  std::size_t dim_in_ = 0;
  std::size_t dim_out_ = 0;
  std::vector<ComplexMatrix> kraus_;
  std::vector<double> signs_;
  bool validated_ = false;
};

/// Depolarizing channel rho -> (1 - p) rho + (p / d) I on a d-dimensional space.
/// Completely positive exactly for 0 <= p <= d^2 / (d^2 - 1).
struct DepolarizingParams {
  std::size_t dim = 2;
  double p = 0.0;

  static double max_p(std::size_t dim);
  /// Throws POutOfRange if p lies outside [0, d^2/(d^2-1)] and
  /// DimensionMismatch for d < 2.
  void validate() const;
};

/// Shift-phase (Weyl) unitary X^a Z^b with X|j> = |j+1 mod d>, Z|j> = w^j |j>.
ComplexMatrix weyl_operator(std::size_t dim, std::size_t a, std::size_t b);

/// Kraus family over the d^2 Weyl unitaries: weight sqrt(1 - p (d^2-1)/d^2)
/// on the identity and sqrt(p)/d on every other W_{a,b}. Operator (a, b) sits
/// at index a * d + b.
Channel depolarizing_channel(const DepolarizingParams& params);

/// Same construction without range checks. For p above d^2/(d^2-1) the
/// identity term enters with a negative sign, so the map stays trace
/// preserving but is no longer completely positive.
Channel depolarizing_channel_unchecked(std::size_t dim, double p);

/// Random channel from a Haar isometry K -> K (x) E (Stinespring dilation).
Channel random_kraus_channel(std::size_t dim, std::size_t env_dim, RngSeed seed);

/// Channel with Kraus operators {K_i (x) L_j}.
Channel tensor_channels(const Channel& a, const Channel& b);

DensityMatrix apply_channel(const Channel& ch, const DensityMatrix& rho);

/// (Phi (x) id)(|Omega><Omega|), |Omega> = sum_i |ii> / sqrt(d_in).
ComplexMatrix choi_matrix(const Channel& ch);

double min_choi_eigenvalue(const Channel& ch);

/// max entry of |sum_a s_a K_a^dagger K_a - I|.
double trace_preservation_error(const Channel& ch);

/// (Phi_H (x) Phi_K)(rho), computed factor by factor rather than through the
/// tensored Kraus list.
DensityMatrix apply_product_channel(const Channel& ch_h, const Channel& ch_k, const DensityMatrix& rho,
                                    const BipartiteDims& dims);

/// True iff the channel maps I/d to I/d within 1e-10.
bool is_bistochastic(const Channel& ch);

}  // namespace qsa
