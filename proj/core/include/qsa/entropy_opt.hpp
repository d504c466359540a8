#pragma once

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

#include "qsa/channels.hpp"
#include "qsa/qstate.hpp"

namespace qsa {

/// Probability weights pi_j with states rho_j of a common dimension.
class Ensemble {
 public:
  /// Throws InvalidEnsemble unless weights are nonnegative, sum to 1 within
  /// 1e-10 and match the member count.
  Ensemble(std::vector<double> weights, std::vector<DensityMatrix> members);

  std::size_t size() const { return weights_.size(); }
  std::size_t dim() const { return members_.front().dim(); }
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<DensityMatrix>& members() const { return members_; }

  ComplexMatrix average_matrix() const;
  DensityMatrix average() const { return DensityMatrix(average_matrix()); }

 private:
  std::vector<double> weights_;
  std::vector<DensityMatrix> members_;
};

struct OptimizerConfig {
  std::size_t restarts = 32;
  std::size_t max_iters = 2000;
  double value_tol = 1e-7;
  double step_tol = 1e-10;
  /// Number of ensemble members k. Zero selects d^2 for a d-dimensional input.
  std::size_t ensemble_cap = 0;
  RngSeed seed{0};

  /// Throws InvalidConfig naming the offending field.
  void validate() const;
};

struct OptResult {
  double value = 0.0;
  std::variant<PureState, Ensemble> argmin;
  std::size_t restarts_used = 0;
  bool converged = false;
  std::size_t best_restart_index = 0;
};

/// S(Phi(rho)) in nats.
double output_entropy(const Channel& ch, const DensityMatrix& rho);

/// sum_j pi_j S(Phi(rho_j)).
double ensemble_output_entropy(const Channel& ch, const Ensemble& ensemble);

/// Multi-start local minimization of S(Phi(|psi><psi|)) over unit vectors.
///
/// Restarts draw Haar-random starting vectors from seeds derived from
/// cfg.seed and the restart index. The search stops early once at least
/// min(restarts, 4) restarts have run and the two best values agree within
/// value_tol; `converged` reports that agreement. The value is an upper bound
/// on the true minimum.
OptResult s_min_numeric(const Channel& ch, const OptimizerConfig& cfg);

/// -(1 - (d-1)p/d) ln(1 - (d-1)p/d) - ((d-1)p/d) ln(p/d), zero at p = 0.
double s_min_dep_closed(const DepolarizingParams& params);

/// Pure-state decomposition of rho induced by a k x r isometry acting on the
/// eigen-ensemble: w_j = sum_i mix_ji sqrt(lambda_i) u_i, pi_j = |w_j|^2.
/// Members with pi_j < 1e-14 are dropped.
Ensemble decompositions_from_isometry(const DensityMatrix& rho, const ComplexMatrix& mix);

/// Inverse of decompositions_from_isometry for an ensemble of pure states
/// averaging to rho; rows beyond the member count are zero.
ComplexMatrix isometry_from_ensemble(const DensityMatrix& rho, const Ensemble& pure_ensemble, std::size_t rows);

/// Minimum of sum_j pi_j S(Phi(rho_j)) over pure decompositions of rho.
///
/// Decompositions are parametrized by k x r isometries (k = ensemble_cap or
/// d^2, r = rank of rho) and refined by L-BFGS on the Stiefel
/// manifold. Restart 0..n-1 use the supplied warm-start ensembles, the next
/// restart starts from the eigen-ensemble and the rest from Haar-random
/// isometries. Early stopping and `converged` follow s_min_numeric.
OptResult h_hat_numeric(const Channel& ch, const DensityMatrix& rho, const OptimizerConfig& cfg,
                        std::span<const Ensemble> warm_starts = {});

/// For the depolarizing channel the constrained minimum equals S_min for
/// every input state, so no state argument is needed.
double h_hat_dep_closed(const DepolarizingParams& params);

}  // namespace qsa
