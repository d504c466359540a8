#pragma once

#include <cstddef>
#include <vector>

#include "qsa/channels.hpp"
#include "qsa/entropy_opt.hpp"
#include "qsa/qstate.hpp"

namespace qsa {

namespace tol {
/// Margins built from exact arithmetic and eigensolves only.
inline constexpr double kExactMargin = 1e-9;
/// Margins that depend on a numerical minimization.
inline constexpr double kOptimizedMargin = 1e-6;
}  // namespace tol

/// One evaluation of the output-entropy lower bound for Phi_dep (x) Psi.
struct LemmaReport {
  double lhs = 0.0;              // S((Phi_dep (x) Psi)(rho))
  double constant_term = 0.0;    // entropy of the depolarized pure-state spectrum
  double conditional_avg = 0.0;  // (1/d) sum_s S(Psi(rho_s))
  double bound = 0.0;            // constant_term + conditional_avg
  double margin = 0.0;           // lhs - bound
  OrthonormalBasis basis_used;
  std::vector<DensityMatrix> rho_s_list;
  double marginal_check = 0.0;   // max entry |(1/d) sum_s rho_s - Tr_H rho|
};

struct SuperaddReport {
  double lhs = 0.0;      // upper bound on H_hat over Phi_dep (x) Psi at rho
  double rhs_dep = 0.0;  // closed form for Phi_dep at Tr_K rho
  double rhs_psi = 0.0;  // upper bound on H_hat over Psi at Tr_H rho
  double margin = 0.0;   // lhs - rhs_dep - rhs_psi

  /// King bound for every member of the best ensemble found for lhs.
  std::vector<LemmaReport> proof_chain;
  std::vector<double> chain_weights;
  /// sum_j pi_j bound_j; never exceeds lhs.
  double chain_bound = 0.0;
  /// (1/d) sum_j pi_j sum_s S(Psi(rho_js)); never below the true H_hat over Psi.
  double chain_psi_average = 0.0;
  /// max entry |(1/d) sum_j pi_j sum_s Psi(rho_js) - Psi(Tr_H rho)|.
  double averaging_identity_error = 0.0;

  bool lhs_converged = false;
  bool rhs_psi_converged = false;
  std::size_t lhs_restarts_used = 0;
  std::size_t rhs_psi_restarts_used = 0;
  bool escalated = false;
  bool product_certificate = false;

  bool consistent(double tolerance = tol::kOptimizedMargin) const { return margin >= -tolerance; }
};

struct AdditivityReport {
  double joint = 0.0;  // numeric S_min of Phi_dep (x) Psi
  double sum = 0.0;    // closed S_min of Phi_dep + numeric S_min of Psi
  double gap = 0.0;    // joint - sum
  bool converged = false;
};

/// rho_s = d Tr_H((|e_s><e_s| (x) I_K) rho) for every basis vector, without
/// normalization.
std::vector<ComplexMatrix> conditional_operators(const ComplexMatrix& rho, const BipartiteDims& dims,
                                                 const OrthonormalBasis& basis);

/// Evaluates the bound
///   S((Phi_dep (x) Psi)(rho)) >= S_min(Phi_dep) + (1/d) sum_s S(Psi(rho_s))
/// on the given basis. Throws BasisNotBalanced when some Tr rho_s differs
/// from 1 by more than 1e-8.
LemmaReport king_bound(const DensityMatrix& rho, const BipartiteDims& dims, const OrthonormalBasis& basis,
                       const Channel& psi, const DepolarizingParams& params);

/// king_bound on n_bases balanced bases of Tr_K rho with random phases drawn
/// from seeds derived from `seed`.
std::vector<LemmaReport> verify_lemma_instance(const DensityMatrix& rho, const BipartiteDims& dims,
                                               const Channel& psi, const DepolarizingParams& params,
                                               std::size_t n_bases, RngSeed seed);

/// Checks H_hat_{Phi_dep (x) Psi}(rho) >= H_hat_{Phi_dep}(Tr_K rho) + H_hat_Psi(Tr_H rho)
/// and replays the proof chain on the best ensemble found for the left side.
///
/// A negative margin beyond 1e-6 triggers one rerun with 4x restarts. For
/// product inputs rho = Tr_K rho (x) Tr_H rho the product of the optimal
/// factor ensembles seeds the left-side search.
SuperaddReport strong_superadd_check(const Channel& psi, const DensityMatrix& rho, const BipartiteDims& dims,
                                     const DepolarizingParams& params, const OptimizerConfig& cfg);

AdditivityReport smin_additivity_check(const Channel& psi, const DepolarizingParams& params,
                                       const OptimizerConfig& cfg);

}  // namespace qsa
