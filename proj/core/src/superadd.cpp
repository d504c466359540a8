#include "qsa/superadd.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace qsa {

namespace {

constexpr double kBalancedTol = 1e-8;
constexpr double kProductTol = 1e-12;
constexpr std::size_t kEscalationFactor = 4;

void check_dims(const DensityMatrix& rho, const BipartiteDims& dims, const Channel& psi,
                const DepolarizingParams& params) {
  if (rho.dim() != dims.total()) {
    throw DimensionMismatch("state dimension " + std::to_string(rho.dim()) + " != " +
                            std::to_string(dims.dim_h()) + " x " + std::to_string(dims.dim_k()));
  }
  if (psi.dim_in() != dims.dim_k() || psi.dim_out() != dims.dim_k()) {
    throw DimensionMismatch("Psi must act on the " + std::to_string(dims.dim_k()) + "-dimensional factor K");
  }
  if (params.dim != dims.dim_h()) {
    throw DimensionMismatch("depolarizing dimension " + std::to_string(params.dim) + " != dim H " +
                            std::to_string(dims.dim_h()));
  }
}

double depolarized_pure_entropy(const DepolarizingParams& params) {
  const double d = static_cast<double>(params.dim);
  std::vector<double> spectrum(params.dim, params.p / d);
  spectrum[0] = 1.0 - (d - 1.0) * params.p / d;
  return spectrum_entropy(spectrum);
}

std::vector<Ensemble> product_certificate(const DensityMatrix& rho_h, const OptResult& psi_result) {
  const auto* psi_ensemble = std::get_if<Ensemble>(&psi_result.argmin);
  if (!psi_ensemble) return {};
  const SortedEigen eig = sorted_eigen(rho_h.matrix());
  std::vector<double> weights;
  std::vector<DensityMatrix> members;
  for (Eigen::Index a = 0; a < eig.values.size(); ++a) {
    if (eig.values(a) <= 1e-12) continue;
    const PureState left = PureState::normalized(eig.vectors.col(a));
    for (std::size_t b = 0; b < psi_ensemble->size(); ++b) {
      const ComplexMatrix& m = psi_ensemble->members()[b].matrix();
      const SortedEigen mb = sorted_eigen(m);
      if (mb.values.size() > 1 && mb.values(1) > 1e-9) return {};
      const PureState right = PureState::normalized(mb.vectors.col(0));
      ComplexVector joint(left.dim() * right.dim());
      for (Eigen::Index i = 0; i < left.amplitudes().size(); ++i) {
        joint.segment(i * right.amplitudes().size(), right.amplitudes().size()) =
            left.amplitudes()(i) * right.amplitudes();
      }
      weights.push_back(eig.values(a) * psi_ensemble->weights()[b]);
      members.push_back(DensityMatrix::from_pure(PureState::normalized(joint)));
    }
  }
  double total = 0.0;
  for (double w : weights) total += w;
  for (double& w : weights) w /= total;
  return {Ensemble(std::move(weights), std::move(members))};
}

}  // namespace

std::vector<ComplexMatrix> conditional_operators(const ComplexMatrix& rho, const BipartiteDims& dims,
                                                 const OrthonormalBasis& basis) {
  if (basis.dim() != dims.dim_h()) {
    throw DimensionMismatch("basis dimension must equal dim H");
  }
  if (rho.rows() != static_cast<Eigen::Index>(dims.total())) {
    throw DimensionMismatch("operator dimension does not match the bipartite dimensions");
  }
  const auto dh = static_cast<Eigen::Index>(dims.dim_h());
  const auto dk = static_cast<Eigen::Index>(dims.dim_k());
  std::vector<ComplexMatrix> out;
  out.reserve(dims.dim_h());
  for (Eigen::Index s = 0; s < dh; ++s) {
    const ComplexVector e = basis.unitary().col(s);
    ComplexMatrix acc = ComplexMatrix::Zero(dk, dk);
    for (Eigen::Index i = 0; i < dh; ++i) {
      for (Eigen::Index j = 0; j < dh; ++j) {
        acc += std::conj(e(i)) * e(j) * rho.block(i * dk, j * dk, dk, dk);
      }
    }
    out.push_back(static_cast<double>(dh) * acc);
  }
  return out;
}

LemmaReport king_bound(const DensityMatrix& rho, const BipartiteDims& dims, const OrthonormalBasis& basis,
                       const Channel& psi, const DepolarizingParams& params) {
  check_dims(rho, dims, psi, params);
  const Channel dep = depolarizing_channel(params);
  const double d = static_cast<double>(dims.dim_h());

  const std::vector<ComplexMatrix> conditional = conditional_operators(rho.matrix(), dims, basis);
  std::vector<DensityMatrix> rho_s;
  rho_s.reserve(conditional.size());
  ComplexMatrix avg = ComplexMatrix::Zero(conditional.front().rows(), conditional.front().cols());
  double conditional_avg = 0.0;
  for (std::size_t s = 0; s < conditional.size(); ++s) {
    const double tr = conditional[s].trace().real();
    if (std::abs(tr - 1.0) > kBalancedTol) {
      throw BasisNotBalanced("Tr rho_s = " + std::to_string(tr) + " for s = " + std::to_string(s));
    }
    avg += conditional[s] / d;
    rho_s.push_back(DensityMatrix::normalized(conditional[s]));
    conditional_avg += output_entropy(psi, rho_s.back()) / d;
  }
  const double marginal_check = max_abs(avg - partial_trace_op(rho.matrix(), dims, TraceOut::H));

  const double lhs = von_neumann_entropy(apply_product_channel(dep, psi, rho, dims));
  const double constant_term = depolarized_pure_entropy(params);
  const double bound = constant_term + conditional_avg;
  return LemmaReport{lhs, constant_term, conditional_avg, bound, lhs - bound, basis, std::move(rho_s),
                     marginal_check};
}

std::vector<LemmaReport> verify_lemma_instance(const DensityMatrix& rho, const BipartiteDims& dims,
                                               const Channel& psi, const DepolarizingParams& params,
                                               std::size_t n_bases, RngSeed seed) {
  if (n_bases < 1) {
    throw InvalidConfig("n_bases: must be >= 1");
  }
  check_dims(rho, dims, psi, params);
  const DensityMatrix marginal = partial_trace(rho, dims, TraceOut::K);
  std::vector<LemmaReport> reports;
  reports.reserve(n_bases);
  for (std::size_t b = 0; b < n_bases; ++b) {
    const OrthonormalBasis basis = balanced_basis(marginal, derive_seed(seed, b));
    reports.push_back(king_bound(rho, dims, basis, psi, params));
  }
  return reports;
}

SuperaddReport strong_superadd_check(const Channel& psi, const DensityMatrix& rho, const BipartiteDims& dims,
                                     const DepolarizingParams& params, const OptimizerConfig& cfg) {
  check_dims(rho, dims, psi, params);
  cfg.validate();
  const Channel dep = depolarizing_channel(params);
  const Channel joint = tensor_channels(dep, psi);
  const DensityMatrix rho_h = partial_trace(rho, dims, TraceOut::K);
  const DensityMatrix rho_k = partial_trace(rho, dims, TraceOut::H);
  const bool is_product = max_abs(rho.matrix() - tensor_product(rho_h.matrix(), rho_k.matrix())) <= kProductTol;

  SuperaddReport report;
  report.rhs_dep = s_min_dep_closed(params);
  report.product_certificate = is_product;

  auto run = [&](const OptimizerConfig& c) {
    OptResult rhs = h_hat_numeric(psi, rho_k, c);
    std::vector<Ensemble> warm;
    if (is_product) warm = product_certificate(rho_h, rhs);
    OptResult lhs = h_hat_numeric(joint, rho, c, warm);
    return std::pair(std::move(lhs), std::move(rhs));
  };

  auto [lhs, rhs] = run(cfg);
  double margin = lhs.value - report.rhs_dep - rhs.value;
  if (margin < -tol::kOptimizedMargin) {
    OptimizerConfig wider = cfg;
    wider.restarts = cfg.restarts * kEscalationFactor;
    auto rerun = run(wider);
    lhs = std::move(rerun.first);
    rhs = std::move(rerun.second);
    margin = lhs.value - report.rhs_dep - rhs.value;
    report.escalated = true;
  }

  report.lhs = lhs.value;
  report.rhs_psi = rhs.value;
  report.margin = margin;
  report.lhs_converged = lhs.converged;
  report.rhs_psi_converged = rhs.converged;
  report.lhs_restarts_used = lhs.restarts_used;
  report.rhs_psi_restarts_used = rhs.restarts_used;

  // Replay the chain on the best ensemble found for the left side.
  const Ensemble& best = std::get<Ensemble>(lhs.argmin);
  const double d = static_cast<double>(dims.dim_h());
  const auto dk = static_cast<Eigen::Index>(dims.dim_k());
  ComplexMatrix averaged_psi = ComplexMatrix::Zero(dk, dk);
  for (std::size_t j = 0; j < best.size(); ++j) {
    const DensityMatrix& member = best.members()[j];
    const double pi = best.weights()[j];
    const OrthonormalBasis basis = balanced_basis(partial_trace(member, dims, TraceOut::K));
    LemmaReport lemma = king_bound(member, dims, basis, psi, params);
    for (const auto& s : lemma.rho_s_list) averaged_psi += pi / d * psi.apply(s.matrix());
    report.chain_bound += pi * lemma.bound;
    report.chain_psi_average += pi * lemma.conditional_avg;
    report.chain_weights.push_back(pi);
    report.proof_chain.push_back(std::move(lemma));
  }
  report.averaging_identity_error = max_abs(averaged_psi - psi.apply(rho_k.matrix()));
  return report;
}

AdditivityReport smin_additivity_check(const Channel& psi, const DepolarizingParams& params,
                                       const OptimizerConfig& cfg) {
  const Channel dep = depolarizing_channel(params);
  const OptResult joint = s_min_numeric(tensor_channels(dep, psi), cfg);
  const OptResult single = s_min_numeric(psi, cfg);
  const double sum = s_min_dep_closed(params) + single.value;
  return AdditivityReport{joint.value, sum, joint.value - sum, joint.converged && single.converged};
}

}  // namespace qsa
