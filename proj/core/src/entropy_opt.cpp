#include "qsa/entropy_opt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "qsa/stiefel.hpp"

namespace qsa {

namespace {

constexpr double kWeightSumTol = 1e-10;
constexpr double kSupportCutoff = 1e-12;
constexpr double kDropWeight = 1e-14;
constexpr double kIsometryTol = 1e-10;
constexpr std::size_t kMinRestarts = 4;

// Sum over columns w_j of t_j * S(Phi(w_j w_j^dagger) / t_j), t_j = Tr Phi(w_j w_j^dagger),
// with gradient columns Phi^*(-ln(X_j / t_j)) w_j.
class MemberEntropy {
 public:
  explicit MemberEntropy(const Channel& ch)
      : dim_in_(static_cast<Eigen::Index>(ch.dim_in())),
        dim_out_(static_cast<Eigen::Index>(ch.dim_out())),
        n_kraus_(static_cast<Eigen::Index>(ch.kraus().size())),
        signs_(n_kraus_),
        stacked_(n_kraus_ * dim_out_, dim_in_) {
    for (Eigen::Index a = 0; a < n_kraus_; ++a) {
      stacked_.middleRows(a * dim_out_, dim_out_) = ch.kraus()[static_cast<std::size_t>(a)];
      signs_(a) = ch.signs()[static_cast<std::size_t>(a)];
    }
    all_positive_ = (signs_.array() > 0.0).all();
  }

  double operator()(const ComplexMatrix& w, ComplexMatrix* grad) const {
    const ComplexMatrix y = stacked_ * w;
    ComplexMatrix z;
    if (grad) z.resize(y.rows(), y.cols());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(dim_out_);
    double total = 0.0;
    for (Eigen::Index j = 0; j < w.cols(); ++j) {
      Eigen::Map<const ComplexMatrix> yj(y.col(j).data(), dim_out_, n_kraus_);
      const ComplexMatrix x = all_positive_ ? ComplexMatrix(yj * yj.adjoint())
                                            : ComplexMatrix(yj * signs_.asDiagonal() * yj.adjoint());
      const double t = x.trace().real();
      if (!(t > std::numeric_limits<double>::min())) {
        if (grad) z.col(j).setZero();
        continue;
      }
      es.compute(x / t, grad ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
      const Eigen::VectorXd& mu = es.eigenvalues();
      double s = 0.0;
      for (Eigen::Index i = 0; i < mu.size(); ++i) {
        if (mu(i) > tol::kEntropyFloor) s -= mu(i) * std::log(mu(i));
      }
      total += t * s;
      if (grad) {
        Eigen::VectorXd neg_log(mu.size());
        for (Eigen::Index i = 0; i < mu.size(); ++i) neg_log(i) = -std::log(std::max(mu(i), tol::kEntropyFloor));
        const ComplexMatrix gamma = es.eigenvectors() * neg_log.asDiagonal() * es.eigenvectors().adjoint();
        Eigen::Map<ComplexMatrix> zj(z.col(j).data(), dim_out_, n_kraus_);
        zj = gamma * yj;
        if (!all_positive_) zj = zj * signs_.asDiagonal();
      }
    }
    if (grad) *grad = stacked_.adjoint() * z;
    return total;
  }

  Eigen::Index dim_in() const { return dim_in_; }

 private:
  Eigen::Index dim_in_;
  Eigen::Index dim_out_;
  Eigen::Index n_kraus_;
  Eigen::VectorXd signs_;
  ComplexMatrix stacked_;
  bool all_positive_ = true;
};

struct Support {
  ComplexMatrix vectors;  // n x r eigenvectors with eigenvalue > cutoff
  Eigen::VectorXd values;
  ComplexMatrix scaled;   // vectors * diag(sqrt(values))
};

Support support_of(const DensityMatrix& rho) {
  const SortedEigen eig = sorted_eigen(rho.matrix());
  Eigen::Index r = 0;
  while (r < eig.values.size() && eig.values(r) > kSupportCutoff) ++r;
  Support s;
  s.vectors = eig.vectors.leftCols(r);
  s.values = eig.values.head(r);
  s.scaled = s.vectors * s.values.cwiseSqrt().asDiagonal();
  return s;
}

struct MultiStartOutcome {
  ComplexMatrix point;
  double value = std::numeric_limits<double>::infinity();
  std::size_t restarts_used = 0;
  bool converged = false;
  std::size_t best_index = 0;
};

template <typename StartFn>
MultiStartOutcome multi_start(const StiefelObjective& objective, StartFn&& start_for, const OptimizerConfig& cfg) {
  const LocalSearchOptions opts{cfg.max_iters, cfg.value_tol, cfg.step_tol};
  const std::size_t min_runs = std::min(cfg.restarts, kMinRestarts);
  MultiStartOutcome out;
  double second = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < cfg.restarts; ++i) {
    LocalSearchResult local = minimize_on_stiefel(objective, start_for(i), opts);
    if (local.value < out.value) {
      second = out.value;
      out.value = local.value;
      out.point = std::move(local.point);
      out.best_index = i;
    } else if (local.value < second) {
      second = local.value;
    }
    out.restarts_used = i + 1;
    out.converged = std::isfinite(second) && (second - out.value) <= cfg.value_tol;
    if (out.converged && out.restarts_used >= min_runs) break;
  }
  return out;
}

}  // namespace

Ensemble::Ensemble(std::vector<double> weights, std::vector<DensityMatrix> members)
    : weights_(std::move(weights)), members_(std::move(members)) {
  if (weights_.empty() || weights_.size() != members_.size()) {
    throw InvalidEnsemble("ensemble needs one weight per member and at least one member");
  }
  double sum = 0.0;
  for (double w : weights_) {
    if (!(w >= 0.0)) throw InvalidEnsemble("ensemble weights must be nonnegative");
    sum += w;
  }
  if (std::abs(sum - 1.0) > kWeightSumTol) {
    throw InvalidEnsemble("ensemble weights sum to " + std::to_string(sum));
  }
  for (const auto& m : members_) {
    if (m.dim() != members_.front().dim()) throw InvalidEnsemble("ensemble members differ in dimension");
  }
}

ComplexMatrix Ensemble::average_matrix() const {
  ComplexMatrix avg = ComplexMatrix::Zero(members_.front().matrix().rows(), members_.front().matrix().cols());
  for (std::size_t j = 0; j < size(); ++j) avg += weights_[j] * members_[j].matrix();
  return avg;
}

void OptimizerConfig::validate() const {
  if (restarts < 1) throw InvalidConfig("restarts: must be >= 1");
  if (max_iters < 1) throw InvalidConfig("max_iters: must be >= 1");
  if (!(value_tol > 0.0)) throw InvalidConfig("value_tol: must be > 0");
  if (!(step_tol > 0.0)) throw InvalidConfig("step_tol: must be > 0");
}

double output_entropy(const Channel& ch, const DensityMatrix& rho) {
  return std::max(0.0, hermitian_entropy(ch.apply(rho.matrix())));
}

double ensemble_output_entropy(const Channel& ch, const Ensemble& ensemble) {
  double total = 0.0;
  for (std::size_t j = 0; j < ensemble.size(); ++j) {
    total += ensemble.weights()[j] * output_entropy(ch, ensemble.members()[j]);
  }
  return total;
}

OptResult s_min_numeric(const Channel& ch, const OptimizerConfig& cfg) {
  cfg.validate();
  const MemberEntropy member(ch);
  const StiefelObjective objective = [&member](const ComplexMatrix& v, ComplexMatrix* egrad) {
    return member(v, egrad);
  };
  const auto start_for = [&](std::size_t i) {
    return random_isometry(ch.dim_in(), 1, derive_seed(cfg.seed, i));
  };
  MultiStartOutcome best = multi_start(objective, start_for, cfg);
  return OptResult{std::max(0.0, best.value), PureState::normalized(best.point.col(0)), best.restarts_used,
                   best.converged, best.best_index};
}

double s_min_dep_closed(const DepolarizingParams& params) {
  params.validate();
  const double d = static_cast<double>(params.dim);
  const double p = params.p;
  const double top = 1.0 - (d - 1.0) * p / d;
  double s = 0.0;
  if (top > 0.0) s -= top * std::log(top);
  if (p > 0.0) s -= (d - 1.0) * p / d * std::log(p / d);
  return s;
}

double h_hat_dep_closed(const DepolarizingParams& params) { return s_min_dep_closed(params); }

Ensemble decompositions_from_isometry(const DensityMatrix& rho, const ComplexMatrix& mix) {
  const Support sup = support_of(rho);
  const Eigen::Index r = sup.values.size();
  if (mix.cols() != r) {
    throw RankMismatch("isometry has " + std::to_string(mix.cols()) + " columns but rho has rank " +
                       std::to_string(r));
  }
  if (mix.rows() < r || max_abs(mix.adjoint() * mix - ComplexMatrix::Identity(r, r)) > kIsometryTol) {
    throw NotAnIsometry("mix^dagger mix differs from the identity");
  }
  const ComplexMatrix w = sup.scaled * mix.transpose();
  std::vector<double> weights;
  std::vector<DensityMatrix> members;
  for (Eigen::Index j = 0; j < w.cols(); ++j) {
    const double pi = w.col(j).squaredNorm();
    if (pi < kDropWeight) continue;
    weights.push_back(pi);
    members.push_back(DensityMatrix::from_pure(PureState::normalized(w.col(j))));
  }
  return Ensemble(std::move(weights), std::move(members));
}

ComplexMatrix isometry_from_ensemble(const DensityMatrix& rho, const Ensemble& pure_ensemble, std::size_t rows) {
  const Support sup = support_of(rho);
  const Eigen::Index r = sup.values.size();
  if (rows < pure_ensemble.size()) {
    throw DimensionMismatch("isometry needs at least one row per ensemble member");
  }
  ComplexMatrix v = ComplexMatrix::Zero(static_cast<Eigen::Index>(rows), r);
  const Eigen::VectorXd inv_sqrt = sup.values.cwiseSqrt().cwiseInverse();
  for (std::size_t j = 0; j < pure_ensemble.size(); ++j) {
    const SortedEigen eig = sorted_eigen(pure_ensemble.members()[j].matrix());
    if (eig.values.size() > 1 && eig.values(1) > 1e-9) {
      throw InvalidEnsemble("warm-start ensemble members must be pure");
    }
    const ComplexVector w = std::sqrt(pure_ensemble.weights()[j]) * eig.vectors.col(0);
    v.row(static_cast<Eigen::Index>(j)) = (inv_sqrt.asDiagonal() * (sup.vectors.adjoint() * w)).transpose();
  }
  if (max_abs(v.adjoint() * v - ComplexMatrix::Identity(r, r)) > 1e-6) {
    throw InvalidEnsemble("warm-start ensemble does not average to rho");
  }
  return v;
}

OptResult h_hat_numeric(const Channel& ch, const DensityMatrix& rho, const OptimizerConfig& cfg,
                        std::span<const Ensemble> warm_starts) {
  cfg.validate();
  if (rho.dim() != ch.dim_in()) {
    throw DimensionMismatch("state dimension " + std::to_string(rho.dim()) + " but channel input dimension " +
                            std::to_string(ch.dim_in()));
  }
  const double singleton = output_entropy(ch, rho);
  const Support sup = support_of(rho);
  const auto r = static_cast<std::size_t>(sup.values.size());

  if (r == 1) {
    // A pure state has only the trivial decomposition.
    return OptResult{singleton, Ensemble({1.0}, {rho}), 1, true, 0};
  }

  std::size_t k = cfg.ensemble_cap == 0 ? rho.dim() * rho.dim() : cfg.ensemble_cap;
  k = std::max(k, r);
  for (const auto& e : warm_starts) k = std::max(k, e.size());

  const MemberEntropy member(ch);
  const ComplexMatrix& c = sup.scaled;
  const StiefelObjective objective = [&](const ComplexMatrix& v, ComplexMatrix* egrad) {
    const ComplexMatrix w = c * v.transpose();
    if (!egrad) return member(w, nullptr);
    ComplexMatrix gw;
    const double f = member(w, &gw);
    *egrad = (c.adjoint() * gw).transpose();
    return f;
  };
  const auto rows = static_cast<Eigen::Index>(k);
  const auto cols = static_cast<Eigen::Index>(r);
  const auto start_for = [&](std::size_t i) -> ComplexMatrix {
    if (i < warm_starts.size()) return isometry_from_ensemble(rho, warm_starts[i], k);
    if (i == warm_starts.size()) return ComplexMatrix::Identity(rows, cols);
    return random_isometry(k, r, derive_seed(cfg.seed, i));
  };
  MultiStartOutcome best = multi_start(objective, start_for, cfg);

  if (singleton < best.value) {
    return OptResult{singleton, Ensemble({1.0}, {rho}), best.restarts_used, best.converged, best.best_index};
  }
  return OptResult{std::max(0.0, best.value), decompositions_from_isometry(rho, stiefel_retract(best.point)),
                   best.restarts_used, best.converged, best.best_index};
}

}  // namespace qsa
