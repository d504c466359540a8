#include "qsa/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>

namespace qsa {

namespace {

json complex_entry(cplx z) { return json::array({round_sig12(z.real()), round_sig12(z.imag())}); }

json flat_matrix(const ComplexMatrix& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) out.push_back(complex_entry(m(i, j)));
  }
  return out;
}

json vector_json(const ComplexVector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(complex_entry(v(i)));
  return out;
}

}  // namespace

double to_log_base(double nats, LogBase base) {
  return base == LogBase::two ? nats / std::numbers::ln2 : nats;
}

double round_sig12(double x) {
  if (!std::isfinite(x) || x == 0.0) return x == 0.0 ? 0.0 : x;
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return std::strtod(buf, nullptr);
}

json channel_to_json(const Channel& ch) {
  json kraus = json::array();
  for (const auto& k : ch.kraus()) kraus.push_back(flat_matrix(k));
  return json{{"dim_in", ch.dim_in()}, {"dim_out", ch.dim_out()}, {"kraus", std::move(kraus)}};
}

Channel channel_from_json(const json& j) {
  const auto dim_in = j.at("dim_in").get<std::size_t>();
  const auto dim_out = j.at("dim_out").get<std::size_t>();
  std::vector<ComplexMatrix> kraus;
  for (const auto& op : j.at("kraus")) {
    if (op.size() != dim_in * dim_out) {
      throw DimensionMismatch("Kraus operator has " + std::to_string(op.size()) + " entries, expected " +
                              std::to_string(dim_in * dim_out));
    }
    ComplexMatrix k(static_cast<Eigen::Index>(dim_out), static_cast<Eigen::Index>(dim_in));
    std::size_t idx = 0;
    for (Eigen::Index r = 0; r < k.rows(); ++r) {
      for (Eigen::Index c = 0; c < k.cols(); ++c, ++idx) {
        const auto& e = op.at(idx);
        k(r, c) = cplx(e.at(0).get<double>(), e.at(1).get<double>());
      }
    }
    kraus.push_back(std::move(k));
  }
  return Channel(dim_in, dim_out, std::move(kraus));
}

json state_to_json(const DensityMatrix& rho) {
  return json{{"dim", rho.dim()}, {"entries", flat_matrix(rho.matrix())}};
}

json to_json(const OptResult& result, LogBase base) {
  json argmin;
  if (const auto* psi = std::get_if<PureState>(&result.argmin)) {
    argmin = json{{"kind", "pure"}, {"dim", psi->dim()}, {"amplitudes", vector_json(psi->amplitudes())}};
  } else {
    const auto& ens = std::get<Ensemble>(result.argmin);
    json weights = json::array();
    json members = json::array();
    for (std::size_t j = 0; j < ens.size(); ++j) {
      weights.push_back(round_sig12(ens.weights()[j]));
      members.push_back(state_to_json(ens.members()[j]));
    }
    argmin = json{{"kind", "ensemble"}, {"weights", std::move(weights)}, {"members", std::move(members)}};
  }
  return json{{"value", round_sig12(to_log_base(result.value, base))},
              {"converged", result.converged},
              {"restarts_used", result.restarts_used},
              {"best_restart_index", result.best_restart_index},
              {"argmin", std::move(argmin)}};
}

json to_json(const LemmaReport& r, LogBase base) {
  json states = json::array();
  for (const auto& s : r.rho_s_list) states.push_back(state_to_json(s));
  json basis = json::array();
  for (std::size_t s = 0; s < r.basis_used.dim(); ++s) basis.push_back(vector_json(r.basis_used.vector(s)));
  return json{{"lhs", round_sig12(to_log_base(r.lhs, base))},
              {"constant_term", round_sig12(to_log_base(r.constant_term, base))},
              {"conditional_avg", round_sig12(to_log_base(r.conditional_avg, base))},
              {"bound", round_sig12(to_log_base(r.bound, base))},
              {"margin", round_sig12(to_log_base(r.margin, base))},
              {"marginal_check", round_sig12(r.marginal_check)},
              {"basis_used", std::move(basis)},
              {"rho_s_list", std::move(states)}};
}

json to_json(const SuperaddReport& r, LogBase base) {
  json chain = json::array();
  for (std::size_t j = 0; j < r.proof_chain.size(); ++j) {
    json entry = to_json(r.proof_chain[j], base);
    entry["weight"] = round_sig12(r.chain_weights[j]);
    chain.push_back(std::move(entry));
  }
  return json{{"lhs", round_sig12(to_log_base(r.lhs, base))},
              {"rhs_dep", round_sig12(to_log_base(r.rhs_dep, base))},
              {"rhs_psi", round_sig12(to_log_base(r.rhs_psi, base))},
              {"margin", round_sig12(to_log_base(r.margin, base))},
              {"chain_bound", round_sig12(to_log_base(r.chain_bound, base))},
              {"chain_psi_average", round_sig12(to_log_base(r.chain_psi_average, base))},
              {"averaging_identity_error", round_sig12(r.averaging_identity_error)},
              {"lhs_converged", r.lhs_converged},
              {"rhs_psi_converged", r.rhs_psi_converged},
              {"lhs_restarts_used", r.lhs_restarts_used},
              {"rhs_psi_restarts_used", r.rhs_psi_restarts_used},
              {"escalated", r.escalated},
              {"product_certificate", r.product_certificate},
              {"proof_chain", std::move(chain)}};
}

json to_json(const AdditivityReport& r, LogBase base) {
  return json{{"joint", round_sig12(to_log_base(r.joint, base))},
              {"sum", round_sig12(to_log_base(r.sum, base))},
              {"gap", round_sig12(to_log_base(r.gap, base))},
              {"converged", r.converged}};
}

}  // namespace qsa
