#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "qsa/channels.hpp"

using namespace qsa;

namespace {

const double kPGrid[] = {0.0, 0.25, 0.5, 0.75, 1.0};

std::vector<double> p_grid(std::size_t d) {
  std::vector<double> ps(std::begin(kPGrid), std::end(kPGrid));
  ps.push_back(DepolarizingParams::max_p(d));
  return ps;
}

}  // namespace

TEST(Channel, ValidatesTracePreservation) {
  std::vector<ComplexMatrix> kraus{ComplexMatrix::Identity(2, 2) * 0.9};
  EXPECT_THROW(Channel(2, 2, kraus), NotAChannel);
  EXPECT_THROW(Channel(2, 2, {ComplexMatrix::Identity(3, 3)}), DimensionMismatch);
  EXPECT_NO_THROW(Channel(2, 2, qsa_test::amplitude_damping(0.3)));
}

TEST(Channel, UncheckedAdmitsSigns) {
  const Channel ch = Channel::unchecked(2, 2, {ComplexMatrix::Identity(2, 2)}, {-1.0});
  EXPECT_FALSE(ch.validated());
  EXPECT_LE(max_abs(ch.apply(ComplexMatrix::Identity(2, 2)) + ComplexMatrix::Identity(2, 2)), 1e-15);
  EXPECT_THROW(Channel::unchecked(2, 2, {ComplexMatrix::Identity(2, 2)}, {1.0, 1.0}), DimensionMismatch);
}

TEST(Depolarizing, MatchesAffineForm) {
  for (std::size_t d : {2u, 3u}) {
    for (double p : p_grid(d)) {
      const Channel ch = depolarizing_channel({d, p});
      for (std::uint64_t s = 0; s < 100; ++s) {
        const DensityMatrix rho = random_density(d, 1 + s % d, RngSeed{s});
        EXPECT_LE(max_abs(ch.apply(rho.matrix()) - qsa_test::depolarize(rho.matrix(), p)), 1e-12)
            << "d=" << d << " p=" << p;
      }
    }
  }
}

TEST(Depolarizing, Examples) {
  const DensityMatrix rho = random_density(3, 2, RngSeed{1});
  EXPECT_LE(max_abs(depolarizing_channel({3, 0.0}).apply(rho.matrix()) - rho.matrix()), 1e-12);
  EXPECT_LE(max_abs(depolarizing_channel({3, 1.0}).apply(rho.matrix()) - ComplexMatrix::Identity(3, 3) / 3.0), 1e-12);

  // d = 2, p = 4/3 on |0><0|: spectrum {1/3, 2/3} with 1/3 on the input ray.
  ComplexMatrix zero = ComplexMatrix::Zero(2, 2);
  zero(0, 0) = 1.0;
  const ComplexMatrix out = depolarizing_channel({2, 4.0 / 3.0}).apply(zero);
  EXPECT_NEAR(out(0, 0).real(), 1.0 / 3.0, 1e-12);
  EXPECT_NEAR(out(1, 1).real(), 2.0 / 3.0, 1e-12);
}

TEST(Depolarizing, KrausWeights) {
  const Channel boundary = depolarizing_channel({2, 4.0 / 3.0});
  EXPECT_EQ(max_abs(boundary.kraus()[0]), 0.0);

  const Channel twirl = depolarizing_channel({2, 1.0});
  ASSERT_EQ(twirl.kraus().size(), 4u);
  for (const auto& k : twirl.kraus()) {
    // Each operator is (1/2) times a unitary.
    EXPECT_LE(max_abs(k.adjoint() * k - 0.25 * ComplexMatrix::Identity(2, 2)), 1e-12);
  }
}

TEST(Depolarizing, RangeValidation) {
  EXPECT_THROW(depolarizing_channel({2, 4.0 / 3.0 + 0.01}), POutOfRange);
  EXPECT_THROW(depolarizing_channel({2, -0.01}), POutOfRange);
  EXPECT_THROW(depolarizing_channel({1, 0.5}), DimensionMismatch);
  EXPECT_DOUBLE_EQ(DepolarizingParams::max_p(3), 9.0 / 8.0);
}

TEST(Depolarizing, CompletePositivityRangeIsSharp) {
  for (std::size_t d : {2u, 3u}) {
    const double edge = DepolarizingParams::max_p(d);
    EXPECT_GE(min_choi_eigenvalue(depolarizing_channel({d, edge})), -1e-12);
    EXPECT_GE(min_choi_eigenvalue(depolarizing_channel({d, edge - 0.01})), 0.0);
    const Channel over = depolarizing_channel_unchecked(d, edge + 0.01);
    EXPECT_LT(min_choi_eigenvalue(over), -1e-6);
    EXPECT_LE(trace_preservation_error(over), 1e-12);
  }
}

TEST(Weyl, OperatorsAreUnitary) {
  for (std::size_t a = 0; a < 3; ++a) {
    for (std::size_t b = 0; b < 3; ++b) {
      const ComplexMatrix w = weyl_operator(3, a, b);
      EXPECT_LE(max_abs(w.adjoint() * w - ComplexMatrix::Identity(3, 3)), 1e-12);
    }
  }
}

TEST(Choi, Examples) {
  const ComplexMatrix c = choi_matrix(Channel::identity(2));
  ComplexVector omega = ComplexVector::Zero(4);
  omega(0) = omega(3) = 1.0 / std::sqrt(2.0);
  EXPECT_LE(max_abs(c - omega * omega.adjoint()), 1e-12);

  EXPECT_LE(max_abs(choi_matrix(depolarizing_channel({3, 1.0})) - ComplexMatrix::Identity(9, 9) / 9.0), 1e-12);
}

TEST(Channels, ValidInvariants) {
  std::vector<Channel> channels{Channel::identity(3), depolarizing_channel({3, 0.4}),
                                Channel(2, 2, qsa_test::amplitude_damping(0.5))};
  for (std::size_t env = 1; env <= 4; ++env) channels.push_back(random_kraus_channel(3, env, RngSeed{env}));
  for (const auto& ch : channels) {
    EXPECT_TRUE(ch.validated());
    EXPECT_LE(trace_preservation_error(ch), 1e-10);
    EXPECT_GE(min_choi_eigenvalue(ch), -1e-9);
    for (std::uint64_t s = 0; s < 10; ++s) {
      const DensityMatrix rho = random_density(ch.dim_in(), 1 + s % ch.dim_in(), RngSeed{50 + s});
      const ComplexMatrix out = ch.apply(rho.matrix());
      EXPECT_NEAR(out.trace().real(), 1.0, 1e-10);
      EXPECT_LE(max_abs(out - out.adjoint()), 1e-10);
      EXPECT_NO_THROW(apply_channel(ch, rho));
    }
  }
}

TEST(Channels, AdjointIsDual) {
  const Channel ch = random_kraus_channel(3, 2, RngSeed{17});
  const ComplexMatrix x = random_density(3, 3, RngSeed{1}).matrix();
  const ComplexMatrix y = random_density(3, 2, RngSeed{2}).matrix();
  EXPECT_NEAR((y * ch.apply(x)).trace().real(), (ch.apply_adjoint(y) * x).trace().real(), 1e-12);
}

TEST(Channels, RandomKrausDeterministic) {
  const Channel a = random_kraus_channel(2, 3, RngSeed{5});
  const Channel b = random_kraus_channel(2, 3, RngSeed{5});
  ASSERT_EQ(a.kraus().size(), b.kraus().size());
  for (std::size_t i = 0; i < a.kraus().size(); ++i) EXPECT_EQ(a.kraus()[i], b.kraus()[i]);
}

TEST(ProductChannel, MatchesTensoredKraus) {
  const BipartiteDims dims(2, 3);
  const Channel phi = depolarizing_channel({2, 0.7});
  const Channel psi = random_kraus_channel(3, 2, RngSeed{23});
  const Channel joint = tensor_channels(phi, psi);
  EXPECT_TRUE(joint.validated());
  for (std::uint64_t s = 0; s < 20; ++s) {
    const DensityMatrix rho = random_density(6, 1 + s % 6, RngSeed{s});
    EXPECT_LE(max_abs(apply_product_channel(phi, psi, rho, dims).matrix() - joint.apply(rho.matrix())), 1e-11);
  }
}

TEST(ProductChannel, Examples) {
  const BipartiteDims dims(2, 2);
  const DensityMatrix rho = random_density(4, 3, RngSeed{2});
  EXPECT_LE(max_abs(apply_product_channel(Channel::identity(2), Channel::identity(2), rho, dims).matrix() -
                    rho.matrix()),
            1e-14);

  const Channel phi = depolarizing_channel({2, 0.3});
  const Channel psi = Channel(2, 2, qsa_test::amplitude_damping(0.4));
  const ComplexMatrix a = random_density(2, 2, RngSeed{3}).matrix();
  const ComplexMatrix b = random_density(2, 1, RngSeed{4}).matrix();
  const DensityMatrix prod(tensor_product(a, b));
  EXPECT_LE(max_abs(apply_product_channel(phi, psi, prod, dims).matrix() -
                    qsa_test::kron(phi.apply(a), psi.apply(b))),
            1e-11);
}

TEST(ProductChannel, AffineDecompositionOracle) {
  const BipartiteDims dims(2, 2);
  const double p = 0.6;
  const double q = 0.2;
  const Channel phi = depolarizing_channel({2, p});
  const Channel psi = depolarizing_channel({2, q});
  auto psi_fn = [&](const ComplexMatrix& x) { return qsa_test::depolarize(x, q); };
  for (std::uint64_t s = 0; s < 20; ++s) {
    const DensityMatrix rho = random_density(4, 1 + s % 4, RngSeed{70 + s});
    EXPECT_LE(max_abs(apply_product_channel(phi, psi, rho, dims).matrix() -
                      qsa_test::depolarize_h_then(rho.matrix(), 2, 2, p, psi_fn)),
              1e-12);
  }
}

TEST(Bistochastic, Examples) {
  EXPECT_TRUE(is_bistochastic(depolarizing_channel({3, 0.9})));
  EXPECT_TRUE(is_bistochastic(Channel::identity(4)));
  EXPECT_FALSE(is_bistochastic(Channel(2, 2, qsa_test::amplitude_damping(0.5))));
}
