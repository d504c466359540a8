#include <gtest/gtest.h>

#include <numbers>

#include "qsa/serialize.hpp"

using namespace qsa;

TEST(Serialize, RoundSig12) {
  EXPECT_EQ(round_sig12(0.0), 0.0);
  EXPECT_EQ(round_sig12(1.0 / 3.0), 0.333333333333);
  EXPECT_EQ(round_sig12(123456.7890123456), 123456.789012);
  EXPECT_EQ(round_sig12(round_sig12(2.0 / 7.0)), round_sig12(2.0 / 7.0));
}

TEST(Serialize, LogBase) {
  EXPECT_EQ(to_log_base(1.5, LogBase::e), 1.5);
  EXPECT_NEAR(to_log_base(std::numbers::ln2, LogBase::two), 1.0, 1e-15);
  EXPECT_NEAR(round_sig12(to_log_base(s_min_dep_closed({2, 0.5}), LogBase::two)), 0.811278124459, 1e-12);
}

TEST(Serialize, ChannelRoundTrip) {
  const Channel ch = random_kraus_channel(3, 2, RngSeed{4});
  const json j = channel_to_json(ch);
  EXPECT_EQ(j.at("dim_in"), 3);
  EXPECT_EQ(j.at("kraus").size(), 2u);
  const Channel back = channel_from_json(json::parse(j.dump()));
  ASSERT_EQ(back.kraus().size(), ch.kraus().size());
  for (std::size_t i = 0; i < ch.kraus().size(); ++i) EXPECT_LE(max_abs(back.kraus()[i] - ch.kraus()[i]), 1e-11);
}

TEST(Serialize, ChannelFromJsonValidates) {
  json bad{{"dim_in", 2}, {"dim_out", 2}, {"kraus", json::array({json::array({{2, 0}, {0, 0}, {0, 0}, {2, 0}})})}};
  EXPECT_THROW(channel_from_json(bad), NotAChannel);
  json short_op{{"dim_in", 2}, {"dim_out", 2}, {"kraus", json::array({json::array({{1, 0}})})}};
  EXPECT_THROW(channel_from_json(short_op), DimensionMismatch);
}

TEST(Serialize, OptResultFieldsAndDeterminism) {
  OptimizerConfig cfg;
  cfg.restarts = 4;
  cfg.seed = RngSeed{3};
  const OptResult r = s_min_numeric(depolarizing_channel({2, 0.5}), cfg);
  const json j = to_json(r, LogBase::two);
  for (const char* key : {"value", "converged", "restarts_used", "best_restart_index", "argmin"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  EXPECT_EQ(j.at("value").get<double>(), round_sig12(r.value / std::numbers::ln2));
  EXPECT_EQ(to_json(s_min_numeric(depolarizing_channel({2, 0.5}), cfg)).dump(), to_json(r).dump());
}

TEST(Serialize, ReportsCarryAllFields) {
  const BipartiteDims dims(2, 2);
  const DensityMatrix rho = random_density(4, 2, RngSeed{1});
  OptimizerConfig cfg;
  cfg.restarts = 4;
  const SuperaddReport r = strong_superadd_check(Channel::identity(2), rho, dims, {2, 0.3}, cfg);
  const json j = to_json(r);
  for (const char* key : {"lhs", "rhs_dep", "rhs_psi", "margin", "proof_chain", "lhs_converged", "escalated"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  ASSERT_FALSE(j.at("proof_chain").empty());
  for (const char* key : {"lhs", "bound", "margin", "marginal_check", "basis_used", "rho_s_list", "weight"}) {
    EXPECT_TRUE(j.at("proof_chain")[0].contains(key)) << key;
  }
  const json a = to_json(smin_additivity_check(Channel::identity(2), {2, 0.3}, cfg));
  EXPECT_TRUE(a.contains("gap"));
}
