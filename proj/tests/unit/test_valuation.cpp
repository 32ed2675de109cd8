#include "fixtures.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace rlt;

namespace {

struct Instance {
  Agent pi;
  Environment mu;
};

Instance random_instance(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const auto u = rng() % 2 ? fx::ternary_universe() : fx::binary_universe();
  const auto o = rng() % 2 ? Orientation::agent_first : Orientation::percept_first;
  const int depth = 1 + static_cast<int>(rng() % 3);
  const auto s = fx::spec(u, o, false, false, depth, depth);
  return {random_agents(s, depth, 1, rng())[0], random_environments(s, depth, 1, rng())[0]};
}

}  // namespace

TEST(ExpectedValue, ZeroEnvironmentGivesZero) {
  const auto s = fx::ap();
  for (const auto& pi : random_agents(s, 2, 10, 1)) EXPECT_EQ(value(pi, zero_environment(s)), Rational(0));
}

TEST(ExpectedValue, MatchesBruteForceOracle) {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const auto inst = random_instance(seed);
    for (int t = 0; t <= 6; ++t)
      EXPECT_EQ(expected_value(inst.pi, inst.mu, t).value, fx::brute_force_value(inst.pi, inst.mu, t))
          << "seed " << seed << " t " << t;
  }
}

TEST(ExpectedValue, ConstantPastTwiceHorizon) {
  for (std::uint64_t seed = 100; seed < 120; ++seed) {
    const auto inst = random_instance(seed);
    const int t0 = 2 * inst.mu.spec().reward_horizon + 2;
    const Rational v = expected_value(inst.pi, inst.mu, t0).value;
    EXPECT_EQ(fx::brute_force_value(inst.pi, inst.mu, t0 + 1), v);
    EXPECT_TRUE(total_value(inst.pi, inst.mu).converged);
    EXPECT_GE(total_value(inst.pi, inst.mu).path_count, 1u);
  }
}

TEST(ExpectedValue, RejectsFrameworkMismatch) {
  EXPECT_THROW(expected_value(uniform_agent(fx::ap()), zero_environment(fx::pa()), 3), Error);
}

TEST(DeterminedPath, RewardsSumToValue) {
  const auto s = fx::ap(true, 2);
  for (const auto& pi : all_deterministic_agents(s, 2))
    for (const auto& mu : all_deterministic_environments(s, 2)) {
      Rational sum(0);
      for (const auto& h : determined_path(pi, mu, 2 * mu.spec().reward_horizon + 2)) sum += history_reward(h, s.u());
      EXPECT_EQ(sum, value(pi, mu));
    }
}

TEST(DeterminedPath, BaseCaseAndGuard) {
  const auto s = fx::ap(true, 2);
  const Agent pi = constant_agent(s, s.u().lookup("x0"));
  const Environment mu = constant_environment(s, s.u().lookup("y0"));
  const auto path = determined_path(pi, mu, 3);
  ASSERT_EQ(path.size(), 4u);
  EXPECT_EQ(path[3], fx::hist(s, {"x0", "y0", "x0"}));
  EXPECT_EQ(determined_path(pi, mu, 0).size(), 1u);
  const auto r = fx::ap(false, 2);
  EXPECT_THROW(determined_path(uniform_agent(r), zero_environment(r), 2), Error);
}

TEST(Simulate, DeterministicPairFollowsPath) {
  const auto s = fx::ap(true, 2);
  const auto agents = all_deterministic_agents(s, 2);
  const auto envs = all_deterministic_environments(s, 2);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto tr = simulate(agents[7], envs[2], 5, seed);
    EXPECT_EQ(tr.path, determined_path(agents[7], envs[2], 5).back());
  }
}

TEST(Simulate, ReplaysForEqualSeeds) {
  const auto inst = random_instance(9);
  const auto a = simulate(inst.pi, inst.mu, 6, 1234);
  const auto b = simulate(inst.pi, inst.mu, 6, 1234);
  EXPECT_EQ(a.path, b.path);
  EXPECT_EQ(a.total_reward, b.total_reward);
}

TEST(Simulate, MeanWithinFourSigma) {
  int within = 0;
  const int instances = 10;
  for (int i = 0; i < instances; ++i) {
    const auto inst = random_instance(500 + static_cast<std::uint64_t>(i));
    const int t = 6;
    const double exact = to_double(expected_value(inst.pi, inst.mu, t).value);
    Sampler sampler(inst.pi, inst.mu, 77 + static_cast<std::uint64_t>(i));
    const int n = 20000;
    double sum = 0, sq = 0;
    for (int k = 0; k < n; ++k) {
      const double r = sampler.sample_reward(t);
      sum += r;
      sq += r * r;
    }
    const double mean = sum / n;
    const double sd = std::sqrt(std::max(0.0, sq / n - mean * mean));
    if (std::abs(mean - exact) <= 4 * sd / std::sqrt(n) + 1e-12) ++within;
  }
  EXPECT_GE(within, 9);
}

TEST(AgreeAbout, ReflexiveSymmetric) {
  const auto s = fx::ap(false, 2);
  const auto agents = random_agents(s, 2, 6, 21);
  const auto envs = random_environments(s, 2, 4, 22);
  for (const auto& mu : envs)
    for (const auto& nu : envs)
      for (const auto& pi : agents)
        for (const auto& rho : agents) {
          EXPECT_TRUE(agree_about(mu, mu, pi, rho));
          EXPECT_EQ(agree_about(mu, nu, pi, rho), agree_about(nu, mu, pi, rho));
        }
}

TEST(AgreeAbout, ZeroEnvironmentsAlwaysAgree) {
  const auto s = fx::ap(true, 2);
  const auto agents = all_deterministic_agents(s, 2);
  for (const auto& pi : agents) EXPECT_TRUE(agree_about(zero_environment(s), zero_environment(s), pi, agents[5]));
}

TEST(CorpusEquivalent, SingletonNeverDistinguishes) {
  const auto s = fx::ap(false, 2);
  const auto envs = random_environments(s, 2, 2, 8);
  const auto v = corpus_equivalent(envs[0], envs[1], {uniform_agent(s)});
  EXPECT_FALSE(v.distinguished);
  EXPECT_EQ(v.corpus_size, 1u);
  EXPECT_THROW(corpus_equivalent(envs[0], envs[1], {}), Error);
}

TEST(CorpusEquivalent, MonotoneInCorpus) {
  const auto s = fx::ap(false, 2);
  const auto agents = random_agents(s, 2, 12, 31);
  const auto envs = random_environments(s, 2, 6, 32);
  for (const auto& mu : envs)
    for (const auto& nu : envs) {
      const std::vector<Agent> small(agents.begin(), agents.begin() + 5);
      const auto a = corpus_equivalent(mu, nu, small);
      const auto b = corpus_equivalent(mu, nu, agents);
      if (a.distinguished) {
        EXPECT_TRUE(b.distinguished);
        const auto& w = *a.witness;
        EXPECT_NE(w.mu_pi <= w.mu_rho, w.nu_pi <= w.nu_rho);
      }
    }
}
