#include "fixtures.hpp"
#include "rlt/audit.hpp"
#include "rlt/elections.hpp"

#include <gtest/gtest.h>

using namespace rlt;

namespace {

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::task_failure;
}

FrameworkSpec ternary_ap_det() { return fx::spec(fx::ternary_universe(), Orientation::agent_first, true, true, 3, 3); }

/// Deterministic two-move agent: plays a then b, then the first action.
Agent two_moves(const FrameworkSpec& s, const char* a, const char* b, const char* label) {
  Agent::Table t;
  const Symbol xa = s.u().lookup(a), xb = s.u().lookup(b);
  t.emplace(History(s.orientation), Distribution::point(xa));
  for (const auto& y : s.u().percepts())
    t.emplace(History(s.orientation).extended(xa).extended(y), Distribution::point(xb));
  return Agent(s, std::move(t), FixedRule{s.u().actions().front()}, label);
}

/// Rewards only the second move, by the rank of the (first, second) action pair.
Environment ranking(const FrameworkSpec& s, std::map<std::pair<std::string, std::string>, const char*> reward) {
  return formula_environment(
      s,
      [s, reward](const History& g) {
        const Symbol zero = s.u().zero_percept();
        if (g.size() != 3) return Distribution::point(zero);
        const auto key = std::make_pair(s.u().name(g[0]), s.u().name(g[2]));
        const auto it = reward.find(key);
        return Distribution::point(it == reward.end() ? zero : s.u().lookup(it->second));
      },
      "ranking");
}

}  // namespace

TEST(Principal, ZeroEnvironmentTiesEveryPair) {
  const auto s = fx::ap(false, 2);
  const auto c = Comparator::principal(zero_environment(s));
  for (const auto& pi : random_agents(s, 2, 4, 3))
    for (const auto& rho : random_agents(s, 2, 4, 4)) {
      const auto r = compare(c, pi, rho);
      EXPECT_TRUE(r.le);
      EXPECT_TRUE(r.ge);
    }
}

TEST(Principal, IndicatorOrdersByReachProbability) {
  const auto s = fx::ap(false, 2);
  const History target = fx::hist(s, {"x0"});
  const auto c = Comparator::principal(build_indicator_environment(s, target));
  const auto agents = random_agents(s, 2, 10, 17);
  for (const auto& pi : agents)
    for (const auto& rho : agents) {
      const auto r = compare(c, pi, rho);
      const Rational a = pi.probability(s.u().lookup("x0"), History(s.orientation));
      const Rational b = rho.probability(s.u().lookup("x0"), History(s.orientation));
      EXPECT_EQ(r.le, a <= b);
      EXPECT_EQ(r.ge, b <= a);
    }
}

TEST(Principal, Totality) {
  const auto s = fx::ap(false, 2);
  const auto agents = random_agents(s, 2, 8, 5);
  for (const auto& mu : random_environments(s, 2, 5, 6)) {
    const auto c = Comparator::principal(mu);
    for (const auto& pi : agents)
      for (const auto& rho : agents) {
        const auto r = compare(c, pi, rho);
        EXPECT_TRUE(r.le || r.ge);
      }
  }
}

TEST(Majority, TwoToOneTally) {
  const auto s = fx::ap(true, 2);
  const auto x0 = fx::hist(s, {"x0"}), x1 = fx::hist(s, {"x1"});
  const auto c = Comparator::majority(
      {build_indicator_environment(s, x0), build_indicator_environment(s, x0), build_indicator_environment(s, x1)});
  const auto pi = constant_agent(s, s.u().lookup("x0")), rho = constant_agent(s, s.u().lookup("x1"));
  const auto r = compare(c, pi, rho);
  EXPECT_EQ(r.voters, 3u);
  EXPECT_EQ(r.votes_le, 1u);
  EXPECT_EQ(r.votes_ge, 2u);
  EXPECT_FALSE(r.le);
  EXPECT_TRUE(r.ge);
}

TEST(Majority, EvenElectorateNeedsTieRule) {
  const auto s = fx::ap(true, 2);
  const auto x0 = fx::hist(s, {"x0"}), x1 = fx::hist(s, {"x1"});
  std::vector<Environment> two{build_indicator_environment(s, x0), build_indicator_environment(s, x1)};
  EXPECT_EQ(code_of([&] { Comparator::majority(two); }), ErrorCode::tie_rule_required);
  const auto c = Comparator::majority(two, TieRule::both_directions);
  const auto r = compare(c, constant_agent(s, s.u().lookup("x0")), constant_agent(s, s.u().lookup("x1")));
  EXPECT_TRUE(r.le);
  EXPECT_TRUE(r.ge);
}

TEST(Majority, SingleVoterAgreesWithPrincipal) {
  const auto s = fx::ap(false, 2);
  const auto agents = random_agents(s, 2, 6, 8);
  for (const auto& mu : random_environments(s, 2, 4, 9)) {
    const auto p = Comparator::principal(mu);
    const auto m = Comparator::majority({mu});
    for (const auto& pi : agents)
      for (const auto& rho : agents) {
        const auto a = compare(p, pi, rho), b = compare(m, pi, rho);
        EXPECT_EQ(a.le, b.le);
        EXPECT_EQ(a.ge, b.ge);
      }
  }
}

TEST(Majority, CondorcetCycleIsConstructible) {
  const auto s = ternary_ap_det();
  const auto A = two_moves(s, "x0", "x0", "A"), B = two_moves(s, "x0", "x1", "B"), C = two_moves(s, "x1", "x0", "C");
  using K = std::pair<std::string, std::string>;
  const K a{"x0", "x0"}, b{"x0", "x1"}, c{"x1", "x0"};
  const auto m = Comparator::majority({ranking(s, {{a, "y2"}, {b, "y1"}, {c, "y0"}}),
                                       ranking(s, {{b, "y2"}, {c, "y1"}, {a, "y0"}}),
                                       ranking(s, {{c, "y2"}, {a, "y1"}, {b, "y0"}})});
  const auto beats = [&](const Agent& p, const Agent& q) {
    const auto r = compare(m, p, q);
    return r.ge && !r.le;
  };
  EXPECT_TRUE(beats(A, B));
  EXPECT_TRUE(beats(B, C));
  EXPECT_TRUE(beats(C, A));
}

TEST(Compare, FrameworkMismatch) {
  const auto c = Comparator::principal(zero_environment(fx::ap(false, 2)));
  const auto pa = fx::pa(false, 2);
  EXPECT_EQ(code_of([&] { compare(c, uniform_agent(pa), uniform_agent(pa)); }), ErrorCode::framework_mismatch);
}

TEST(Induce, IdentityKeepsTheDictator) {
  const auto s = fx::ap(false, 2);
  const auto mu = random_environments(s, 2, 1, 10).front();
  const auto t = identity_translation(s);
  const auto c = induce_source_comparator(t, Comparator::principal(mu), random_agents(s, 2, 6, 11),
                                          random_environments(s, 2, 3, 12));
  EXPECT_TRUE(equal_up_to(c.dictator(), mu, 4));
}

TEST(Induce, LocalReversePreservesOrder) {
  const auto base = fx::ap(false, 2);
  const auto t = local_reverse_translation(base);
  const auto agents = random_agents(t.source, 2, 6, 13);
  const auto envs = random_environments(t.dest, 2, 4, 14);
  for (const auto& mu : envs) {
    const auto dest = Comparator::principal(mu);
    const auto src = induce_source_comparator(t, dest, agents, envs);
    EXPECT_TRUE(equal_up_to(src.dictator(), apply_env_map(t, mu), 4));
    EXPECT_TRUE(check_preservation(t, src, dest, ordered_pairs(agents)).passed());
  }
}

TEST(Induce, PrependPerceptPreservesOrder) {
  const auto base = fx::ap(false, 2);
  const auto t = prepend_percept(base, base.u().lookup("y1"));
  const auto agents = random_agents(t.source, 2, 6, 15);
  const auto envs = random_environments(t.dest, 2, 4, 16);
  for (const auto& mu : envs) {
    const auto dest = Comparator::principal(mu);
    const auto src = induce_source_comparator(t, dest, agents, envs);
    EXPECT_TRUE(check_preservation(t, src, dest, ordered_pairs(agents)).passed());
  }
}

TEST(Induce, NonInjectiveEnvMapIsNotWeak) {
  const auto s = fx::ap(false, 2);
  Translation t = identity_translation(s);
  t.id = "collapse";
  t.env_map = [s](const Environment&) { return zero_environment(s); };
  const auto envs = random_environments(s, 2, 3, 18);
  EXPECT_EQ(code_of([&] { induce_source_comparator(t, Comparator::principal(envs[0]), random_agents(s, 2, 4, 19), envs); }),
            ErrorCode::not_weak);
}

TEST(Preservation, FalsifierWitnessBreaksPreservation) {
  const auto s = fx::spec(fx::ternary_universe(), Orientation::agent_first, false, false, 2, 2);
  const auto t = drop_first_action(s, s.u().lookup("x0"));
  const auto family = depth1_env_map_family(t);
  const auto report = falsify_mixture(t, family);
  ASSERT_TRUE(report.witness.has_value());
  const auto& w = *report.witness;
  const auto src = Comparator::principal(w.find_environment("mu_*"));
  const auto dst = Comparator::principal(w.find_environment("mu"));
  const auto r = check_preservation(t, src, dst, {{w.find_agent("pi"), w.find_agent("rho")}});
  EXPECT_EQ(r.verdict, Verdict::fail);
  ASSERT_TRUE(r.witness.has_value());
  EXPECT_TRUE(recheck_witness(*r.witness));
}
