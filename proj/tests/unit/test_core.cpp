#include "fixtures.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace rlt;

namespace {

Universe example_universe() {
  return Universe::make({"x1", "x2"}, {{"y1", Rational(1)}, {"y2", Rational(0)}});
}

FrameworkSpec spec_for(const Universe& u, Orientation o) {
  FrameworkSpec s;
  s.universe = std::make_shared<const Universe>(u);
  s.orientation = o;
  return s;
}

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::task_failure;
}

}  // namespace

TEST(Universe, RejectsSingleActionAndOverlap) {
  EXPECT_EQ(code_of([] { Universe::make({"a"}, {{"p", Rational(0)}}); }), ErrorCode::invalid_universe);
  EXPECT_EQ(code_of([] { Universe::make({"a", "p"}, {{"p", Rational(0)}}); }), ErrorCode::invalid_universe);
  EXPECT_EQ(code_of([] { Universe::make({"a", "b"}, {}); }), ErrorCode::invalid_universe);
}

TEST(Universe, LooksUpRewards) {
  const auto u = example_universe();
  EXPECT_EQ(u.reward(u.lookup("y1")), Rational(1));
  EXPECT_EQ(u.zero_percept(), u.lookup("y2"));
  EXPECT_EQ(u.percept_with_reward(Rational(1)), u.lookup("y1"));
  EXPECT_FALSE(u.percept_with_reward(Rational(5)).has_value());
  EXPECT_EQ(code_of([&] { u.lookup("zz"); }), ErrorCode::unknown_symbol);
}

TEST(History, ValidatesAlternation) {
  const auto u = example_universe();
  const auto s = spec_for(u, Orientation::agent_first);
  const History h = validate_history({"x1", "y1", "x2", "y2"}, s);
  EXPECT_EQ(h.size(), 4u);
  EXPECT_TRUE(h.agent_turn());
  EXPECT_EQ(code_of([&] { validate_history({"x1", "x2"}, s); }), ErrorCode::alternation_violation);
  EXPECT_EQ(code_of([&] { validate_history({"y1"}, s); }), ErrorCode::orientation_mismatch);
  EXPECT_EQ(code_of([&] { validate_history({"x1", "nope"}, s); }), ErrorCode::unknown_symbol);
}

TEST(History, EmptyHistoryTurnDependsOnOrientation) {
  EXPECT_TRUE(History(Orientation::agent_first).agent_turn());
  EXPECT_TRUE(History(Orientation::percept_first).environment_turn());
}

TEST(History, PrefixRelations) {
  const auto u = example_universe();
  const auto s = spec_for(u, Orientation::agent_first);
  const History a = validate_history({"x1"}, s);
  const History b = validate_history({"x1", "y1"}, s);
  EXPECT_TRUE(a.is_prefix_of(b));
  EXPECT_TRUE(a.is_proper_prefix_of(b));
  EXPECT_TRUE(b.is_prefix_of(b));
  EXPECT_FALSE(b.is_proper_prefix_of(b));
  EXPECT_FALSE(b.is_prefix_of(a));
}

TEST(LocalReverse, TransposesPairs) {
  const auto u = Universe::make({"1", "3"}, {{"2", Rational(0)}, {"4", Rational(1)}});
  const auto s = spec_for(u, Orientation::agent_first);
  const History h = validate_history({"1", "2", "3", "4"}, s);
  const History r = local_reverse(h);
  EXPECT_EQ(r.orientation(), Orientation::percept_first);
  std::vector<std::string> names;
  for (const auto& sym : r) names.push_back(u.name(sym));
  EXPECT_EQ(names, (std::vector<std::string>{"2", "1", "4", "3"}));
  EXPECT_EQ(local_reverse(History(Orientation::agent_first)).size(), 0u);
  EXPECT_EQ(code_of([&] { local_reverse(h.prefix(3)); }), ErrorCode::odd_length);
}

TEST(LocalReverse, SinglePair) {
  const auto u = Universe::make({"a0", "a1"}, {{"p0", Rational(0)}, {"p1", Rational(1)}});
  const auto s = spec_for(u, Orientation::agent_first);
  const History r = local_reverse(validate_history({"a0", "p1"}, s));
  EXPECT_EQ(u.name(r[0]), "p1");
  EXPECT_EQ(u.name(r[1]), "a0");
}

TEST(LocalReverse, InvolutionAndMultisetOnAllShortHistories) {
  const auto u = fx::ternary_universe();
  for (auto o : {Orientation::agent_first, Orientation::percept_first}) {
    for (const auto& h : enumerate_histories(*u, o, 6)) {
      if (h.size() % 2 != 0) continue;
      const History r = local_reverse(h);
      EXPECT_EQ(local_reverse(r), h);
      EXPECT_EQ(r.size(), h.size());
      auto a = h.symbols();
      auto b = r.symbols();
      std::sort(a.begin(), a.end());
      std::sort(b.begin(), b.end());
      EXPECT_EQ(a, b);
    }
  }
}

TEST(History, TurnClassificationMatchesParity) {
  const auto u = fx::ternary_universe();
  for (const auto& h : enumerate_histories(*u, Orientation::agent_first, 5)) EXPECT_EQ(h.agent_turn(), h.size() % 2 == 0);
  for (const auto& h : enumerate_histories(*u, Orientation::percept_first, 5)) EXPECT_EQ(h.agent_turn(), h.size() % 2 == 1);
}

TEST(HistoryReward, ReadsLastPercept) {
  const auto u = example_universe();
  const auto s = spec_for(u, Orientation::agent_first);
  EXPECT_EQ(history_reward(validate_history({"x1", "y1"}, s), u), Rational(1));
  EXPECT_EQ(history_reward(History(Orientation::agent_first), u), Rational(0));
  EXPECT_EQ(history_reward(validate_history({"x1", "y1", "x2"}, s), u), Rational(0));
}

TEST(Distribution, ExactNormalization) {
  const auto a = Symbol::action(0), b = Symbol::action(1);
  const Distribution d({{a, make_rational(1, 3)}, {b, make_rational(2, 3)}});
  EXPECT_EQ(d.probability(a) + d.probability(b), Rational(1));
  EXPECT_EQ(code_of([&] { Distribution({{a, make_rational(1, 3)}, {b, make_rational(1, 3)}}); }),
            ErrorCode::invalid_distribution);
  EXPECT_EQ(code_of([&] { Distribution({{a, Rational(2)}, {b, Rational(-1)}}); }), ErrorCode::invalid_distribution);
  EXPECT_EQ(code_of([&] { Distribution(std::vector<Distribution::Entry>{}); }), ErrorCode::invalid_distribution);
}

TEST(Distribution, RandomDistributionsSumToOne) {
  std::mt19937_64 rng(7);
  const auto u = fx::ternary_universe();
  for (int i = 0; i < 200; ++i) {
    const Distribution d = detail::random_distribution(u->percepts(), rng, false);
    Rational sum(0);
    for (const auto& [s, p] : d.entries()) sum += p;
    EXPECT_EQ(sum, Rational(1));
  }
}

TEST(Rational, RoundTripsText) {
  EXPECT_EQ(to_string(make_rational(2, 4)), "1/2");
  EXPECT_EQ(to_string(Rational(3)), "3/1");
  EXPECT_EQ(parse_rational("6/8"), make_rational(3, 4));
  EXPECT_EQ(parse_rational("-2"), Rational(-2));
  EXPECT_THROW(parse_rational("1/0"), std::invalid_argument);
  EXPECT_THROW(parse_rational("abc"), std::invalid_argument);
}

TEST(FrameworkSpec, WarnsWhenDepthBelowHorizon) {
  auto s = fx::ap();
  EXPECT_TRUE(s.warnings().empty());
  s.reward_horizon = 3;
  EXPECT_EQ(s.warnings().size(), 1u);
}
