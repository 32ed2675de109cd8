#pragma once

#include "rlt/corpus.hpp"
#include "rlt/valuation.hpp"

#include <memory>

namespace fx {

using namespace rlt;

inline std::shared_ptr<const Universe> binary_universe() {
  return std::make_shared<const Universe>(
      Universe::make({"x0", "x1"}, {{"y0", Rational(0)}, {"y1", Rational(1)}}));
}

inline std::shared_ptr<const Universe> ternary_universe() {
  return std::make_shared<const Universe>(
      Universe::make({"x0", "x1"}, {{"y0", Rational(0)}, {"y1", Rational(1)}, {"y2", Rational(2)}}));
}

inline FrameworkSpec spec(std::shared_ptr<const Universe> u, Orientation o, bool det_agents, bool det_envs,
                          int depth = 2, int horizon = 2) {
  FrameworkSpec s;
  s.universe = std::move(u);
  s.orientation = o;
  s.deterministic_agents = det_agents;
  s.deterministic_environments = det_envs;
  s.table_depth = depth;
  s.reward_horizon = horizon;
  s.integer_rewards = s.universe->integer_rewards();
  return s;
}

inline FrameworkSpec ap(bool det = false, int depth = 2) {
  return spec(binary_universe(), Orientation::agent_first, det, det, depth, depth);
}
inline FrameworkSpec pa(bool det = false, int depth = 2) {
  return spec(binary_universe(), Orientation::percept_first, det, det, depth, depth);
}

inline History hist(const FrameworkSpec& s, std::initializer_list<const char*> names) {
  std::vector<std::string> v(names.begin(), names.end());
  return validate_history(v, s);
}

/// Independent oracle: walks every alternating symbol sequence of length t with an odometer and
/// sums probability-weighted cumulative rewards. Shares no code with the evaluator's recursion.
inline Rational brute_force_value(const Agent& pi, const Environment& mu, int t) {
  const auto& u = pi.spec().u();
  const Orientation o = pi.spec().orientation;
  std::vector<std::size_t> sizes;
  for (int i = 0; i < t; ++i)
    sizes.push_back(expected_kind(o, static_cast<std::size_t>(i)) == SymbolKind::action ? u.action_count()
                                                                                         : u.percept_count());
  std::vector<std::size_t> digit(static_cast<std::size_t>(t), 0);
  Rational total(0);
  while (true) {
    Rational weight(1);
    Rational rewards(0);
    std::vector<Symbol> syms;
    for (int i = 0; i < t && weight != 0; ++i) {
      const auto k = static_cast<std::size_t>(i);
      const bool action = expected_kind(o, k) == SymbolKind::action;
      const Symbol s = action ? Symbol::action(static_cast<std::uint32_t>(digit[k]))
                              : Symbol::percept(static_cast<std::uint32_t>(digit[k]));
      const History h(o, syms);
      weight *= action ? pi(h).probability(s) : mu(h).probability(s);
      if (!action) rewards += u.reward(s);
      syms.push_back(s);
    }
    total += weight * rewards;
    std::size_t i = digit.size();
    while (i > 0) {
      --i;
      if (++digit[i] < sizes[i]) break;
      digit[i] = 0;
      if (i == 0) return total;
    }
    if (digit.empty()) return total;
  }
}

}  // namespace fx
