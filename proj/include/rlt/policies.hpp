#pragma once

#include "rlt/core.hpp"

#include <algorithm>
#include <functional>
#include <optional>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace rlt {

enum class PolicyKind : std::uint8_t { agent, environment };

using PolicyFormula = std::function<Distribution(const History&)>;

/// Tail rules for histories missing from a policy table.
struct FixedRule {
  Symbol symbol;
};
struct UniformRule {};
struct FormulaRule {
  std::shared_ptr<const PolicyFormula> formula;
};
using DefaultRule = std::variant<FixedRule, UniformRule, FormulaRule>;

inline DefaultRule formula_rule(PolicyFormula f) {
  return FormulaRule{std::make_shared<const PolicyFormula>(std::move(f))};
}

/// Symbols available at h: the framework's restriction if one is declared, else the whole alphabet.
inline std::vector<Symbol> available(const FrameworkSpec& spec, const History& h) {
  if (h.orientation() != spec.orientation)
    throw Error(ErrorCode::wrong_orientation, "history orientation differs from the framework's");
  if (spec.availability) {
    auto it = spec.availability->restricted.find(h);
    if (it != spec.availability->restricted.end()) return it->second;
  }
  return spec.u().alphabet(h.next_kind());
}

/// Table-represented agent or environment: explicit entries plus a tail rule.
template <PolicyKind K>
class Policy {
 public:
  using Table = std::map<History, Distribution>;
  static constexpr PolicyKind kind = K;
  static constexpr SymbolKind emits = K == PolicyKind::agent ? SymbolKind::action : SymbolKind::percept;

  Policy(FrameworkSpec spec, Table table, DefaultRule rule, std::string label = {})
      : spec_(std::move(spec)),
        table_(std::make_shared<const Table>(std::move(table))),
        rule_(std::move(rule)),
        label_(std::move(label)),
        memo_(std::make_shared<Memo>()) {
    spec_.validate();
    for (const auto& [h, d] : *table_) {
      check_domain(h);
      if (static_cast<int>(h.size()) > spec_.table_depth)
        throw Error(ErrorCode::invalid_policy, "table entry deeper than table_depth");
      check_output(h, d);
    }
    if (const auto* fixed = std::get_if<FixedRule>(&rule_)) {
      if (fixed->symbol.kind != emits || !spec_.u().contains(fixed->symbol))
        throw Error(ErrorCode::invalid_policy, "tail symbol has the wrong kind");
    }
  }

  const FrameworkSpec& spec() const { return spec_; }
  const Table& table() const { return *table_; }
  const DefaultRule& rule() const { return rule_; }
  const std::string& label() const { return label_; }
  void set_label(std::string l) { label_ = std::move(l); }

  /// π(h) / μ(h): table entry if present, else the tail rule.
  Distribution operator()(const History& h) const {
    check_domain(h);
    if (auto it = table_->find(h); it != table_->end()) return it->second;
    return std::visit(
        [&](const auto& r) -> Distribution {
          using R = std::decay_t<decltype(r)>;
          if constexpr (std::is_same_v<R, FixedRule>) {
            Distribution d = Distribution::point(r.symbol);
            check_output(h, d);
            return d;
          } else if constexpr (std::is_same_v<R, UniformRule>) {
            const auto avail = available(spec_, h);
            Distribution d = Distribution::uniform(avail);
            check_output(h, d);
            return d;
          } else {
            {
              std::lock_guard lock(memo_->mutex);
              if (auto m = memo_->values.find(h); m != memo_->values.end()) return m->second;
            }
            Distribution d = (*r.formula)(h);
            check_output(h, d);
            std::lock_guard lock(memo_->mutex);
            memo_->values.emplace(h, d);
            return d;
          }
        },
        rule_);
  }

  Rational probability(Symbol s, const History& h) const { return (*this)(h).probability(s); }

  /// Same behaviour with the tail rule tabulated on every in-domain history of length ≤ depth.
  Policy materialized(int depth) const {
    Table t = *table_;
    for (const auto& h : enumerate_histories(spec_.u(), spec_.orientation, static_cast<std::size_t>(depth))) {
      if (in_domain(h) && !t.contains(h)) t.emplace(h, (*this)(h));
    }
    return Policy(spec_.with_depth(std::max(depth, spec_.table_depth)), std::move(t), rule_, label_);
  }

  /// Same behaviour restricted to the given histories; everything else falls back to `tail`.
  Policy restricted_to(const std::set<History>& histories, DefaultRule tail, int depth) const {
    Table t;
    for (const auto& h : histories)
      if (in_domain(h)) t.emplace(h, (*this)(h));
    return Policy(spec_.with_depth(depth), std::move(t), std::move(tail), label_);
  }

  /// Re-stamps the policy into another framework with identical histories (inclusion maps).
  Policy rebased(const FrameworkSpec& target) const {
    if (target.orientation != spec_.orientation || !(*target.universe == *spec_.universe))
      throw Error(ErrorCode::wrong_framework, "rebase requires identical histories");
    FrameworkSpec s = target;
    s.table_depth = std::max(target.table_depth, spec_.table_depth);
    s.reward_horizon = spec_.reward_horizon;
    return Policy(std::move(s), *table_, rule_, label_);
  }

  bool in_domain(const History& h) const {
    return h.orientation() == spec_.orientation &&
           (K == PolicyKind::agent ? h.agent_turn() : h.environment_turn());
  }

  bool is_deterministic_up_to(int depth) const {
    for (const auto& h : enumerate_histories(spec_.u(), spec_.orientation, static_cast<std::size_t>(depth)))
      if (in_domain(h) && !(*this)(h).is_point_mass()) return false;
    return true;
  }

 private:
  struct Memo {
    std::mutex mutex;
    std::map<History, Distribution> values;
  };

  void check_domain(const History& h) const {
    if (h.orientation() != spec_.orientation)
      throw Error(ErrorCode::wrong_orientation, "history orientation differs from the policy's framework");
    const bool agent_turn = h.agent_turn();
    if ((K == PolicyKind::agent) != agent_turn)
      throw Error(ErrorCode::wrong_turn, K == PolicyKind::agent ? "agent queried on an environment turn"
                                                                : "environment queried on an agent turn");
  }

  void check_output(const History& h, const Distribution& d) const {
    if (d.kind() != emits) throw Error(ErrorCode::invalid_policy, "distribution over the wrong alphabet");
    for (const auto& [s, p] : d.entries())
      if (!spec_.u().contains(s)) throw Error(ErrorCode::unknown_symbol, "support symbol not in universe");
    const bool det = K == PolicyKind::agent ? spec_.deterministic_agents : spec_.deterministic_environments;
    if (det && !d.is_point_mass())
      throw Error(ErrorCode::not_deterministic, "non-point-mass output in a deterministic framework");
    if (spec_.availability) {
      const auto avail = available(spec_, h);
      for (const auto& [s, p] : d.entries())
        if (std::find(avail.begin(), avail.end(), s) == avail.end())
          throw Error(ErrorCode::unavailable_symbol, "support outside the availability set");
    }
    if constexpr (K == PolicyKind::environment) {
      if (static_cast<int>(h.size()) > spec_.reward_horizon)
        for (const auto& [s, p] : d.entries())
          if (spec_.u().reward(s) != 0)
            throw Error(ErrorCode::horizon_violation,
                        "nonzero-reward percept emitted past the reward horizon " +
                            std::to_string(spec_.reward_horizon));
    }
  }

  FrameworkSpec spec_;
  std::shared_ptr<const Table> table_;
  DefaultRule rule_;
  std::string label_;
  std::shared_ptr<Memo> memo_;
};

using Agent = Policy<PolicyKind::agent>;
using Environment = Policy<PolicyKind::environment>;

inline Distribution eval_agent(const Agent& pi, const History& h) { return pi(h); }
inline Distribution eval_environment(const Environment& mu, const History& h) { return mu(h); }

/// Compares two policies on every in-domain history of length ≤ depth.
template <PolicyKind K>
bool equal_up_to(const Policy<K>& a, const Policy<K>& b, int depth) {
  if (a.spec().orientation != b.spec().orientation) return false;
  for (const auto& h : enumerate_histories(a.spec().u(), a.spec().orientation, static_cast<std::size_t>(depth)))
    if (a.in_domain(h) && !(a(h) == b(h))) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Simple policies

inline Agent constant_agent(const FrameworkSpec& spec, Symbol action, std::string label = {}) {
  return Agent(spec, {}, FixedRule{action}, label.empty() ? "always-" + spec.u().name(action) : std::move(label));
}

inline Agent uniform_agent(const FrameworkSpec& spec, std::string label = "uniform") {
  return Agent(spec, {}, UniformRule{}, std::move(label));
}

inline Agent formula_agent(const FrameworkSpec& spec, PolicyFormula f, std::string label = {}) {
  return Agent(spec, {}, formula_rule(std::move(f)), std::move(label));
}

inline Environment constant_environment(const FrameworkSpec& spec, Symbol percept, std::string label = {}) {
  return Environment(spec, {}, FixedRule{percept},
                     label.empty() ? "always-" + spec.u().name(percept) : std::move(label));
}

/// Deterministic environment that always emits the designated zero-reward percept.
inline Environment zero_environment(const FrameworkSpec& spec) {
  return constant_environment(spec, spec.u().zero_percept(), "zero");
}

inline Environment formula_environment(const FrameworkSpec& spec, PolicyFormula f, std::string label = {}) {
  return Environment(spec, {}, formula_rule(std::move(f)), std::move(label));
}

// ---------------------------------------------------------------------------
// Availability and randomization

/// Union of supports over a (possibly restricted) family at h.
template <PolicyKind K>
std::vector<Symbol> availability(const std::vector<Policy<K>>& family, const History& h) {
  std::set<Symbol> out;
  for (const auto& p : family) {
    if (h.orientation() != p.spec().orientation)
      throw Error(ErrorCode::wrong_orientation, "history orientation differs from the family's");
    for (const auto& s : p(h).support()) out.insert(s);
  }
  return {out.begin(), out.end()};
}

inline std::vector<Symbol> availability(const FrameworkSpec& spec, const History& h) { return available(spec, h); }

enum class RandomizeMode : std::uint8_t { agents, environments, both };

/// F^a, F^e or F^ae from a framework that is deterministic in the randomized component(s).
inline FrameworkSpec randomize(const FrameworkSpec& spec, RandomizeMode mode) {
  FrameworkSpec out = spec;
  const bool agents = mode != RandomizeMode::environments;
  const bool envs = mode != RandomizeMode::agents;
  if ((agents && !spec.deterministic_agents) || (envs && !spec.deterministic_environments))
    throw Error(ErrorCode::already_randomized, "component is already randomized");
  if (agents) out.deterministic_agents = false;
  if (envs) out.deterministic_environments = false;
  const bool ra = !out.deterministic_agents;
  const bool re = !out.deterministic_environments;
  out.randomized = ra && re ? Randomization::both : ra ? Randomization::agents
                                                  : re ? Randomization::environments
                                                       : Randomization::none;
  return out;
}

// ---------------------------------------------------------------------------
// Proof-bearing environment constructors

/// Deterministic μ with R(μ(g)) = 1 iff g = h.
inline Environment build_indicator_environment(const FrameworkSpec& spec, const History& h) {
  if (h.orientation() != spec.orientation)
    throw Error(ErrorCode::wrong_orientation, "indicator history has the wrong orientation");
  if (!h.environment_turn()) throw Error(ErrorCode::wrong_turn, "indicator history must be an environment turn");
  const auto unit = spec.u().percept_with_reward(Rational(1));
  if (!unit) throw Error(ErrorCode::no_unit_reward_percept, "universe has no reward-1 percept");
  const Symbol zero = spec.u().zero_percept();
  const int len = static_cast<int>(h.size());
  FrameworkSpec s = spec.with_depth(std::max(spec.table_depth, len)).with_horizon(std::max(spec.reward_horizon, len));
  return Environment(std::move(s), {{h, Distribution::point(*unit)}}, FixedRule{zero}, "indicator");
}

/// Deterministic μ: nonzero reward at h⌢x, zero on the rest of the subtree below h, μ0 elsewhere.
inline Environment build_cutoff_environment(const FrameworkSpec& spec, const Environment& mu0, const History& h,
                                            Symbol x) {
  if (h.orientation() != spec.orientation)
    throw Error(ErrorCode::wrong_orientation, "cutoff history has the wrong orientation");
  if (!h.agent_turn()) throw Error(ErrorCode::wrong_turn, "cutoff history must be an agent turn");
  if (!x.is_action() || !spec.u().contains(x))
    throw Error(ErrorCode::action_unavailable, "cutoff symbol is not an action");
  const auto avail = available(spec, h);
  if (std::find(avail.begin(), avail.end(), x) == avail.end())
    throw Error(ErrorCode::action_unavailable, spec.u().name(x) + " is unavailable at the cutoff history");
  auto reward_percept = spec.u().percept_with_reward(Rational(1));
  if (!reward_percept) {
    for (const auto& p : spec.u().percepts())
      if (spec.u().reward(p) != 0) {
        reward_percept = p;
        break;
      }
  }
  if (!reward_percept) throw Error(ErrorCode::degenerate_rewards, "universe has no nonzero-reward percept");
  const Symbol zero = spec.u().zero_percept();
  const History hx = h.extended(x);
  const Symbol rp = *reward_percept;
  const auto univ = spec.universe;
  PolicyFormula f = [mu0, h, hx, rp, zero, univ](const History& g) -> Distribution {
    if (g == hx) return Distribution::point(rp);
    const Distribution base = mu0(g);
    if (!base.is_point_mass()) throw Error(ErrorCode::not_deterministic, "cutoff base environment must be deterministic");
    if (h.is_prefix_of(g)) {
      const Symbol s = base.point_symbol();
      return Distribution::point(univ->reward(s) == 0 ? s : zero);
    }
    return base;
  };
  const int horizon = std::max(mu0.spec().reward_horizon, static_cast<int>(hx.size()));
  FrameworkSpec s = spec.with_horizon(horizon);
  s.table_depth = std::max(spec.table_depth, static_cast<int>(hx.size()));
  return Environment(std::move(s), {{hx, Distribution::point(rp)}}, formula_rule(std::move(f)), "cutoff");
}

namespace detail {
inline void require_environment_turns(const FrameworkSpec& spec, const std::vector<History>& hs) {
  for (const auto& h : hs) {
    if (h.orientation() != spec.orientation)
      throw Error(ErrorCode::wrong_orientation, "history has the wrong orientation");
    if (!h.environment_turn()) throw Error(ErrorCode::wrong_turn, "expected an environment-turn history");
  }
}
inline bool pairwise_non_prefix(const std::vector<History>& hs) {
  for (std::size_t i = 0; i < hs.size(); ++i)
    for (std::size_t j = 0; j < hs.size(); ++j)
      if (i != j && hs[i].is_prefix_of(hs[j])) return false;
  return true;
}
}  // namespace detail

/// Deterministic μ rewarding antichain member i with K − i and everything else with 0.
inline Environment build_descending_environment(const FrameworkSpec& spec, const std::vector<History>& antichain) {
  detail::require_environment_turns(spec, antichain);
  if (!detail::pairwise_non_prefix(antichain))
    throw Error(ErrorCode::not_an_antichain, "some member is a prefix of another");
  const auto k = static_cast<std::int64_t>(antichain.size());
  Environment::Table table;
  int depth = spec.table_depth;
  for (std::int64_t i = 0; i < k; ++i) {
    auto p = spec.u().percept_with_reward(Rational(k - i));
    if (!p)
      throw Error(ErrorCode::insufficient_reward_alphabet,
                  "no percept with reward " + std::to_string(k - i));
    table.emplace(antichain[static_cast<std::size_t>(i)], Distribution::point(*p));
    depth = std::max(depth, static_cast<int>(antichain[static_cast<std::size_t>(i)].size()));
  }
  const Symbol zero = spec.u().zero_percept();
  FrameworkSpec s = spec.with_depth(depth).with_horizon(std::max(spec.reward_horizon, depth));
  return Environment(std::move(s), std::move(table), FixedRule{zero}, "descending");
}

struct FlexibleEnvironment {
  Environment environment;
  std::vector<Symbol> unit_percepts;  // y_i, reward 1
  std::vector<Symbol> zero_percepts;  // ŷ_i, reward 0
};

/// Stochastic μ with μ(y_i|h_i) = p_i, μ(ŷ_i|h_i) = 1 − p_i, point masses on the J entries and a
/// zero-reward point mass everywhere else.
inline FlexibleEnvironment build_flexible_environment(const FrameworkSpec& spec,
                                                      const std::vector<std::pair<History, Rational>>& i_entries,
                                                      const std::vector<std::pair<History, Symbol>>& j_entries) {
  std::vector<History> ih, jh;
  for (const auto& [h, p] : i_entries) ih.push_back(h);
  for (const auto& [h, y] : j_entries) jh.push_back(h);
  detail::require_environment_turns(spec, ih);
  detail::require_environment_turns(spec, jh);
  if (!detail::pairwise_non_prefix(ih))
    throw Error(ErrorCode::condition_c1_violation, "I-histories must be pairwise non-prefix");
  std::set<History> jset;
  for (const auto& h : jh)
    if (!jset.insert(h).second) throw Error(ErrorCode::condition_c2_violation, "duplicate J-history");
  for (const auto& h : ih)
    if (jset.contains(h)) throw Error(ErrorCode::condition_c2_violation, "I and J share a history");
  for (const auto& [h, y] : j_entries) {
    const auto avail = available(spec, h);
    if (!y.is_percept() || std::find(avail.begin(), avail.end(), y) == avail.end() || spec.u().reward(y) != 0)
      throw Error(ErrorCode::condition_c3_violation, "J percept must be available with reward 0");
  }
  const Symbol zero = spec.u().zero_percept();
  std::optional<Symbol> unit;
  if (!i_entries.empty()) {
    unit = spec.u().percept_with_reward(Rational(1));
    if (!unit) throw Error(ErrorCode::no_unit_reward_percept, "universe has no reward-1 percept");
  }
  FlexibleEnvironment out{zero_environment(spec), {}, {}};
  Environment::Table table;
  int depth = spec.table_depth;
  int horizon = spec.reward_horizon;
  for (const auto& [h, p] : i_entries) {
    if (p < 0 || p > 1) throw Error(ErrorCode::invalid_distribution, "probability outside [0,1]");
    table.emplace(h, Distribution({{*unit, p}, {zero, Rational(1) - p}}));
    out.unit_percepts.push_back(*unit);
    out.zero_percepts.push_back(zero);
    depth = std::max(depth, static_cast<int>(h.size()));
    horizon = std::max(horizon, static_cast<int>(h.size()));
  }
  for (const auto& [h, y] : j_entries) {
    table.emplace(h, Distribution::point(y));
    depth = std::max(depth, static_cast<int>(h.size()));
  }
  FrameworkSpec s = spec.with_depth(depth).with_horizon(horizon);
  out.environment = Environment(std::move(s), std::move(table), FixedRule{zero}, "flexible");
  return out;
}

// ---------------------------------------------------------------------------
// Mixture agent

/// Conditional reach probability π_*(h): the product of π's choices along h.
inline Rational reach_probability(const Agent& pi, const History& h) {
  Rational r(1);
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (h[i].is_action()) {
      r *= pi.probability(h[i], h.prefix(i));
      if (r == 0) break;
    }
  }
  return r;
}

/// σ whose value in every environment is w·V^π + (1−w)·V^ρ.
inline Agent mixture_agent(const Agent& pi, const Agent& rho, const Rational& w) {
  if (!same_framework(pi.spec(), rho.spec()))
    throw Error(ErrorCode::framework_mismatch, "mixture components live in different frameworks");
  if (w < 0 || w > 1) throw Error(ErrorCode::weight_out_of_range, "mixture weight outside [0,1]");
  const FrameworkSpec spec = pi.spec();
  PolicyFormula f = [pi, rho, w, spec](const History& h) -> Distribution {
    const Rational den = w * reach_probability(pi, h) + (1 - w) * reach_probability(rho, h);
    const auto avail = available(spec, h);
    if (den == 0) return Distribution::uniform(avail);
    std::vector<Distribution::Entry> entries;
    for (const auto& x : avail) {
      const History hx = h.extended(x);
      const Rational num = w * reach_probability(pi, hx) + (1 - w) * reach_probability(rho, hx);
      if (num != 0) entries.emplace_back(x, num / den);
    }
    return Distribution(std::move(entries));
  };
  Agent sigma(spec, {}, formula_rule(std::move(f)),
              "mix(" + to_string(w) + "," + pi.label() + "," + rho.label() + ")");
  return sigma.materialized(spec.table_depth);
}

}  // namespace rlt
