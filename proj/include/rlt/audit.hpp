#pragma once

#include "rlt/corpus.hpp"
#include "rlt/translations.hpp"

#include <array>
#include <future>
#include <optional>
#include <string>
#include <vector>

namespace rlt {

enum class Argument : std::uint8_t { mixture, descending_chain, cardinality, nonstrong_demo };
enum class Outcome : std::uint8_t { contradiction_exhibited, no_contradiction_found };

constexpr std::string_view argument_name(Argument a) {
  switch (a) {
    case Argument::mixture: return "mixture";
    case Argument::descending_chain: return "descending_chain";
    case Argument::cardinality: return "cardinality";
    case Argument::nonstrong_demo: return "nonstrong_demo";
  }
  return "?";
}

constexpr std::string_view outcome_name(Outcome o) {
  return o == Outcome::contradiction_exhibited ? "contradiction_exhibited" : "no_contradiction_found";
}

/// One exact identity or inequality verified during an audit.
struct Check {
  std::string name;
  bool holds = false;
  std::string detail;
};

struct CandidateOutcome {
  std::string label;
  Outcome outcome = Outcome::no_contradiction_found;
  std::optional<Witness> witness;
  std::vector<Check> checks;
};

struct AuditReport {
  std::string target;
  Argument argument = Argument::mixture;
  Outcome outcome = Outcome::no_contradiction_found;
  std::optional<Witness> witness;
  std::vector<Check> checks;
  std::vector<CandidateOutcome> candidates;

  bool all_checks_hold() const {
    for (const auto& c : checks)
      if (!c.holds) return false;
    return true;
  }
};

struct CandidateEnvMap {
  std::string label;
  EnvMap map;
};

// ---------------------------------------------------------------------------
// Shared helpers

namespace detail {

inline Symbol mode_symbol(const Distribution& d) {
  const auto& e = d.entries();
  std::size_t best = 0;
  for (std::size_t i = 1; i < e.size(); ++i)
    if (e[i].second > e[best].second) best = i;
  return e[best].first;
}

inline Symbol lowest_support_symbol(const Distribution& d) { return d.entries().front().first; }

inline std::string distribution_label(const Universe& u, const Distribution& d) {
  std::string out;
  for (const auto& [s, p] : d.entries()) {
    if (!out.empty()) out += "+";
    out += (p == 1 ? std::string() : to_string(p) + "*") + u.name(s);
  }
  return out;
}

/// First ordered pair (a, b) whose destination and source comparisons disagree.
inline std::optional<std::pair<std::size_t, std::size_t>> order_violation(const std::vector<Rational>& dst,
                                                                          const std::vector<Rational>& src) {
  for (std::size_t a = 0; a < dst.size(); ++a)
    for (std::size_t b = 0; b < dst.size(); ++b)
      if (a != b && (dst[a] <= dst[b]) != (src[a] <= src[b])) return std::make_pair(a, b);
  return std::nullopt;
}

inline bool violates_condition1(const Witness& w) {
  auto get = [&](const std::string& a, const std::string& e) {
    for (const auto& c : w.values)
      if (c.agent == a && c.environment == e) return c.value;
    throw Error(ErrorCode::invalid_policy, "witness lacks V(" + a + "," + e + ")");
  };
  return (get("pi*", "mu") <= get("rho*", "mu")) != (get("pi", "mu_*") <= get("rho", "mu_*"));
}

inline Check check(std::string name, bool holds, std::string detail = {}) {
  return Check{std::move(name), holds, std::move(detail)};
}

}  // namespace detail

/// [lo, hi] containing every V in a framework with integer rewards: rewards accrue only at
/// environment turns of length ≤ the reward horizon.
inline std::pair<Rational, Rational> declared_value_range(const FrameworkSpec& spec) {
  if (!spec.u().integer_rewards())
    throw Error(ErrorCode::range_too_small, "value range is declared only for integer rewards");
  std::int64_t turns = 0;
  for (int n = 0; n <= spec.reward_horizon; ++n)
    if (!is_agent_turn(spec.orientation, static_cast<std::size_t>(n))) ++turns;
  Rational lo(0), hi(0);
  for (const auto& r : spec.u().rewards()) {
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  return {lo * turns, hi * turns};
}

// ---------------------------------------------------------------------------
// Planted agent and environment maps

/// Identity on histories; the policy is re-stamped into `target`.
inline AgentMap identity_agent_map(const FrameworkSpec& target) {
  return [target](const Agent& pi) { return pi.rebased(target); };
}

inline EnvMap identity_env_map(const FrameworkSpec& target) {
  return [target](const Environment& mu) { return mu.rebased(target); };
}

/// Deterministic π^*(h): the most likely action of π(h), smallest symbol on ties.
inline AgentMap mode_agent_map(const FrameworkSpec& target) {
  return [target](const Agent& pi) {
    return formula_agent(target, [pi](const History& h) { return Distribution::point(detail::mode_symbol(pi(h))); },
                         "mode(" + pi.label() + ")");
  };
}

/// Deterministic π^*(h): the smallest action in the support of π(h).
inline AgentMap lowest_support_agent_map(const FrameworkSpec& target) {
  return [target](const Agent& pi) {
    return formula_agent(
        target, [pi](const History& h) { return Distribution::point(detail::lowest_support_symbol(pi(h))); },
        "low(" + pi.label() + ")");
  };
}

/// π^*(h) = keep·π(h) + (1 − keep)·uniform.
inline AgentMap mixing_agent_map(const FrameworkSpec& target, Rational keep) {
  return [target, keep](const Agent& pi) {
    return formula_agent(
        target,
        [pi, keep, target](const History& h) {
          const auto avail = available(target, h);
          const Rational share = (1 - keep) / static_cast<std::int64_t>(avail.size());
          std::vector<Distribution::Entry> e;
          const Distribution d = pi(h);
          for (const auto& x : avail) e.emplace_back(x, keep * d.probability(x) + share);
          return Distribution(std::move(e));
        },
        "mix" + to_string(keep) + "(" + pi.label() + ")");
  };
}

/// Ignores π entirely.
inline AgentMap constant_agent_map(const FrameworkSpec& target) {
  return [target](const Agent&) { return constant_agent(target, target.u().actions().front(), "const"); };
}

/// Deterministic μ_*: most likely percept of μ, zero percept past `horizon`.
inline EnvMap mode_env_map(const FrameworkSpec& target, int horizon) {
  return [target, horizon](const Environment& mu) {
    const Symbol zero = target.u().zero_percept();
    return formula_environment(
        target.with_horizon(horizon),
        [mu, horizon, zero](const History& g) {
          if (static_cast<int>(g.size()) > horizon) return Distribution::point(zero);
          return Distribution::point(detail::mode_symbol(mu(g)));
        },
        "mode(" + mu.label() + ")");
  };
}

/// Deterministic μ_*: smallest percept in the support of μ, zero percept past `horizon`.
inline EnvMap lowest_support_env_map(const FrameworkSpec& target, int horizon) {
  return [target, horizon](const Environment& mu) {
    const Symbol zero = target.u().zero_percept();
    return formula_environment(
        target.with_horizon(horizon),
        [mu, horizon, zero](const History& g) {
          if (static_cast<int>(g.size()) > horizon) return Distribution::point(zero);
          return Distribution::point(detail::lowest_support_symbol(mu(g)));
        },
        "low(" + mu.label() + ")");
  };
}

/// A candidate translation assembled from explicit maps; π^*(h) is declared to depend on π(h).
inline Translation candidate_translation(std::string id, const FrameworkSpec& source, const FrameworkSpec& dest,
                                         AgentMap agents, EnvMap envs, bool pointwise = true) {
  Translation t;
  t.id = std::move(id);
  t.source = source;
  t.dest = dest;
  t.agent_map = std::move(agents);
  t.env_map = std::move(envs);
  if (pointwise)
    t.dependency = [](const History& h) { return std::vector<History>{h}; };
  else
    t.dependency = [](const History&) { return std::vector<History>{}; };
  return t;
}

// ---------------------------------------------------------------------------
// Mixture falsifier

/// Every environment map whose image is tabulated on the two-symbol histories ⟨x⟩ by a grid
/// distribution (point masses and half/half pairs) and continues with one of the tail rules
/// zero, drop-first, local-reverse or prepend-y.
inline std::vector<CandidateEnvMap> depth1_env_map_family(const Translation& t) {
  if (t.source.orientation != Orientation::agent_first || t.dest.orientation != Orientation::percept_first)
    throw Error(ErrorCode::wrong_framework, "the depth-1 family maps percept-first environments to agent-first ones");
  const FrameworkSpec src = t.source;
  const Universe& u = src.u();
  const auto percepts = u.percepts();
  std::vector<Distribution> grid;
  for (const auto& y : percepts) grid.push_back(Distribution::point(y));
  for (std::size_t i = 0; i < percepts.size(); ++i)
    for (std::size_t j = i + 1; j < percepts.size(); ++j)
      grid.emplace_back(std::vector<Distribution::Entry>{{percepts[i], make_rational(1, 2)},
                                                          {percepts[j], make_rational(1, 2)}});
  if (src.deterministic_environments) std::erase_if(grid, [](const Distribution& d) { return !d.is_point_mass(); });

  using Tail = std::function<Distribution(const Environment&, const History&)>;
  const Symbol zero = u.zero_percept();
  std::vector<std::pair<std::string, Tail>> tails{
      {"zero", [zero](const Environment&, const History&) { return Distribution::point(zero); }},
      {"drop-first", [](const Environment& mu, const History& g) { return mu(g.suffix(1)); }},
      {"local-reverse",
       [](const Environment& mu, const History& g) { return mu(local_reverse(g.prefix(g.size() - 1))); }}};
  for (const auto& y : percepts)
    tails.emplace_back("prepend-" + u.name(y),
                       [y](const Environment& mu, const History& g) { return mu(g.prepended(y)); });

  const auto actions = u.actions();
  std::vector<std::vector<std::size_t>> tables{{}};
  for (std::size_t a = 0; a < actions.size(); ++a) {
    std::vector<std::vector<std::size_t>> next;
    for (const auto& partial : tables)
      for (std::size_t g = 0; g < grid.size(); ++g) {
        auto ext = partial;
        ext.push_back(g);
        next.push_back(std::move(ext));
      }
    tables = std::move(next);
  }

  std::vector<CandidateEnvMap> out;
  for (const auto& choice : tables) {
    Environment::Table table;
    std::string label;
    for (std::size_t a = 0; a < actions.size(); ++a) {
      const History h = History(Orientation::agent_first).extended(actions[a]);
      table.emplace(h, grid[choice[a]]);
      label += u.name(actions[a]) + "->" + detail::distribution_label(u, grid[choice[a]]) + ";";
    }
    for (const auto& [tail_name, tail] : tails) {
      const std::string full = label + "tail=" + tail_name;
      out.push_back({full, [src, table, tail, full](const Environment& mu) {
                       const int horizon = std::max(2, mu.spec().reward_horizon + 1);
                       PolicyFormula f = [mu, tail](const History& g) { return tail(mu, g); };
                       return Environment(src.with_depth(std::max(1, src.table_depth)).with_horizon(horizon), table,
                                          formula_rule(std::move(f)), full);
                     }});
    }
  }
  return out;
}

/// Replays the mixture argument against every candidate environment map: the chosen agents are
/// forced into equal and unequal destination values that no choice of μ_* can mirror.
inline AuditReport falsify_mixture(const Translation& t, const std::vector<CandidateEnvMap>& candidates) {
  const bool drop = t.id.rfind("drop-first-action", 0) == 0;
  const bool sum = t.id == "sum-map";
  if (!drop && !sum) throw Error(ErrorCode::wrong_agent_map_kind, t.id + " is not drop-first-action or sum-map");
  const FrameworkSpec src = t.source;
  const FrameworkSpec dst = t.dest;
  const Universe& u = src.u();
  const auto actions = u.actions();
  const Symbol zero = u.zero_percept();
  std::optional<Symbol> reward;
  for (const auto& y : u.percepts())
    if (u.reward(y) != 0) reward = y;
  if (!reward) throw Error(ErrorCode::degenerate_rewards, "universe has no nonzero-reward percept");

  AuditReport report;
  report.target = t.id;
  report.argument = Argument::mixture;

  // Source agents, their images, and the destination environment.
  std::vector<std::pair<std::string, Agent>> agents;
  Environment mu = zero_environment(dst);
  const Rational half = make_rational(1, 2);
  // Pairs (i, j, k): agent k is the half/half mixture of agents i and j.
  std::vector<std::array<std::size_t, 3>> mixtures;
  // Pairs of agents whose images must coincide.
  std::vector<std::pair<std::size_t, std::size_t>> equal_images;
  if (drop) {
    const Symbol x0 = t.id.size() > 18 ? u.lookup(t.id.substr(18)) : actions[0];
    const Symbol x1 = x0 == actions[0] ? actions[1] : actions[0];
    const Agent pi = constant_agent(src, x0, "pi");
    const Agent rho = constant_agent(src, x1, "rho");
    const Agent sigma = formula_agent(
        src,
        [pi, rho, x0, x1](const History& h) {
          if (h.empty()) return Distribution({{x0, make_rational(1, 2)}, {x1, make_rational(1, 2)}});
          return h[0] == x0 ? pi(h) : rho(h);
        },
        "sigma");
    agents = {{"pi", pi}, {"rho", rho}, {"sigma", sigma}};
    mixtures.push_back({0, 1, 2});
    equal_images.emplace_back(2, 0);
    const Symbol r = *reward;
    mu = formula_environment(
        dst.with_horizon(2),
        [x0, r, zero](const History& g) {
          return Distribution::point(g.size() == 2 && g[1] == x0 ? r : zero);
        },
        "first-action-" + u.name(x0));
  } else {
    const Symbol x0 = actions[0];
    const Symbol x1 = actions[1];
    const Agent alpha = constant_agent(src, x0, "alpha");
    const Agent beta = constant_agent(src, x1, "beta");
    const Agent bend = Agent(src.with_depth(std::max(src.table_depth, 0)),
                             {{History(Orientation::agent_first), Distribution::point(x0)}}, FixedRule{x1}, "bend");
    Agent sigma = mixture_agent(alpha, beta, half);
    sigma.set_label("sigma");
    Agent theta = mixture_agent(alpha, bend, half);
    theta.set_label("theta");
    agents = {{"alpha", alpha}, {"beta", beta}, {"bend", bend}, {"sigma", sigma}, {"theta", theta}};
    mixtures.push_back({0, 1, 3});
    mixtures.push_back({0, 2, 4});
    equal_images.emplace_back(1, 2);
    const Symbol r = *reward;
    mu = formula_environment(
        dst.with_horizon(4),
        [x0, r, zero](const History& g) {
          return Distribution::point(g.size() == 4 && g[1] == x0 && g[3] == x0 ? r : zero);
        },
        "first-two-actions-" + u.name(x0));
  }

  std::vector<Agent> images;
  for (const auto& [name, a] : agents) images.push_back(apply_agent_map(t, a));

  // Image identities hold exactly on every history the destination environment can reach.
  const auto probe = enumerate_histories(u, dst.orientation, static_cast<std::size_t>(mu.spec().reward_horizon + 1));
  for (const auto& [i, j] : equal_images) {
    bool same = true;
    for (const auto& h : probe)
      if (h.agent_turn() && !(images[i](h) == images[j](h))) same = false;
    report.checks.push_back(detail::check(agents[i].first + "^* = " + agents[j].first + "^*", same,
                                          "compared on every agent-turn history of length <= " +
                                              std::to_string(mu.spec().reward_horizon + 1)));
  }
  std::vector<Rational> dest_values;
  for (const auto& img : images) dest_values.push_back(value(img, mu));

  report.outcome = Outcome::contradiction_exhibited;
  for (const auto& cand : candidates) {
    CandidateOutcome co;
    co.label = cand.label;
    const Environment mus = cand.map(mu);
    std::vector<Rational> src_values;
    for (const auto& [name, a] : agents) src_values.push_back(value(a, mus));
    bool mixture_ok = true;
    for (const auto& [i, j, k] : mixtures)
      if (src_values[k] != half * src_values[i] + half * src_values[j]) mixture_ok = false;
    co.checks.push_back(detail::check("mixture identity", mixture_ok));
    if (const auto v = detail::order_violation(dest_values, src_values)) {
      const auto [a, b] = *v;
      Witness w = detail::condition1_witness(agents[a].second, agents[b].second, images[a], images[b], mu, mus);
      const bool ok = detail::violates_condition1(w) && recheck_witness(w);
      co.checks.push_back(detail::check("Condition 1 violated by (" + agents[a].first + ", " + agents[b].first + ")",
                                        ok));
      co.witness = std::move(w);
      if (ok && mixture_ok) co.outcome = Outcome::contradiction_exhibited;
    } else {
      co.checks.push_back(detail::check("Condition 1 violation found", false));
    }
    if (co.outcome != Outcome::contradiction_exhibited) report.outcome = Outcome::no_contradiction_found;
    if (!report.witness && co.witness) report.witness = co.witness;
    report.candidates.push_back(std::move(co));
  }
  if (!report.all_checks_hold() || candidates.empty()) report.outcome = Outcome::no_contradiction_found;
  return report;
}

// ---------------------------------------------------------------------------
// Non-strongness of the times map

/// Builds μ, π, ρ with V^π_μ = V^ρ_μ while V^{π†}_μ ≠ V^{ρ†}_μ, where † is prepend-percept(y0)
/// followed by the times map. Hence μ ≁ μ_† for any environment map making † a pre-translation.
inline AuditReport demo_nonstrong_times_map(const FrameworkSpec& base) {
  const Universe& u = base.u();
  std::optional<Symbol> zero, y0;
  for (const auto& y : u.percepts()) {
    if (u.reward(y) == 0 && !zero) zero = y;
    if (u.reward(y) != 0 && !y0) y0 = y;
  }
  if (!zero || !y0) throw Error(ErrorCode::degenerate_rewards, "needs a reward-0 and a nonzero-reward percept");
  const auto actions = u.actions();
  const Symbol x0 = actions[0], x1 = actions[1];
  const Symbol z = *zero, y = *y0;

  const Translation pp = prepend_percept(base, y);
  const Translation dagger = compose(pp, times_map(base));
  const FrameworkSpec pa = dagger.source;

  AuditReport report;
  report.target = dagger.id;
  report.argument = Argument::nonstrong_demo;

  const Environment mu = formula_environment(
      pa.with_horizon(2),
      [z, y, x0](const History& g) {
        if (g.size() == 2 && g[1] == x0) return Distribution::point(y);
        return Distribution::point(z);
      },
      "mu");
  const Agent pi = formula_agent(
      pa, [y, x0, x1](const History& h) { return Distribution::point(h[0] == y ? x0 : x1); }, "pi");
  const Agent rho = constant_agent(pa, x1, "rho");
  const Agent pid = apply_agent_map(dagger, pi);
  const Agent rhod = apply_agent_map(dagger, rho);
  const Agent piddag = apply_agent_map(dagger, pid);

  Witness w;
  w.add_agent("pi", pi);
  w.add_agent("rho", rho);
  w.add_agent("pi_dag", pid);
  w.add_agent("rho_dag", rhod);
  w.add_environment("mu", mu);
  const Rational vpi = w.claim("pi", "mu");
  const Rational vrho = w.claim("rho", "mu");
  const Rational vpid = w.claim("pi_dag", "mu");
  const Rational vrhod = w.claim("rho_dag", "mu");
  w.note = "mu agrees about pi vs rho in one direction only after the translation";

  const History first = History(Orientation::percept_first).extended(z);
  report.checks.push_back(detail::check("initial percept of mu differs from " + u.name(y), !(mu(History(pa.orientation)) == Distribution::point(y))));
  report.checks.push_back(detail::check("V(pi,mu) = V(rho,mu)", vpi == vrho, to_string(vpi) + " = " + to_string(vrho)));
  report.checks.push_back(detail::check("pi_dag(" + u.name(x0) + "|<" + u.name(z) + ">) = 1",
                                        pid.probability(x0, first) == 1));
  report.checks.push_back(
      detail::check("V(pi_dag,mu) != V(rho_dag,mu)", vpid != vrhod, to_string(vpid) + " vs " + to_string(vrhod)));
  bool formula_ok = true, idempotent = true;
  for (const auto& h : agent_turn_histories(u, pa.orientation, 5)) {
    if (!(pid(h) == pi(h.suffix(1).prepended(y)))) formula_ok = false;
    if (!(piddag(h) == pid(h))) idempotent = false;
  }
  report.checks.push_back(detail::check("pi_dag(y^h) = pi(" + u.name(y) + "^h)", formula_ok));
  report.checks.push_back(detail::check("pi_dag_dag = pi_dag", idempotent));
  report.checks.push_back(detail::check("witness recomputes", recheck_witness(w)));
  report.witness = std::move(w);
  report.outcome = report.all_checks_hold() ? Outcome::contradiction_exhibited : Outcome::no_contradiction_found;
  return report;
}

// ---------------------------------------------------------------------------
// Descending chain

struct DescendingChainPlan {
  std::vector<Agent> agents;       // π_0..π_K
  std::vector<Agent> images;       // π^*_0..π^*_K
  std::vector<History> histories;  // h_0 = ⟨⟩, h_1..h_K
  std::vector<Symbol> actions;     // x_1..x_K (index 0 unused)
  std::vector<Rational> probabilities;  // p_i
  std::vector<Rational> margins;        // Δ_i
  std::vector<Rational> reach;          // F(h_i)
  std::vector<Rational> dest_values;    // V^{π^*_i}_μ
  std::vector<Rational> source_values;  // V^{π_i}_{μ_*}
  std::optional<Environment> environment;
  std::optional<Environment> image;
};

struct ChainResult {
  DescendingChainPlan plan;
  AuditReport report;
};

namespace detail {

/// The path Q: at each node the smallest symbol of positive probability.
class SmallestPath {
 public:
  SmallestPath(Agent pi, Environment mu) : pi_(std::move(pi)), mu_(std::move(mu)) {
    nodes_.emplace_back(pi_.spec().orientation);
  }
  const History& at(std::size_t n) {
    while (nodes_.size() <= n) {
      const History& h = nodes_.back();
      const Distribution d = h.agent_turn() ? pi_(h) : mu_(h);
      nodes_.push_back(h.extended(d.entries().front().first));
    }
    return nodes_[n];
  }
  Symbol child(std::size_t n) { return at(n + 1).back(); }

 private:
  Agent pi_;
  Environment mu_;
  std::vector<History> nodes_;
};

struct GainStep {
  Agent rho;
  Agent image;
  std::size_t node = 0;  // length of h⁺
  Symbol action;
};

/// A single-point flip ρ of π whose image agrees with π^* on every Q agent node shorter than
/// some h⁺ strictly beyond `after` and differs at h⁺, with an off-path action gaining mass.
inline std::optional<GainStep> gain_step(const Translation& t, const Agent& pi, const Agent& pis, SmallestPath& q,
                                           std::size_t after, bool strict_after, std::size_t cap) {
  const auto first_difference = [&](const Agent& img) -> std::optional<std::size_t> {
    for (std::size_t n = 0; n <= cap; ++n) {
      const History& h = q.at(n);
      if (h.agent_turn() && !(img(h) == pis(h))) return n;
    }
    return std::nullopt;
  };
  for (std::size_t n = 0; n <= cap; ++n) {
    const History g = q.at(n);
    if (!g.agent_turn() || n < after || (strict_after && n == after)) continue;
    std::vector<History> deps;
    if (t.dependency) {
      for (const auto& d : t.dependency(g))
        if (d.orientation() == t.source.orientation && d.agent_turn()) deps.push_back(d);
    } else {
      deps = agent_turn_histories(t.source.u(), t.source.orientation, g.size());
    }
    std::optional<GainStep> best;
    for (const auto& rho : point_perturbations(pi, deps)) {
      Agent img = t.agent_map(rho);
      const auto m = first_difference(img);
      if (!m || *m < after || (strict_after && *m == after)) continue;
      if (best && best->node <= *m) continue;
      const History& hp = q.at(*m);
      const Symbol on_path = q.child(*m);
      const Distribution a = img(hp), b = pis(hp);
      std::optional<Symbol> x;
      Rational gain(0);
      for (const auto& [s, p] : a.entries()) {
        if (s == on_path) continue;
        const Rational d = p - b.probability(s);
        if (d > gain) {
          gain = d;
          x = s;
        }
      }
      if (!x) continue;
      best = GainStep{rho, img, *m, *x};
    }
    if (best) return best;
  }
  return std::nullopt;
}

}  // namespace detail

/// Mechanized descending-chain argument against a candidate pre-translation into a framework with
/// randomized environments. Builds π_0..π_K and a flexible environment μ with
/// V^{π*_1}_μ > … > V^{π*_K}_μ > V^{π*_0}_μ, then maps back: K + 1 distinct destination values
/// cannot be order-embedded in the integer value range of the source.
inline ChainResult build_descending_chain(const Translation& t, int K = 6) {
  if (!t.has_env_map()) throw Error(ErrorCode::missing_env_map, t.id + " has no environment map");
  const auto [lo, hi] = declared_value_range(t.source);
  if (Rational(K) <= hi - lo + 1)
    throw Error(ErrorCode::range_too_small,
                "chain length " + std::to_string(K) + " does not exceed the source range [" + to_string(lo) + ", " +
                    to_string(hi) + "] plus one");
  if (t.dest.deterministic_environments)
    throw Error(ErrorCode::wrong_framework, "the chain needs randomized destination environments");

  ChainResult result;
  DescendingChainPlan& plan = result.plan;
  AuditReport& report = result.report;
  report.target = t.id;
  report.argument = Argument::descending_chain;

  const Agent pi0 = constant_agent(t.source, t.source.u().actions().front(), "pi_0");
  const Agent pi0s = t.agent_map(pi0);
  const Environment mu0 = zero_environment(t.dest);
  detail::SmallestPath q(pi0s, mu0);
  const std::size_t cap = static_cast<std::size_t>(4 * K + 8);

  plan.agents.push_back(pi0);
  plan.images.push_back(pi0s);
  plan.histories.emplace_back(t.dest.orientation);
  plan.actions.push_back(Symbol{});
  plan.probabilities.push_back(Rational(0));
  plan.margins.push_back(Rational(0));
  plan.reach.push_back(Rational(1));

  for (int k = 1; k <= K; ++k) {
    const auto step = detail::gain_step(t, pi0, pi0s, q, plan.histories.back().size(), true, cap);
    if (!step)
      throw Error(ErrorCode::chain_stalled, "no single-point flip of pi_0 disagrees beyond h_" +
                                                std::to_string(k - 1) + " with an off-path action for " + t.id);
    const History hk = q.at(step->node);
    Rational reach(1);
    for (std::size_t n = 0; n < hk.size(); ++n)
      if (q.at(n).agent_turn()) reach *= pi0s.probability(q.child(n), q.at(n));
    Rational p(1);
    if (k > 1) {
      std::optional<Rational> m;
      for (int j = 1; j < k; ++j) {
        Rational bound = plan.margins[static_cast<std::size_t>(j)];
        for (int e = 0; e < k - j; ++e) bound /= 2;
        if (!m || bound < *m) m = bound;
      }
      p = *m / 2;
    }
    Agent rho = step->rho;
    rho.set_label("pi_" + std::to_string(k));
    plan.agents.push_back(rho);
    plan.images.push_back(step->image);
    plan.histories.push_back(hk);
    plan.actions.push_back(step->action);
    plan.probabilities.push_back(p);
    plan.reach.push_back(reach);
    plan.margins.push_back(p * reach * (step->image.probability(step->action, hk) - pi0s.probability(step->action, hk)));
  }

  // Invariants of the plan.
  bool reach_pos = true, margins_pos = true, stated = true, tail = true, agree = true, lengthen = true;
  for (int i = 1; i <= K; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    if (plan.reach[ui] <= 0) reach_pos = false;
    if (plan.margins[ui] <= 0) margins_pos = false;
    if (!plan.histories[ui - 1].is_proper_prefix_of(plan.histories[ui])) lengthen = false;
    for (int j = 1; j < i && i < K; ++j) {
      Rational bound = plan.margins[static_cast<std::size_t>(j)];
      for (int e = 0; e < i - j; ++e) bound /= 2;
      if (!(plan.probabilities[ui + 1] < bound)) stated = false;
    }
    Rational rest(0);
    for (int m = i + 1; m <= K; ++m) rest += plan.probabilities[static_cast<std::size_t>(m)];
    if (!(rest < plan.margins[ui])) tail = false;
    const History& hi_ = plan.histories[ui];
    for (std::size_t n = 0; n < hi_.size(); ++n)
      if (q.at(n).agent_turn() && !(plan.images[ui](q.at(n)) == pi0s(q.at(n)))) agree = false;
    if (plan.images[ui](hi_) == pi0s(hi_)) agree = false;
  }
  report.checks.push_back(detail::check("p_1 = 1", plan.probabilities[1] == 1));
  report.checks.push_back(detail::check("histories strictly lengthen along Q", lengthen));
  report.checks.push_back(detail::check("reach weights F(h_i) > 0", reach_pos));
  report.checks.push_back(detail::check("margins Delta_i > 0", margins_pos));
  report.checks.push_back(detail::check("p_{i+1} < Delta_j/2^{i-j} for 1 <= j < i", stated));
  report.checks.push_back(detail::check("sum_{i>k} p_i < Delta_k", tail));
  report.checks.push_back(detail::check("pi_i^* agrees with pi_0^* before h_i and differs at h_i", agree));

  std::vector<std::pair<History, Rational>> i_entries;
  for (int i = 1; i <= K; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    i_entries.emplace_back(plan.histories[ui].extended(plan.actions[ui]), plan.probabilities[ui]);
  }
  std::vector<std::pair<History, Symbol>> j_entries;
  for (std::size_t n = 0; n <= plan.histories.back().size() + 1; ++n)
    if (q.at(n).environment_turn()) j_entries.emplace_back(q.at(n), q.child(n));
  const Environment mu = build_flexible_environment(t.dest, i_entries, j_entries).environment;
  plan.environment = mu;

  for (const auto& img : plan.images) plan.dest_values.push_back(value(img, mu));
  bool descending = plan.dest_values[static_cast<std::size_t>(K)] > plan.dest_values[0];
  for (int i = 1; i < K; ++i)
    if (!(plan.dest_values[static_cast<std::size_t>(i)] > plan.dest_values[static_cast<std::size_t>(i + 1)]))
      descending = false;
  std::string chain;
  for (const auto& v : plan.dest_values) chain += (chain.empty() ? "" : ", ") + to_string(v);
  report.checks.push_back(detail::check("V(pi_1^*) > ... > V(pi_K^*) > V(pi_0^*)", descending, chain));

  const Environment mus = apply_env_map(t, mu);
  plan.image = mus;
  bool in_range = true;
  for (const auto& a : plan.agents) {
    const Rational v = value(a, mus);
    if (!is_integer(v) || v < lo || v > hi) in_range = false;
    plan.source_values.push_back(v);
  }
  report.checks.push_back(detail::check("source values are integers in [" + to_string(lo) + ", " + to_string(hi) + "]",
                                        in_range));
  const auto violation = detail::order_violation(plan.dest_values, plan.source_values);
  if (violation) {
    const auto [a, b] = *violation;
    Witness w = detail::condition1_witness(plan.agents[a], plan.agents[b], plan.images[a], plan.images[b], mu, mus);
    const bool ok = detail::violates_condition1(w) && recheck_witness(w);
    report.checks.push_back(detail::check("Condition 1 violated by (pi_" + std::to_string(a) + ", pi_" +
                                              std::to_string(b) + ")",
                                          ok));
    report.witness = std::move(w);
  } else {
    report.checks.push_back(detail::check("Condition 1 violation found", false));
  }
  report.outcome = report.all_checks_hold() ? Outcome::contradiction_exhibited : Outcome::no_contradiction_found;
  return result;
}

// ---------------------------------------------------------------------------
// Cardinality

/// Mechanized cardinality argument against a candidate pre-translation from a fully randomized
/// framework into a deterministic one with a small integer value range.
inline AuditReport cardinality_audit(const Translation& t, int n = 6) {
  if (!t.has_env_map()) throw Error(ErrorCode::missing_env_map, t.id + " has no environment map");
  if (t.source.deterministic_agents || t.source.deterministic_environments)
    throw Error(ErrorCode::wrong_framework, "cardinality audit needs a fully randomized source");
  if (!t.dest.deterministic_agents || !t.dest.deterministic_environments)
    throw Error(ErrorCode::wrong_framework, "cardinality audit needs a deterministic destination");
  if (n < 1) throw Error(ErrorCode::range_too_small, "n must be positive");
  const auto [lo, hi] = declared_value_range(t.dest);
  if (hi - lo + 1 >= Rational(n + 1))
    throw Error(ErrorCode::range_too_small, "destination range [" + to_string(lo) + ", " + to_string(hi) +
                                                "] holds " + std::to_string(n + 1) + " integers");

  AuditReport report;
  report.target = t.id;
  report.argument = Argument::cardinality;

  const Agent pi = constant_agent(t.source, t.source.u().actions().front(), "pi");
  const Agent pis = t.agent_map(pi);
  const Environment mu0 = zero_environment(t.dest);
  detail::SmallestPath q(pis, mu0);
  const auto step = detail::gain_step(t, pi, pis, q, 0, true, static_cast<std::size_t>(t.dest.reward_horizon));
  if (!step) throw Error(ErrorCode::no_disagreement_found, "no single-point flip of pi changes pi^* along its path");
  Agent rho = step->rho;
  rho.set_label("rho");
  const History hplus = q.at(step->node);
  const Environment mu = build_cutoff_environment(t.dest, mu0, hplus, pis(hplus).point_symbol());
  const Environment mus = apply_env_map(t, mu);

  const Rational dpi = value(pis, mu), drho = value(step->image, mu);
  report.checks.push_back(detail::check("V(pi^*,mu) != V(rho^*,mu)", dpi != drho, to_string(dpi) + " vs " + to_string(drho)));
  const Rational spi = value(pi, mus), srho = value(rho, mus);
  if ((dpi <= drho) != (spi <= srho) || (drho <= dpi) != (srho <= spi)) {
    Witness w = (dpi <= drho) != (spi <= srho) ? detail::condition1_witness(pi, rho, pis, step->image, mu, mus)
                                               : detail::condition1_witness(rho, pi, step->image, pis, mu, mus);
    const bool ok = detail::violates_condition1(w) && recheck_witness(w);
    report.checks.push_back(detail::check("Condition 1 violated by (pi, rho)", ok));
    report.witness = std::move(w);
    report.outcome = report.all_checks_hold() ? Outcome::contradiction_exhibited : Outcome::no_contradiction_found;
    return report;
  }

  std::vector<Agent> sigmas, images;
  std::vector<Rational> src_values, dst_values;
  bool identity = true, integral = true;
  for (int k = 0; k <= n; ++k) {
    const Rational w = make_rational(k, n);
    Agent s = mixture_agent(pi, rho, w);
    s.set_label("sigma_" + to_string(w));
    images.push_back(t.agent_map(s));
    const Rational sv = value(s, mus);
    if (sv != w * spi + (1 - w) * srho) identity = false;
    src_values.push_back(sv);
    const Rational dv = value(images.back(), mu);
    if (!is_integer(dv) || dv < lo || dv > hi) integral = false;
    dst_values.push_back(dv);
    sigmas.push_back(std::move(s));
  }
  bool distinct = true;
  for (std::size_t i = 0; i + 1 < src_values.size(); ++i)
    if ((spi > srho && !(src_values[i] < src_values[i + 1])) || (spi < srho && !(src_values[i] > src_values[i + 1])))
      distinct = false;
  std::string census;
  for (const auto& v : src_values) census += (census.empty() ? "" : ", ") + to_string(v);
  report.checks.push_back(detail::check("V(sigma_w,mu_*) = w V(pi,mu_*) + (1-w) V(rho,mu_*)", identity));
  report.checks.push_back(detail::check("endpoints: sigma_0 = rho, sigma_1 = pi",
                                        src_values.front() == srho && src_values.back() == spi));
  report.checks.push_back(
      detail::check(std::to_string(n + 1) + " distinct exact values V(sigma_w,mu_*)", distinct, census));
  report.checks.push_back(detail::check("destination values are integers in [" + to_string(lo) + ", " +
                                            to_string(hi) + "]",
                                        integral));
  if (const auto v = detail::order_violation(dst_values, src_values)) {
    const auto [a, b] = *v;
    Witness w = detail::condition1_witness(sigmas[a], sigmas[b], images[a], images[b], mu, mus);
    const bool ok = detail::violates_condition1(w) && recheck_witness(w);
    report.checks.push_back(detail::check("Condition 1 violated by (" + sigmas[a].label() + ", " + sigmas[b].label() + ")", ok));
    report.witness = std::move(w);
  } else {
    report.checks.push_back(detail::check("Condition 1 violation found", false));
  }
  report.outcome = report.all_checks_hold() ? Outcome::contradiction_exhibited : Outcome::no_contradiction_found;
  return report;
}

// ---------------------------------------------------------------------------
// Diamond

/// Binary actions, rewards {0, 1}, agent-first and deterministic, reward horizon 7: V ∈ [0, 4].
inline FrameworkSpec default_diamond_base() {
  FrameworkSpec s;
  s.universe = std::make_shared<const Universe>(
      Universe::make({"x0", "x1"}, {{"y0", Rational(0)}, {"y1", Rational(1)}}));
  s.orientation = Orientation::agent_first;
  s.deterministic_agents = true;
  s.deterministic_environments = true;
  s.table_depth = 2;
  s.reward_horizon = 7;
  s.integer_rewards = true;
  return s;
}

/// Candidate translations between two variants, built from the planted maps.
inline std::vector<Translation> planted_candidates(const FrameworkSpec& base, Variant from, Variant to) {
  const FrameworkSpec src = variant_spec(base, from);
  const FrameworkSpec dst = variant_spec(base, to);
  std::vector<std::pair<std::string, AgentMap>> agent_maps;
  if (dst.deterministic_agents && !src.deterministic_agents) {
    agent_maps.emplace_back("mode", mode_agent_map(dst));
    agent_maps.emplace_back("lowest", lowest_support_agent_map(dst));
  } else if (!dst.deterministic_agents) {
    agent_maps.emplace_back("identity", identity_agent_map(dst));
    agent_maps.emplace_back("mix3/4", mixing_agent_map(dst, make_rational(3, 4)));
  } else {
    agent_maps.emplace_back("identity", identity_agent_map(dst));
  }
  std::vector<std::pair<std::string, EnvMap>> env_maps;
  if (src.deterministic_environments && !dst.deterministic_environments) {
    env_maps.emplace_back("mode", mode_env_map(src, src.reward_horizon));
    env_maps.emplace_back("lowest", lowest_support_env_map(src, src.reward_horizon));
  } else {
    env_maps.emplace_back("identity", identity_env_map(src));
  }
  std::vector<std::pair<std::size_t, std::size_t>> picks{{0, 0}};
  if (agent_maps.size() > 1) picks.emplace_back(1, 0);
  if (env_maps.size() > 1) picks.emplace_back(0, 1);
  std::vector<Translation> out;
  const std::string edge = std::string(variant_name(from)) + "->" + std::string(variant_name(to));
  for (const auto& [a, e] : picks)
    out.push_back(candidate_translation("candidate:" + edge + "[" + agent_maps[a].first + "," + env_maps[e].first + "]",
                                        src, dst, agent_maps[a].second, env_maps[e].second));
  return out;
}

struct DiamondCell {
  Variant from = Variant::F;
  Variant to = Variant::F;
  bool expected_positive = false;
  std::string method;
  std::string route;
  bool reproduced = false;
  std::optional<LawReport> weak;
  std::vector<AuditReport> audits;
};

struct DiamondMatrix {
  std::vector<DiamondCell> cells;
  bool reproduced() const {
    for (const auto& c : cells)
      if (!c.reproduced) return false;
    return cells.size() == 12;
  }
};

namespace detail {

/// Corpora for the weak check on an inclusion: every deterministic depth-2 policy, plus seeded
/// random ones where the framework is randomized.
inline std::pair<std::vector<Agent>, std::vector<Environment>> diamond_corpora(const Translation& t,
                                                                                std::uint64_t seed) {
  auto agents = all_deterministic_agents(t.source.with_depth(2), 2);
  if (!t.source.deterministic_agents)
    for (auto& a : random_agents(t.source.with_depth(2), 2, 8, seed)) agents.push_back(std::move(a));
  auto envs = all_deterministic_environments(t.dest.with_depth(2), 2);
  if (!t.dest.deterministic_environments)
    for (auto& e : random_environments(t.dest.with_depth(2), 2, 8, seed + 1)) envs.push_back(std::move(e));
  return {std::move(agents), std::move(envs)};
}

/// Carries a Condition 1 witness of pre . t . post back to t itself.
inline std::optional<Witness> pull_back(const Witness& w, const Translation& t, const std::optional<Translation>& pre,
                                        const std::optional<Translation>& post) {
  Agent pi = w.find_agent("pi"), rho = w.find_agent("rho");
  Environment mu = w.find_environment("mu");
  if (pre) {
    pi = pre->agent_map(pi);
    rho = pre->agent_map(rho);
  }
  if (post) mu = post->env_map(mu);
  pi = pi.rebased(t.source);
  rho = rho.rebased(t.source);
  mu = mu.rebased(t.dest);
  Witness out = condition1_witness(pi, rho, t.agent_map(pi), t.agent_map(rho), mu, t.env_map(mu));
  if (!violates_condition1(out) || !recheck_witness(out)) return std::nullopt;
  return out;
}

inline DiamondCell negative_cell(const FrameworkSpec& base, Variant from, Variant to) {
  DiamondCell cell;
  cell.from = from;
  cell.to = to;
  std::optional<Variant> pre_from, post_to;
  bool chain = true;
  using V = Variant;
  if (from == V::F && to == V::Fae) {
  } else if (from == V::F && to == V::Fe) {
    post_to = V::Fae;
  } else if (from == V::Fa && to == V::Fae) {
    pre_from = V::F;
  } else if (from == V::Fae && to == V::F) {
    chain = false;
  } else if (from == V::Fae && to == V::Fe) {
    chain = false;
    post_to = V::F;
  } else if (from == V::Fa && to == V::F) {
    chain = false;
    pre_from = V::Fae;
  } else if (from == V::Fa && to == V::Fe) {
    chain = false;
    pre_from = V::Fae;
    post_to = V::F;
  } else {
    throw Error(ErrorCode::not_an_inclusion, "no diagram chase for this pair");
  }
  std::optional<Translation> pre, post;
  if (pre_from) pre = inclusion(base, *pre_from, from);
  if (post_to) post = inclusion(base, to, *post_to);
  cell.method = chain ? "descending_chain" : "cardinality";
  cell.route = (pre ? std::string(variant_name(*pre_from)) + " -> " : std::string()) + std::string(variant_name(from)) +
               " -> " + std::string(variant_name(to)) +
               (post ? " -> " + std::string(variant_name(*post_to)) : std::string());
  cell.reproduced = true;
  for (const auto& cand : planted_candidates(base, from, to)) {
    Translation composite = cand;
    if (pre) composite = compose(*pre, composite);
    if (post) composite = compose(composite, *post);
    AuditReport r = chain ? build_descending_chain(composite, 6).report : cardinality_audit(composite, 6);
    CandidateOutcome pulled;
    pulled.label = cand.id;
    if (r.outcome == Outcome::contradiction_exhibited && r.witness) {
      pulled.witness = pull_back(*r.witness, cand, pre, post);
      pulled.checks.push_back(check("Condition 1 violated by the candidate itself", pulled.witness.has_value()));
      if (pulled.witness) pulled.outcome = Outcome::contradiction_exhibited;
    }
    if (pulled.outcome != Outcome::contradiction_exhibited) cell.reproduced = false;
    r.candidates.push_back(std::move(pulled));
    cell.audits.push_back(std::move(r));
  }
  if (cell.audits.empty()) cell.reproduced = false;
  return cell;
}

inline DiamondCell positive_cell(const FrameworkSpec& base, Variant from, Variant to, std::uint64_t seed) {
  DiamondCell cell;
  cell.from = from;
  cell.to = to;
  cell.expected_positive = true;
  cell.method = "check_weak";
  cell.route = std::string(variant_name(from)) + " -> " + std::string(variant_name(to));
  const Translation t = inclusion(base, from, to);
  const auto [agents, envs] = diamond_corpora(t, seed);
  cell.weak = check_weak(t, agents, envs);
  cell.reproduced = cell.weak->passed();
  return cell;
}

}  // namespace detail

/// The twelve ordered pairs of distinct variants with their machine-checked verdicts.
inline DiamondMatrix diamond_report(const FrameworkSpec& base, std::uint64_t seed = 1, bool parallel = true) {
  if (!base.deterministic_agents || !base.deterministic_environments)
    throw Error(ErrorCode::property_prerequisite_failed, "diamond base must be deterministic");
  if (!base.u().integer_rewards())
    throw Error(ErrorCode::property_prerequisite_failed, "diamond base must have integer rewards");
  try {
    const History root(base.orientation);
    const Symbol x0 = base.u().actions().front();
    History env_turn = root;
    if (env_turn.agent_turn()) env_turn = env_turn.extended(x0);
    (void)build_indicator_environment(base, env_turn);
    History agent_turn = root;
    if (!agent_turn.agent_turn()) agent_turn = agent_turn.extended(base.u().zero_percept());
    (void)build_cutoff_environment(base, zero_environment(base), agent_turn, x0);
  } catch (const Error& e) {
    throw Error(ErrorCode::property_prerequisite_failed, std::string("indicator/cutoff constructors failed: ") + e.what());
  }
  const std::vector<Variant> all{Variant::F, Variant::Fa, Variant::Fe, Variant::Fae};
  std::vector<std::pair<Variant, Variant>> pairs;
  for (auto a : all)
    for (auto b : all)
      if (a != b) pairs.emplace_back(a, b);
  auto run = [&base, seed](Variant a, Variant b) {
    return is_positive_edge(a, b) ? detail::positive_cell(base, a, b, seed) : detail::negative_cell(base, a, b);
  };
  DiamondMatrix m;
  if (parallel) {
    std::vector<std::future<DiamondCell>> jobs;
    for (const auto& [a, b] : pairs) jobs.push_back(std::async(std::launch::async, run, a, b));
    for (auto& j : jobs) m.cells.push_back(j.get());
  } else {
    for (const auto& [a, b] : pairs) m.cells.push_back(run(a, b));
  }
  return m;
}

}  // namespace rlt
