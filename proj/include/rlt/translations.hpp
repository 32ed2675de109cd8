#pragma once

#include "rlt/report.hpp"

#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>

namespace rlt {

enum class Claim : std::uint8_t { none, pre, weak, strong };

constexpr std::string_view claim_name(Claim c) {
  switch (c) {
    case Claim::none: return "none";
    case Claim::pre: return "pre";
    case Claim::weak: return "weak";
    case Claim::strong: return "strong";
  }
  return "?";
}

using AgentMap = std::function<Agent(const Agent&)>;
using EnvMap = std::function<Environment(const Environment&)>;
using DependencyFn = std::function<std::vector<History>(const History&)>;

/// (•^*, •_*): agents go source → destination, environments go destination → source.
struct Translation {
  std::string id;
  FrameworkSpec source;
  FrameworkSpec dest;
  AgentMap agent_map;
  EnvMap env_map;
  DependencyFn dependency;
  /// Destination agent → source agent, used to carry disagreement witnesses back.
  AgentMap witness_lift;
  Claim claimed = Claim::none;

  bool has_env_map() const { return static_cast<bool>(env_map); }
};

inline FrameworkSpec oriented(const FrameworkSpec& base, Orientation o) {
  FrameworkSpec s = base;
  s.orientation = o;
  s.availability = nullptr;
  return s;
}

/// π^*, tabulated to the destination table depth.
inline Agent apply_agent_map(const Translation& t, const Agent& pi) {
  if (!same_framework(pi.spec(), t.source))
    throw Error(ErrorCode::wrong_framework, "agent does not belong to the source of " + t.id);
  Agent out = t.agent_map(pi);
  if (!same_framework(out.spec(), t.dest))
    throw Error(ErrorCode::wrong_framework, "agent map of " + t.id + " left the destination framework");
  return out.materialized(t.dest.table_depth);
}

/// μ_*, tabulated to the source table depth.
inline Environment apply_env_map(const Translation& t, const Environment& mu) {
  if (!t.has_env_map()) throw Error(ErrorCode::missing_env_map, t.id + " has no environment map");
  if (!same_framework(mu.spec(), t.dest))
    throw Error(ErrorCode::wrong_framework, "environment does not belong to the destination of " + t.id);
  Environment out = t.env_map(mu);
  if (!same_framework(out.spec(), t.source))
    throw Error(ErrorCode::wrong_framework, "environment map of " + t.id + " left the source framework");
  return out.materialized(t.source.table_depth);
}

// ---------------------------------------------------------------------------
// Catalog

inline Translation identity_translation(const FrameworkSpec& spec) {
  Translation t;
  t.id = "identity";
  t.source = spec;
  t.dest = spec;
  t.agent_map = [](const Agent& pi) { return pi; };
  t.env_map = [](const Environment& mu) { return mu; };
  t.dependency = [](const History& h) { return std::vector<History>{h}; };
  t.witness_lift = [](const Agent& pi) { return pi; };
  t.claimed = Claim::strong;
  return t;
}

/// percept-first → agent-first: π^*(h) = π(y0⌢h); μ_* emits y0 first, then μ_*(y⌢h) = μ(h).
inline Translation prepend_percept(const FrameworkSpec& base, Symbol y0) {
  if (!y0.is_percept() || !base.u().contains(y0))
    throw Error(ErrorCode::unknown_symbol, "prepend-percept needs a percept");
  Translation t;
  t.id = "prepend-percept:" + base.u().name(y0);
  t.source = oriented(base, Orientation::percept_first);
  t.dest = oriented(base, Orientation::agent_first);
  const FrameworkSpec src = t.source, dst = t.dest;
  t.agent_map = [dst, y0](const Agent& pi) {
    return formula_agent(dst, [pi, y0](const History& h) { return pi(h.prepended(y0)); }, "pp(" + pi.label() + ")");
  };
  t.env_map = [src, y0](const Environment& mu) {
    return formula_environment(
        src.with_horizon(mu.spec().reward_horizon + 1),
        [mu, y0](const History& g) { return g.empty() ? Distribution::point(y0) : mu(g.suffix(1)); },
        "pp(" + mu.label() + ")");
  };
  t.dependency = [y0](const History& h) { return std::vector<History>{h.prepended(y0)}; };
  t.witness_lift = [src](const Agent& pi) {
    return formula_agent(src, [pi](const History& g) { return pi(g.suffix(1)); }, "times(" + pi.label() + ")");
  };
  t.claimed = Claim::strong;
  return t;
}

/// percept-first → agent-first: π^* plays x0 first, then π^*(x⌢h) = π(h); μ_*(h) = μ(x0⌢h).
inline Translation prepend_action(const FrameworkSpec& base, Symbol x0) {
  if (!x0.is_action() || !base.u().contains(x0))
    throw Error(ErrorCode::unknown_symbol, "prepend-action needs an action");
  Translation t;
  t.id = "prepend-action:" + base.u().name(x0);
  t.source = oriented(base, Orientation::percept_first);
  t.dest = oriented(base, Orientation::agent_first);
  const FrameworkSpec src = t.source, dst = t.dest;
  t.agent_map = [dst, x0](const Agent& pi) {
    return formula_agent(
        dst, [pi, x0](const History& h) { return h.empty() ? Distribution::point(x0) : pi(h.suffix(1)); },
        "pa(" + pi.label() + ")");
  };
  t.env_map = [src, x0](const Environment& mu) {
    return formula_environment(src.with_horizon(std::max(mu.spec().reward_horizon - 1, 0)),
                               [mu, x0](const History& g) { return mu(g.prepended(x0)); }, "pa(" + mu.label() + ")");
  };
  t.dependency = [](const History& h) {
    return h.empty() ? std::vector<History>{} : std::vector<History>{h.suffix(1)};
  };
  t.claimed = Claim::pre;
  return t;
}

/// agent-first → percept-first: π^*(h⌢y) = π(ȟ); μ_*(h⌢x) = μ(ȟ).
inline Translation local_reverse_translation(const FrameworkSpec& base) {
  Translation t;
  t.id = "local-reverse";
  t.source = oriented(base, Orientation::agent_first);
  t.dest = oriented(base, Orientation::percept_first);
  const FrameworkSpec src = t.source, dst = t.dest;
  t.agent_map = [dst](const Agent& pi) {
    return formula_agent(dst, [pi](const History& g) { return pi(local_reverse(g.prefix(g.size() - 1))); },
                         "lr(" + pi.label() + ")");
  };
  t.env_map = [src](const Environment& mu) {
    return formula_environment(src.with_horizon(mu.spec().reward_horizon + 1),
                               [mu](const History& g) { return mu(local_reverse(g.prefix(g.size() - 1))); },
                               "lr(" + mu.label() + ")");
  };
  t.dependency = [](const History& g) { return std::vector<History>{local_reverse(g.prefix(g.size() - 1))}; };
  t.claimed = Claim::weak;
  return t;
}

/// agent-first → percept-first: π^×(y⌢h) = π(h). No environment map.
inline Translation times_map(const FrameworkSpec& base) {
  Translation t;
  t.id = "times-map";
  t.source = oriented(base, Orientation::agent_first);
  t.dest = oriented(base, Orientation::percept_first);
  const FrameworkSpec dst = t.dest;
  t.agent_map = [dst](const Agent& pi) {
    return formula_agent(dst, [pi](const History& g) { return pi(g.suffix(1)); }, "times(" + pi.label() + ")");
  };
  t.dependency = [](const History& g) { return std::vector<History>{g.suffix(1)}; };
  return t;
}

/// agent-first → percept-first: π^*(x|h) = Σ_{x0} π(x0|⟨⟩)·π(x|x0⌢h). No environment map.
inline Translation sum_map(const FrameworkSpec& base) {
  Translation t;
  t.id = "sum-map";
  t.source = oriented(base, Orientation::agent_first);
  t.dest = oriented(base, Orientation::percept_first);
  const FrameworkSpec dst = t.dest;
  t.agent_map = [dst](const Agent& pi) {
    return formula_agent(
        dst,
        [pi](const History& h) {
          std::map<Symbol, Rational> mass;
          const Distribution first = pi(History(Orientation::agent_first));
          for (const auto& [x0, p0] : first.entries()) {
            const Distribution next = pi(h.prepended(x0));
            for (const auto& [x, p] : next.entries()) mass[x] += p0 * p;
          }
          return Distribution(std::vector<Distribution::Entry>(mass.begin(), mass.end()));
        },
        "sum(" + pi.label() + ")");
  };
  const auto actions = base.u().actions();
  t.dependency = [actions](const History& h) {
    std::vector<History> out{History(Orientation::agent_first)};
    for (const auto& x0 : actions) out.push_back(h.prepended(x0));
    return out;
  };
  return t;
}

/// agent-first → percept-first: π^*(h) = π(x0⌢h). No environment map.
inline Translation drop_first_action(const FrameworkSpec& base, Symbol x0) {
  if (!x0.is_action() || !base.u().contains(x0))
    throw Error(ErrorCode::unknown_symbol, "drop-first-action needs an action");
  Translation t;
  t.id = "drop-first-action:" + base.u().name(x0);
  t.source = oriented(base, Orientation::agent_first);
  t.dest = oriented(base, Orientation::percept_first);
  const FrameworkSpec dst = t.dest;
  t.agent_map = [dst, x0](const Agent& pi) {
    return formula_agent(dst, [pi, x0](const History& h) { return pi(h.prepended(x0)); }, "drop(" + pi.label() + ")");
  };
  t.dependency = [x0](const History& h) { return std::vector<History>{h.prepended(x0)}; };
  return t;
}

// ---------------------------------------------------------------------------
// Randomization variants and inclusions

enum class Variant : std::uint8_t { F, Fa, Fe, Fae };

constexpr std::string_view variant_name(Variant v) {
  switch (v) {
    case Variant::F: return "F";
    case Variant::Fa: return "F^a";
    case Variant::Fe: return "F^e";
    case Variant::Fae: return "F^ae";
  }
  return "?";
}

inline Variant parse_variant(std::string_view s) {
  for (auto v : {Variant::F, Variant::Fa, Variant::Fe, Variant::Fae})
    if (variant_name(v) == s) return v;
  throw Error(ErrorCode::not_an_inclusion, "unknown framework variant " + std::string(s));
}

/// The variant of a deterministic base framework.
inline FrameworkSpec variant_spec(const FrameworkSpec& base, Variant v) {
  if (!base.deterministic_agents || !base.deterministic_environments)
    throw Error(ErrorCode::already_randomized, "variants are built from a deterministic base");
  switch (v) {
    case Variant::F: return base;
    case Variant::Fa: return randomize(base, RandomizeMode::agents);
    case Variant::Fe: return randomize(base, RandomizeMode::environments);
    case Variant::Fae: return randomize(base, RandomizeMode::both);
  }
  return base;
}

/// Edges of the diamond along which identity/inclusion maps form weak translations.
inline const std::vector<std::pair<Variant, Variant>>& positive_edges() {
  static const std::vector<std::pair<Variant, Variant>> edges{
      {Variant::Fe, Variant::F},  {Variant::Fe, Variant::Fa}, {Variant::Fe, Variant::Fae},
      {Variant::F, Variant::Fa},  {Variant::Fae, Variant::Fa}};
  return edges;
}

inline bool is_positive_edge(Variant from, Variant to) {
  for (const auto& e : positive_edges())
    if (e.first == from && e.second == to) return true;
  return false;
}

/// Identity agent map with the inclusion environment map along a positive edge.
inline Translation inclusion(const FrameworkSpec& base, Variant from, Variant to) {
  if (from != to && !is_positive_edge(from, to))
    throw Error(ErrorCode::not_an_inclusion, std::string(variant_name(from)) + "->" + std::string(variant_name(to)) +
                                                 " is not an inclusion edge");
  Translation t;
  t.id = "inclusion:" + std::string(variant_name(from)) + "->" + std::string(variant_name(to));
  t.source = variant_spec(base, from);
  t.dest = variant_spec(base, to);
  const FrameworkSpec src = t.source, dst = t.dest;
  t.agent_map = [dst](const Agent& pi) { return pi.rebased(dst); };
  t.env_map = [src](const Environment& mu) { return mu.rebased(src); };
  t.dependency = [](const History& h) { return std::vector<History>{h}; };
  t.witness_lift = [src](const Agent& pi) { return pi.rebased(src); };
  t.claimed = Claim::weak;
  return t;
}

// ---------------------------------------------------------------------------
// Composition

/// T1: F → F′ followed by T2: F′ → F″.
inline Translation compose(const Translation& t1, const Translation& t2) {
  if (!same_framework(t1.dest, t2.source))
    throw Error(ErrorCode::spec_mismatch, "cannot compose " + t1.id + " with " + t2.id);
  Translation t;
  t.id = t1.id + " . " + t2.id;
  t.source = t1.source;
  t.dest = t2.dest;
  t.agent_map = [t1, t2](const Agent& pi) { return t2.agent_map(t1.agent_map(pi)); };
  if (t1.has_env_map() && t2.has_env_map())
    t.env_map = [t1, t2](const Environment& mu) { return t1.env_map(t2.env_map(mu)); };
  if (t1.dependency && t2.dependency)
    t.dependency = [t1, t2](const History& h) {
      std::set<History> out;
      for (const auto& g : t2.dependency(h))
        for (const auto& f : t1.dependency(g)) out.insert(f);
      return std::vector<History>(out.begin(), out.end());
    };
  if (t1.witness_lift && t2.witness_lift)
    t.witness_lift = [t1, t2](const Agent& pi) { return t1.witness_lift(t2.witness_lift(pi)); };
  t.claimed = std::min(t1.claimed, t2.claimed);
  return t;
}

/// Parses a catalog identifier; "T1 . T2" composes left to right.
inline Translation make_translation(std::string_view id, const FrameworkSpec& base) {
  const auto dot = id.find(" . ");
  if (dot != std::string_view::npos)
    return compose(make_translation(id.substr(0, dot), base), make_translation(id.substr(dot + 3), base));
  const auto colon = id.find(':');
  const std::string head(id.substr(0, colon));
  const std::string arg = colon == std::string_view::npos ? std::string() : std::string(id.substr(colon + 1));
  if (head == "prepend-percept") return prepend_percept(base, base.u().lookup(arg));
  if (head == "prepend-action") return prepend_action(base, base.u().lookup(arg));
  if (head == "drop-first-action") return drop_first_action(base, base.u().lookup(arg));
  if (head == "local-reverse") return local_reverse_translation(base);
  if (head == "times-map") return times_map(base);
  if (head == "sum-map") return sum_map(base);
  if (head == "identity") {
    FrameworkSpec s = base;
    if (arg == "percept-first") s.orientation = Orientation::percept_first;
    else if (arg == "agent-first") s.orientation = Orientation::agent_first;
    return identity_translation(s);
  }
  if (head == "inclusion") {
    const auto arrow = arg.find("->");
    if (arrow == std::string::npos) throw Error(ErrorCode::not_an_inclusion, "inclusion edge must read A->B");
    return inclusion(base, parse_variant(arg.substr(0, arrow)), parse_variant(arg.substr(arrow + 2)));
  }
  throw Error(ErrorCode::config_parse_error, "unknown translation " + std::string(id));
}

// ---------------------------------------------------------------------------
// Law checks

namespace detail {

inline int compare_depth(const FrameworkSpec& a, const FrameworkSpec& b) {
  return std::max({a.table_depth, b.table_depth, a.reward_horizon, b.reward_horizon}) + 2;
}

inline Witness condition1_witness(const Agent& pi, const Agent& rho, const Agent& pis, const Agent& rhos,
                                  const Environment& mu, const Environment& mus) {
  Witness w;
  w.add_agent("pi", pi);
  w.add_agent("rho", rho);
  w.add_agent("pi*", pis);
  w.add_agent("rho*", rhos);
  w.add_environment("mu", mu);
  w.add_environment("mu_*", mus);
  w.claim("pi*", "mu");
  w.claim("rho*", "mu");
  w.claim("pi", "mu_*");
  w.claim("rho", "mu_*");
  w.note = "V(pi*,mu) <= V(rho*,mu) differs from V(pi,mu_*) <= V(rho,mu_*)";
  return w;
}

inline LawReport condition1_on_pairs(const Translation& t, const std::vector<Agent>& agents,
                                     const std::vector<std::pair<std::size_t, std::size_t>>& pairs,
                                     const std::vector<Environment>& envs) {
  if (!t.has_env_map()) throw Error(ErrorCode::missing_env_map, t.id + " has no environment map");
  LawReport r;
  r.law = Law::condition1;
  r.scope = std::to_string(pairs.size()) + " agent pairs x " + std::to_string(envs.size()) + " environments";
  std::vector<Agent> images;
  images.reserve(agents.size());
  for (const auto& a : agents) images.push_back(apply_agent_map(t, a));
  for (const auto& mu : envs) {
    const Environment mus = apply_env_map(t, mu);
    std::vector<Rational> dst, src;
    for (std::size_t i = 0; i < agents.size(); ++i) {
      dst.push_back(value(images[i], mu));
      src.push_back(value(agents[i], mus));
    }
    for (const auto& [a, b] : pairs) {
      ++r.instances_checked;
      if ((dst[a] <= dst[b]) != (src[a] <= src[b])) {
        r.verdict = Verdict::fail;
        r.witness = condition1_witness(agents[a], agents[b], images[a], images[b], mu, mus);
        return r;
      }
    }
  }
  r.vacuous = r.instances_checked == 0;
  return r;
}

}  // namespace detail

/// Condition 1 over every ordered pair of the agent corpus and every destination environment.
inline LawReport check_condition1(const Translation& t, const std::vector<Agent>& agents,
                                  const std::vector<Environment>& envs) {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < agents.size(); ++i)
    for (std::size_t j = 0; j < agents.size(); ++j)
      if (i != j) pairs.emplace_back(i, j);
  return detail::condition1_on_pairs(t, agents, pairs, envs);
}

/// Condition 1 over explicit (π, ρ) pairs.
inline LawReport check_condition1(const Translation& t, const std::vector<std::pair<Agent, Agent>>& agent_pairs,
                                  const std::vector<Environment>& envs) {
  std::vector<Agent> agents;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (const auto& [a, b] : agent_pairs) {
    agents.push_back(a);
    agents.push_back(b);
    pairs.emplace_back(agents.size() - 2, agents.size() - 1);
  }
  return detail::condition1_on_pairs(t, agents, pairs, envs);
}

/// Condition 2: every ρ agreeing with π on dependency(h) has ρ^*(h) = π^*(h).
inline LawReport check_condition2(const Translation& t, const Agent& pi, const History& h,
                                  const std::vector<Agent>& perturbations) {
  LawReport r;
  r.law = Law::condition2;
  if (!t.dependency) {
    r.verdict = Verdict::inconclusive;
    r.scope = "no dependency function declared";
    return r;
  }
  const auto deps = t.dependency(h);
  const Distribution target = t.agent_map(pi)(h);
  for (const auto& rho : perturbations) {
    bool agrees = true;
    for (const auto& g : deps)
      if (!(rho(g) == pi(g))) {
        agrees = false;
        break;
      }
    if (!agrees) continue;
    ++r.instances_checked;
    if (!(t.agent_map(rho)(h) == target)) {
      r.verdict = Verdict::fail;
      Witness w;
      w.add_agent("pi", pi);
      w.add_agent("rho", rho);
      w.note = "rho agrees with pi on the declared dependency set yet rho^* and pi^* differ at the queried history";
      r.witness = std::move(w);
      return r;
    }
  }
  r.scope = std::to_string(deps.size()) + " dependency histories, " + std::to_string(perturbations.size()) +
            " perturbations";
  r.vacuous = r.instances_checked == 0;
  return r;
}

/// Single-point flips of π at each given history, one agent per alternative distribution.
inline std::vector<Agent> point_perturbations(const Agent& pi, const std::vector<History>& at) {
  std::vector<Agent> out;
  for (const auto& h : at) {
    if (!pi.in_domain(h)) continue;
    const Distribution current = pi(h);
    for (const auto& x : available(pi.spec(), h)) {
      const Distribution alt = Distribution::point(x);
      if (alt == current) continue;
      Agent::Table table = pi.table();
      table.insert_or_assign(h, alt);
      const int depth = std::max(pi.spec().table_depth, static_cast<int>(h.size()));
      out.emplace_back(pi.spec().with_depth(depth), std::move(table), pi.rule(), pi.label() + "~flip");
    }
  }
  return out;
}

/// Condition 3 on a finite slice: looks for ρ matching π^* on S1 but not on S2. Never fails.
inline LawReport check_condition3(const Translation& t, const Agent& pi, const std::vector<History>& s1,
                                  const std::vector<Agent>& family, const std::vector<History>& s2) {
  LawReport r;
  r.law = Law::condition3;
  r.verdict = Verdict::inconclusive;
  r.scope = "finite slice of " + std::to_string(s2.size()) + " histories";
  const Agent target = t.agent_map(pi);
  for (const auto& rho : family) {
    ++r.instances_checked;
    const Agent img = t.agent_map(rho);
    bool match = true;
    for (const auto& h : s1)
      if (!(img(h) == target(h))) {
        match = false;
        break;
      }
    if (!match) continue;
    for (const auto& h : s2)
      if (!(img(h) == target(h))) {
        r.verdict = Verdict::pass;
        Witness w;
        w.add_agent("pi", pi);
        w.add_agent("rho", rho);
        w.note = "rho^* matches pi^* on S1 and differs on the slice";
        r.witness = std::move(w);
        return r;
      }
  }
  return r;
}

/// Pairwise injectivity of μ ↦ μ_* on the corpus; policies compared by evaluation.
inline LawReport check_injectivity(const Translation& t, const std::vector<Environment>& envs) {
  LawReport r;
  r.law = Law::injectivity;
  r.scope = std::to_string(envs.size()) + " environments";
  std::vector<Environment> images;
  for (const auto& mu : envs) images.push_back(apply_env_map(t, mu));
  for (std::size_t i = 0; i < envs.size(); ++i)
    for (std::size_t j = i + 1; j < envs.size(); ++j) {
      const int dd = detail::compare_depth(envs[i].spec(), envs[j].spec());
      if (equal_up_to(envs[i], envs[j], dd)) continue;
      ++r.instances_checked;
      const int sd = detail::compare_depth(images[i].spec(), images[j].spec());
      if (equal_up_to(images[i], images[j], sd)) {
        r.verdict = Verdict::fail;
        Witness w;
        w.add_environment("mu", envs[i]);
        w.add_environment("nu", envs[j]);
        w.add_environment("mu_*", images[i]);
        w.add_environment("nu_*", images[j]);
        w.note = "distinct environments with identical images";
        r.witness = std::move(w);
        return r;
      }
    }
  r.vacuous = r.instances_checked == 0;
  return r;
}

/// Condition 1 plus injectivity.
inline LawReport check_weak(const Translation& t, const std::vector<Agent>& agents,
                            const std::vector<Environment>& envs) {
  if (!t.has_env_map()) throw Error(ErrorCode::missing_env_map, t.id + " has no environment map");
  LawReport r;
  r.law = Law::weak;
  r.parts.push_back(check_condition1(t, agents, envs));
  r.parts.push_back(check_injectivity(t, envs));
  r.scope = "corpus-relative";
  for (const auto& p : r.parts) {
    r.instances_checked += p.instances_checked;
    if (!p.passed()) {
      r.verdict = Verdict::fail;
      r.witness = p.witness;
    }
  }
  return r;
}

/// μ ≁ ν in the destination must be reflected as μ_* ≁ ν_*; relative to the given corpora.
inline LawReport check_strong(const Translation& t, const std::vector<Environment>& envs,
                              const std::vector<Agent>& dest_agents, const std::vector<Agent>& source_agents) {
  if (!t.has_env_map()) throw Error(ErrorCode::missing_env_map, t.id + " has no environment map");
  LawReport r;
  r.law = Law::strongness;
  r.scope = "corpus-relative: " + std::to_string(envs.size()) + " environments, " +
            std::to_string(dest_agents.size()) + " destination agents, " + std::to_string(source_agents.size()) +
            " source agents";
  if (envs.size() < 2) {
    r.vacuous = true;
    return r;
  }
  if (dest_agents.empty() || source_agents.empty()) throw Error(ErrorCode::empty_corpus, "agent corpus is empty");
  std::vector<Environment> images;
  std::vector<std::vector<Rational>> dst, src;
  for (const auto& mu : envs) {
    images.push_back(apply_env_map(t, mu));
    std::vector<Rational> d, s;
    for (const auto& a : dest_agents) d.push_back(value(a, mu));
    for (const auto& a : source_agents) s.push_back(value(a, images.back()));
    dst.push_back(std::move(d));
    src.push_back(std::move(s));
  }
  std::vector<Agent> lifted;
  if (t.witness_lift)
    for (const auto& a : dest_agents) lifted.push_back(t.witness_lift(a));
  for (std::size_t i = 0; i < envs.size(); ++i)
    for (std::size_t j = i + 1; j < envs.size(); ++j) {
      const auto dest_w = find_disagreement(dst[i], dst[j]);
      if (!dest_w) continue;
      ++r.instances_checked;
      if (!lifted.empty()) {
        const Agent& lp = lifted[dest_w->pi];
        const Agent& lr = lifted[dest_w->rho];
        if ((value(lp, images[i]) <= value(lr, images[i])) != (value(lp, images[j]) <= value(lr, images[j])))
          continue;
      }
      if (find_disagreement(src[i], src[j])) continue;
      r.verdict = Verdict::fail;
      Witness w;
      w.add_agent("pi", dest_agents[dest_w->pi]);
      w.add_agent("rho", dest_agents[dest_w->rho]);
      w.add_environment("mu", envs[i]);
      w.add_environment("nu", envs[j]);
      w.add_environment("mu_*", images[i]);
      w.add_environment("nu_*", images[j]);
      w.claim("pi", "mu");
      w.claim("rho", "mu");
      w.claim("pi", "nu");
      w.claim("rho", "nu");
      w.note = "mu and nu disagree about pi vs rho, but no source agent pair in the corpus separates mu_* and nu_*";
      r.witness = std::move(w);
      return r;
    }
  r.vacuous = r.instances_checked == 0;
  return r;
}

}  // namespace rlt
