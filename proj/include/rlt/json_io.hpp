#pragma once

#include "rlt/audit.hpp"
#include "rlt/elections.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

namespace rlt {

using Json = nlohmann::json;

inline constexpr const char* version = "0.3.0";

inline Error parse_error(const std::string& where, const std::string& what) {
  return Error(ErrorCode::config_parse_error, where + ": " + what);
}

/// 64-bit FNV-1a, hex encoded.
inline std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw parse_error(path, "cannot open file");
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw parse_error(path, e.what());
  }
}

// ---------------------------------------------------------------------------
// Universe and framework

inline Json to_json(const Universe& u) {
  Json rewards = Json::object();
  for (std::size_t i = 0; i < u.percept_count(); ++i) rewards[u.percept_names()[i]] = to_string(u.rewards()[i]);
  return Json{{"actions", u.action_names()}, {"percepts", u.percept_names()}, {"rewards", rewards}};
}

inline std::shared_ptr<const Universe> universe_from_json(const Json& j, const std::string& where = "universe") {
  try {
    const auto actions = j.at("actions").get<std::vector<std::string>>();
    const auto percepts = j.at("percepts").get<std::vector<std::string>>();
    std::vector<Rational> rewards;
    for (const auto& p : percepts) {
      if (!j.at("rewards").contains(p)) throw parse_error(where, "no reward for percept " + p);
      const auto& r = j.at("rewards").at(p);
      rewards.push_back(r.is_number_integer() ? Rational(r.get<std::int64_t>()) : parse_rational(r.get<std::string>()));
    }
    for (const auto& n : actions)
      if (n.find('/') != std::string::npos) throw parse_error(where, "symbol names may not contain '/'");
    for (const auto& n : percepts)
      if (n.find('/') != std::string::npos) throw parse_error(where, "symbol names may not contain '/'");
    return std::make_shared<const Universe>(actions, percepts, rewards);
  } catch (const Json::exception& e) {
    throw parse_error(where, e.what());
  }
}

inline Json to_json(const FrameworkSpec& s) {
  return Json{{"orientation", orientation_name(s.orientation)},
              {"deterministic_agents", s.deterministic_agents},
              {"deterministic_environments", s.deterministic_environments},
              {"table_depth", s.table_depth},
              {"reward_horizon", s.reward_horizon},
              {"integer_rewards", s.integer_rewards}};
}

inline FrameworkSpec framework_from_json(const Json& j, std::shared_ptr<const Universe> u,
                                         const std::string& where = "framework") {
  try {
    FrameworkSpec s;
    s.universe = std::move(u);
    const auto o = j.value("orientation", std::string("agent-first"));
    if (o == "agent-first") s.orientation = Orientation::agent_first;
    else if (o == "percept-first") s.orientation = Orientation::percept_first;
    else throw parse_error(where, "unknown orientation " + o);
    s.deterministic_agents = j.value("deterministic_agents", false);
    s.deterministic_environments = j.value("deterministic_environments", false);
    s.table_depth = j.value("table_depth", 2);
    s.reward_horizon = j.value("reward_horizon", s.table_depth);
    s.integer_rewards = j.value("integer_rewards", s.universe->integer_rewards());
    s.validate();
    if (j.contains("variant")) s = variant_spec(s, parse_variant(j.at("variant").get<std::string>()));
    return s;
  } catch (const Json::exception& e) {
    throw parse_error(where, e.what());
  }
}

// ---------------------------------------------------------------------------
// Histories, distributions, policies

inline std::string history_key(const History& h, const Universe& u) {
  std::string out;
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (i) out += "/";
    out += u.name(h[i]);
  }
  return out;
}

inline History history_from_key(const std::string& key, const FrameworkSpec& spec) {
  std::vector<std::string> names;
  if (!key.empty()) {
    std::stringstream ss(key);
    std::string part;
    while (std::getline(ss, part, '/')) names.push_back(part);
  }
  return validate_history(names, spec);
}

inline Json to_json(const Distribution& d, const Universe& u) {
  Json out = Json::object();
  for (const auto& [s, p] : d.entries()) out[u.name(s)] = to_string(p);
  return out;
}

inline Distribution distribution_from_json(const Json& j, const Universe& u) {
  std::vector<Distribution::Entry> e;
  for (const auto& [name, p] : j.items())
    e.emplace_back(u.lookup(name), p.is_number_integer() ? Rational(p.get<std::int64_t>()) : parse_rational(p.get<std::string>()));
  return Distribution(std::move(e));
}

/// Table plus tail rule. Formula tails are written as their values on `extra`, followed by a
/// fixed tail on the first symbol of the emitted alphabet.
template <PolicyKind K>
Json to_json(const Policy<K>& p, const std::set<History>& extra = {}) {
  const Universe& u = p.spec().u();
  Json table = Json::object();
  std::map<History, Distribution> rows(p.table().begin(), p.table().end());
  const bool formula = std::holds_alternative<FormulaRule>(p.rule());
  if (formula)
    for (const auto& h : extra)
      if (p.in_domain(h)) rows.emplace(h, p(h));
  int depth = p.spec().table_depth;
  for (const auto& [h, d] : rows) {
    table[history_key(h, u)] = to_json(d, u);
    depth = std::max(depth, static_cast<int>(h.size()));
  }
  Json tail;
  if (const auto* f = std::get_if<FixedRule>(&p.rule())) {
    tail = {{"rule", "fixed"}, {"symbol", u.name(f->symbol)}};
  } else if (std::holds_alternative<UniformRule>(p.rule())) {
    tail = {{"rule", "uniform"}};
  } else {
    const Symbol s = K == PolicyKind::agent ? u.actions().front() : u.zero_percept();
    tail = {{"rule", "fixed"}, {"symbol", u.name(s)}, {"collected", true}};
  }
  Json out{{"kind", K == PolicyKind::agent ? "agent" : "environment"},
           {"label", p.label()},
           {"orientation", orientation_name(p.spec().orientation)},
           {"table_depth", depth},
           {"table", table},
           {"tail", tail}};
  if constexpr (K == PolicyKind::environment) out["reward_horizon"] = p.spec().reward_horizon;
  return out;
}

template <PolicyKind K>
Policy<K> policy_from_json(const Json& j, const FrameworkSpec& spec, const std::string& where = "policy") {
  try {
    const std::string kind = j.value("kind", std::string(K == PolicyKind::agent ? "agent" : "environment"));
    if (kind != (K == PolicyKind::agent ? "agent" : "environment")) throw parse_error(where, "expected kind " + kind);
    FrameworkSpec s = spec.with_depth(j.value("table_depth", spec.table_depth));
    if (j.contains("orientation") && j.at("orientation").get<std::string>() != orientation_name(spec.orientation))
      throw parse_error(where, "policy orientation does not match its framework");
    if constexpr (K == PolicyKind::environment) s.reward_horizon = j.value("reward_horizon", spec.reward_horizon);
    typename Policy<K>::Table table;
    for (const auto& [key, d] : j.at("table").items())
      table.emplace(history_from_key(key, s), distribution_from_json(d, s.u()));
    DefaultRule rule = UniformRule{};
    const Json tail = j.value("tail", Json{{"rule", "uniform"}});
    const std::string r = tail.value("rule", std::string("uniform"));
    if (r == "fixed") rule = FixedRule{s.u().lookup(tail.at("symbol").get<std::string>())};
    else if (r != "uniform") throw parse_error(where, "unknown tail rule " + r);
    return Policy<K>(s, std::move(table), std::move(rule), j.value("label", std::string()));
  } catch (const Json::exception& e) {
    throw parse_error(where, e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::config_parse_error) throw;
    throw parse_error(where, e.what());
  }
}

// ---------------------------------------------------------------------------
// Reports

namespace detail {

/// Histories of positive probability in the interaction of π and μ up to μ's horizon + 1.
inline void collect_tree(const Agent& pi, const Environment& mu, std::set<History>& agent_nodes,
                         std::set<History>& env_nodes) {
  const std::size_t stop = static_cast<std::size_t>(mu.spec().reward_horizon + 1);
  std::vector<History> stack{History(pi.spec().orientation)};
  while (!stack.empty()) {
    const History h = stack.back();
    stack.pop_back();
    if (h.size() >= stop) continue;
    const bool agent = h.agent_turn();
    (agent ? agent_nodes : env_nodes).insert(h);
    const Distribution d = agent ? pi(h) : mu(h);
    for (const auto& [s, p] : d.entries()) stack.push_back(h.extended(s));
  }
}

}  // namespace detail

inline Json to_json(const Witness& w) {
  std::map<std::string, std::set<History>> agent_rows, env_rows;
  for (const auto& c : w.values) {
    const Agent& a = w.find_agent(c.agent);
    const Environment& e = w.find_environment(c.environment);
    detail::collect_tree(a, e, agent_rows[c.agent], env_rows[c.environment]);
  }
  Json agents = Json::object(), envs = Json::object(), values = Json::array();
  for (const auto& [n, a] : w.agents) agents[n] = to_json(a, agent_rows[n]);
  for (const auto& [n, e] : w.environments) envs[n] = to_json(e, env_rows[n]);
  for (const auto& c : w.values)
    values.push_back({{"agent", c.agent}, {"environment", c.environment}, {"value", to_string(c.value)}});
  Json out{{"agents", agents}, {"environments", envs}, {"values", values}, {"note", w.note}};
  if (!w.agents.empty()) out["universe"] = to_json(w.agents.front().second.spec().u());
  else if (!w.environments.empty()) out["universe"] = to_json(w.environments.front().second.spec().u());
  return out;
}

/// Re-evaluates every recorded value from the serialized policies alone.
inline bool recheck_serialized_witness(const Json& j) {
  const auto u = universe_from_json(j.at("universe"));
  for (const auto& v : j.at("values")) {
    const Json& aj = j.at("agents").at(v.at("agent").get<std::string>());
    const Json& ej = j.at("environments").at(v.at("environment").get<std::string>());
    const auto spec_for = [&](const Json& pj) {
      FrameworkSpec spec;
      spec.universe = u;
      spec.orientation = pj.value("orientation", std::string("agent-first")) == "percept-first"
                             ? Orientation::percept_first
                             : Orientation::agent_first;
      spec.table_depth = 0;
      spec.reward_horizon = 0;
      return spec;
    };
    const Agent a = policy_from_json<PolicyKind::agent>(aj, spec_for(aj));
    const Environment e = policy_from_json<PolicyKind::environment>(ej, spec_for(ej));
    if (value(a, e) != parse_rational(v.at("value").get<std::string>())) return false;
  }
  return true;
}

inline Json to_json(const ValueReport& r) {
  return Json{{"value", to_string(r.value)},
              {"horizon_used", r.horizon_used},
              {"path_count", r.path_count},
              {"converged", r.converged}};
}

inline Json to_json(const LawReport& r) {
  Json out{{"law", law_name(r.law)},
           {"verdict", verdict_name(r.verdict)},
           {"instances_checked", r.instances_checked},
           {"vacuous", r.vacuous},
           {"scope", r.scope}};
  if (r.witness) out["witness"] = to_json(*r.witness);
  if (!r.parts.empty()) {
    out["parts"] = Json::array();
    for (const auto& p : r.parts) out["parts"].push_back(to_json(p));
  }
  return out;
}

inline Json to_json(const Check& c) {
  Json out{{"name", c.name}, {"holds", c.holds}};
  if (!c.detail.empty()) out["detail"] = c.detail;
  return out;
}

inline Json to_json(const AuditReport& r) {
  Json checks = Json::array(), candidates = Json::array();
  for (const auto& c : r.checks) checks.push_back(to_json(c));
  for (const auto& c : r.candidates) {
    Json cj{{"label", c.label}, {"outcome", outcome_name(c.outcome)}, {"checks", Json::array()}};
    for (const auto& k : c.checks) cj["checks"].push_back(to_json(k));
    if (c.witness) cj["witness"] = to_json(*c.witness);
    candidates.push_back(std::move(cj));
  }
  Json out{{"target", r.target},
           {"argument", argument_name(r.argument)},
           {"outcome", outcome_name(r.outcome)},
           {"checks", checks}};
  if (!candidates.empty()) out["candidates"] = candidates;
  if (r.witness) out["witness"] = to_json(*r.witness);
  return out;
}

inline Json to_json(const DescendingChainPlan& p) {
  const Universe& u = p.agents.front().spec().u();
  auto rationals = [](const std::vector<Rational>& v) {
    Json a = Json::array();
    for (const auto& r : v) a.push_back(to_string(r));
    return a;
  };
  Json hs = Json::array(), xs = Json::array();
  const Universe& du = p.images.front().spec().u();
  for (const auto& h : p.histories) hs.push_back(history_key(h, du));
  for (std::size_t i = 1; i < p.actions.size(); ++i) xs.push_back(u.name(p.actions[i]));
  return Json{{"histories", hs},
              {"actions", xs},
              {"probabilities", rationals(std::vector<Rational>(p.probabilities.begin() + 1, p.probabilities.end()))},
              {"margins", rationals(std::vector<Rational>(p.margins.begin() + 1, p.margins.end()))},
              {"reach", rationals(std::vector<Rational>(p.reach.begin() + 1, p.reach.end()))},
              {"dest_values", rationals(p.dest_values)},
              {"source_values", rationals(p.source_values)}};
}

inline Json to_json(const DiamondMatrix& m) {
  Json cells = Json::array();
  const std::vector<Variant> order{Variant::F, Variant::Fa, Variant::Fe, Variant::Fae};
  Json grid = Json::object();
  for (const auto& c : m.cells) {
    Json cj{{"from", variant_name(c.from)},
            {"to", variant_name(c.to)},
            {"expected", c.expected_positive ? "weak translation" : "no pre-translation"},
            {"method", c.method},
            {"route", c.route},
            {"reproduced", c.reproduced}};
    if (c.weak) cj["weak"] = to_json(*c.weak);
    if (!c.audits.empty()) {
      cj["audits"] = Json::array();
      for (const auto& a : c.audits) cj["audits"].push_back(to_json(a));
    }
    cells.push_back(std::move(cj));
    grid[std::string(variant_name(c.from))][std::string(variant_name(c.to))] =
        std::string(c.expected_positive ? "+" : "-") + (c.reproduced ? "" : "?");
  }
  return Json{{"cells", cells}, {"matrix", grid}, {"reproduced", m.reproduced()}};
}

inline Json to_json(const Comparison& c) {
  return Json{{"le", c.le}, {"ge", c.ge}, {"votes_le", c.votes_le}, {"votes_ge", c.votes_ge}, {"voters", c.voters}};
}

/// Candidate translation described by named planted maps: {"from","to","agent_map","env_map"}.
inline Translation candidate_from_json(const FrameworkSpec& base, const Json& j, const std::string& where = "candidate") {
  try {
    const Variant from = parse_variant(j.at("from").get<std::string>());
    const Variant to = parse_variant(j.at("to").get<std::string>());
    const FrameworkSpec src = variant_spec(base, from), dst = variant_spec(base, to);
    const std::string a = j.at("agent_map").get<std::string>(), e = j.at("env_map").get<std::string>();
    AgentMap am;
    bool pointwise = true;
    if (a == "identity") am = identity_agent_map(dst);
    else if (a == "mode") am = mode_agent_map(dst);
    else if (a == "lowest") am = lowest_support_agent_map(dst);
    else if (a.rfind("mix:", 0) == 0) am = mixing_agent_map(dst, parse_rational(a.substr(4)));
    else if (a == "constant") {
      am = constant_agent_map(dst);
      pointwise = false;
    } else throw parse_error(where, "unknown agent map " + a);
    EnvMap em;
    if (e == "identity") em = identity_env_map(src);
    else if (e == "mode") em = mode_env_map(src, src.reward_horizon);
    else if (e == "lowest") em = lowest_support_env_map(src, src.reward_horizon);
    else throw parse_error(where, "unknown environment map " + e);
    return candidate_translation("candidate:" + j.at("from").get<std::string>() + "->" + j.at("to").get<std::string>() +
                                     "[" + a + "," + e + "]",
                                 src, dst, std::move(am), std::move(em), pointwise);
  } catch (const Json::exception& ex) {
    throw parse_error(where, ex.what());
  }
}

}  // namespace rlt
