#pragma once

#include "rlt/valuation.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace rlt {

enum class Law : std::uint8_t { condition1, condition2, condition3, injectivity, strongness, weak, preservation };
enum class Verdict : std::uint8_t { pass, fail, inconclusive };

constexpr std::string_view law_name(Law l) {
  switch (l) {
    case Law::condition1: return "condition1";
    case Law::condition2: return "condition2";
    case Law::condition3: return "condition3";
    case Law::injectivity: return "injectivity";
    case Law::strongness: return "strongness";
    case Law::weak: return "weak";
    case Law::preservation: return "preservation";
  }
  return "?";
}

constexpr std::string_view verdict_name(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "?";
}

struct ValueClaim {
  std::string agent;
  std::string environment;
  Rational value;
};

/// Concrete policies plus the V values claimed about them.
struct Witness {
  std::vector<std::pair<std::string, Agent>> agents;
  std::vector<std::pair<std::string, Environment>> environments;
  std::vector<ValueClaim> values;
  std::string note;

  void add_agent(std::string name, Agent a) { agents.emplace_back(std::move(name), std::move(a)); }
  void add_environment(std::string name, Environment e) { environments.emplace_back(std::move(name), std::move(e)); }

  /// Computes V for a pair already registered and records it.
  Rational claim(const std::string& agent, const std::string& env) {
    const Rational v = value(find_agent(agent), find_environment(env));
    values.push_back({agent, env, v});
    return v;
  }

  const Agent& find_agent(const std::string& name) const {
    for (const auto& [n, a] : agents)
      if (n == name) return a;
    throw Error(ErrorCode::invalid_policy, "witness has no agent " + name);
  }
  const Environment& find_environment(const std::string& name) const {
    for (const auto& [n, e] : environments)
      if (n == name) return e;
    throw Error(ErrorCode::invalid_policy, "witness has no environment " + name);
  }
};

/// Recomputes every claimed value through the evaluator.
inline bool recheck_witness(const Witness& w) {
  for (const auto& c : w.values)
    if (value(w.find_agent(c.agent), w.find_environment(c.environment)) != c.value) return false;
  return true;
}

struct LawReport {
  Law law = Law::condition1;
  Verdict verdict = Verdict::pass;
  std::optional<Witness> witness;
  std::uint64_t instances_checked = 0;
  bool vacuous = false;
  std::string scope;
  std::vector<LawReport> parts;

  bool passed() const { return verdict == Verdict::pass; }
};

}  // namespace rlt
