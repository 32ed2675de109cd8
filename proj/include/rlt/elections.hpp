#pragma once

#include "rlt/translations.hpp"

#include <string>
#include <utility>
#include <vector>

namespace rlt {

/// How a majority election with an even electorate reports a split vote.
enum class TieRule : std::uint8_t { none, both_directions };

/// An intelligence comparator: a single dictator environment or a finite majority vote.
struct Comparator {
  enum class Kind : std::uint8_t { principal, majority };

  Kind kind = Kind::principal;
  FrameworkSpec framework;
  std::vector<Environment> voters;
  TieRule tie = TieRule::none;

  static Comparator principal(Environment mu) {
    Comparator c;
    c.kind = Kind::principal;
    c.framework = mu.spec();
    c.voters.push_back(std::move(mu));
    return c;
  }

  /// Majority over the corpus. Environments rating π and ρ equally vote both ways.
  static Comparator majority(std::vector<Environment> corpus, TieRule tie = TieRule::none) {
    if (corpus.empty()) throw Error(ErrorCode::empty_corpus, "majority needs at least one voter");
    if (corpus.size() % 2 == 0 && tie == TieRule::none)
      throw Error(ErrorCode::tie_rule_required, "even electorate of " + std::to_string(corpus.size()) +
                                                    " needs an explicit tie rule");
    for (const auto& mu : corpus)
      if (!same_framework(mu.spec(), corpus.front().spec()))
        throw Error(ErrorCode::framework_mismatch, "voters live in different frameworks");
    Comparator c;
    c.kind = Kind::majority;
    c.framework = corpus.front().spec();
    c.voters = std::move(corpus);
    c.tie = tie;
    return c;
  }

  const Environment& dictator() const {
    if (kind != Kind::principal) throw Error(ErrorCode::invalid_policy, "majority comparator has no dictator");
    return voters.front();
  }
};

struct Comparison {
  bool le = false;  // π ≤ ρ
  bool ge = false;  // ρ ≤ π
  std::size_t votes_le = 0;
  std::size_t votes_ge = 0;
  std::size_t voters = 0;
  std::vector<std::pair<Rational, Rational>> values;  // (V^π, V^ρ) per voter
};

inline Comparison compare(const Comparator& c, const Agent& pi, const Agent& rho) {
  if (!same_framework(pi.spec(), c.framework) || !same_framework(rho.spec(), c.framework))
    throw Error(ErrorCode::framework_mismatch, "agents do not belong to the comparator's framework");
  Comparison out;
  out.voters = c.voters.size();
  for (const auto& mu : c.voters) {
    const Rational a = value(pi, mu), b = value(rho, mu);
    if (a <= b) ++out.votes_le;
    if (b <= a) ++out.votes_ge;
    out.values.emplace_back(a, b);
  }
  const auto wins = [&](std::size_t votes) {
    return 2 * votes > out.voters || (2 * votes == out.voters && c.tie == TieRule::both_directions);
  };
  out.le = wins(out.votes_le);
  out.ge = wins(out.votes_ge);
  return out;
}

/// The principal comparator at μ′_* for a weak translation and a principal comparator at μ′.
inline Comparator induce_source_comparator(const Translation& t, const Comparator& dest,
                                           const std::vector<Agent>& agents, std::vector<Environment> envs) {
  if (dest.kind != Comparator::Kind::principal)
    throw Error(ErrorCode::invalid_policy, "only principal comparators can be induced");
  if (!same_framework(dest.framework, t.dest))
    throw Error(ErrorCode::framework_mismatch, "comparator does not live in the destination of " + t.id);
  envs.push_back(dest.dictator());
  const LawReport weak = check_weak(t, agents, envs);
  if (!weak.passed()) throw Error(ErrorCode::not_weak, t.id + " fails the weak-translation check on the corpus");
  return Comparator::principal(apply_env_map(t, dest.dictator()));
}

/// π ≤_c ρ ⇔ π^* ≤_{c′} ρ^* for every given pair.
inline LawReport check_preservation(const Translation& t, const Comparator& source, const Comparator& dest,
                                    const std::vector<std::pair<Agent, Agent>>& pairs) {
  LawReport r;
  r.law = Law::preservation;
  r.scope = std::to_string(pairs.size()) + " agent pairs";
  for (const auto& [pi, rho] : pairs) {
    ++r.instances_checked;
    const Agent pis = apply_agent_map(t, pi), rhos = apply_agent_map(t, rho);
    const Comparison s = compare(source, pi, rho);
    const Comparison d = compare(dest, pis, rhos);
    if (s.le != d.le || s.ge != d.ge) {
      r.verdict = Verdict::fail;
      Witness w;
      w.add_agent("pi", pi);
      w.add_agent("rho", rho);
      w.add_agent("pi*", pis);
      w.add_agent("rho*", rhos);
      if (source.kind == Comparator::Kind::principal && dest.kind == Comparator::Kind::principal) {
        w.add_environment("mu_*", source.dictator());
        w.add_environment("mu", dest.dictator());
        w.claim("pi", "mu_*");
        w.claim("rho", "mu_*");
        w.claim("pi*", "mu");
        w.claim("rho*", "mu");
      }
      w.note = "source and destination comparators order the pair differently";
      r.witness = std::move(w);
      return r;
    }
  }
  r.vacuous = r.instances_checked == 0;
  return r;
}

/// Every ordered pair of distinct corpus members.
inline std::vector<std::pair<Agent, Agent>> ordered_pairs(const std::vector<Agent>& agents) {
  std::vector<std::pair<Agent, Agent>> out;
  for (std::size_t i = 0; i < agents.size(); ++i)
    for (std::size_t j = 0; j < agents.size(); ++j)
      if (i != j) out.emplace_back(agents[i], agents[j]);
  return out;
}

}  // namespace rlt
