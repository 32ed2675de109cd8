#pragma once

#include "rlt/policies.hpp"

#include <cstdint>
#include <random>

namespace rlt {

/// Upper bound on generated family sizes.
inline constexpr std::uint64_t max_family_size = 1u << 16;

namespace detail {

template <PolicyKind K>
std::vector<History> domain_histories(const FrameworkSpec& spec, int depth) {
  std::vector<History> out;
  for (const auto& h : enumerate_histories(spec.u(), spec.orientation, static_cast<std::size_t>(depth))) {
    const bool agent_turn = h.agent_turn();
    if ((K == PolicyKind::agent) == agent_turn) out.push_back(h);
  }
  return out;
}

template <PolicyKind K>
std::vector<Policy<K>> all_deterministic(const FrameworkSpec& spec, int depth, Symbol tail, const std::string& prefix) {
  const auto nodes = domain_histories<K>(spec, depth);
  std::vector<std::vector<Symbol>> choices;
  std::uint64_t total = 1;
  for (const auto& h : nodes) {
    choices.push_back(available(spec, h));
    total *= choices.back().size();
    if (total > max_family_size) throw Error(ErrorCode::invalid_policy, "deterministic family too large");
  }
  FrameworkSpec s = spec.with_depth(depth);
  std::vector<Policy<K>> out;
  out.reserve(total);
  std::vector<std::size_t> digit(nodes.size(), 0);
  for (std::uint64_t n = 0; n < total; ++n) {
    typename Policy<K>::Table table;
    for (std::size_t i = 0; i < nodes.size(); ++i) table.emplace(nodes[i], Distribution::point(choices[i][digit[i]]));
    out.emplace_back(s, std::move(table), FixedRule{tail}, prefix + std::to_string(n));
    for (std::size_t i = nodes.size(); i-- > 0;) {
      if (++digit[i] < choices[i].size()) break;
      digit[i] = 0;
    }
  }
  return out;
}

inline Distribution random_distribution(const std::vector<Symbol>& support, std::mt19937_64& rng, bool point) {
  if (point) return Distribution::point(support[rng() % support.size()]);
  std::vector<std::uint64_t> weights(support.size());
  std::uint64_t sum = 0;
  while (sum == 0) {
    sum = 0;
    for (auto& w : weights) {
      w = rng() % 4;
      sum += w;
    }
  }
  std::vector<Distribution::Entry> entries;
  for (std::size_t i = 0; i < support.size(); ++i)
    if (weights[i] != 0)
      entries.emplace_back(support[i], make_rational(static_cast<std::int64_t>(weights[i]), static_cast<std::int64_t>(sum)));
  return Distribution(std::move(entries));
}

template <PolicyKind K>
std::vector<Policy<K>> random_family(const FrameworkSpec& spec, int depth, std::size_t n, std::uint64_t seed,
                                     Symbol tail, const std::string& prefix) {
  std::mt19937_64 rng(seed);
  const auto nodes = domain_histories<K>(spec, depth);
  const bool det = K == PolicyKind::agent ? spec.deterministic_agents : spec.deterministic_environments;
  FrameworkSpec s = spec.with_depth(depth);
  std::vector<Policy<K>> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    typename Policy<K>::Table table;
    for (const auto& h : nodes) table.emplace(h, random_distribution(available(spec, h), rng, det));
    out.emplace_back(s, std::move(table), FixedRule{tail}, prefix + std::to_string(i));
  }
  return out;
}

}  // namespace detail

/// Every deterministic agent tabulated on histories of length ≤ depth; tail plays the first action.
inline std::vector<Agent> all_deterministic_agents(const FrameworkSpec& spec, int depth) {
  return detail::all_deterministic<PolicyKind::agent>(spec, depth, spec.u().actions().front(), "agent-");
}

/// Every deterministic environment tabulated on histories of length ≤ depth; tail emits the zero percept.
/// The reward horizon becomes max(depth, spec.reward_horizon).
inline std::vector<Environment> all_deterministic_environments(const FrameworkSpec& spec, int depth) {
  return detail::all_deterministic<PolicyKind::environment>(spec.with_horizon(std::max(depth, spec.reward_horizon)),
                                                            depth, spec.u().zero_percept(), "env-");
}

inline std::vector<Agent> random_agents(const FrameworkSpec& spec, int depth, std::size_t n, std::uint64_t seed) {
  return detail::random_family<PolicyKind::agent>(spec, depth, n, seed, spec.u().actions().front(), "ragent-");
}

inline std::vector<Environment> random_environments(const FrameworkSpec& spec, int depth, std::size_t n,
                                                    std::uint64_t seed) {
  return detail::random_family<PolicyKind::environment>(spec.with_horizon(std::max(depth, spec.reward_horizon)),
                                                        depth, n, seed, spec.u().zero_percept(), "renv-");
}

}  // namespace rlt
