#pragma once

#include "rlt/policies.hpp"

#include <cstdint>
#include <optional>
#include <random>

namespace rlt {

struct ValueReport {
  Rational value;
  int horizon_used = 0;
  std::uint64_t path_count = 0;
  bool converged = false;
};

namespace detail {

inline void require_same_framework(const Agent& pi, const Environment& mu) {
  if (!same_framework(pi.spec(), mu.spec()))
    throw Error(ErrorCode::framework_mismatch, "agent and environment live in different frameworks");
}

struct Enumerator {
  const Agent& pi;
  const Environment& mu;
  const Universe& u;
  std::size_t depth;
  std::uint64_t paths = 0;

  // Expected reward collected strictly below h, given h was reached.
  Rational below(const History& h) {
    if (h.size() >= depth) {
      ++paths;
      return Rational(0);
    }
    const Distribution d = h.agent_turn() ? pi(h) : mu(h);
    Rational acc(0);
    for (const auto& [s, p] : d.entries()) {
      const History next = h.extended(s);
      Rational r = below(next);
      if (s.is_percept()) r += u.reward(s);
      acc += p * r;
    }
    return acc;
  }
};

}  // namespace detail

/// Exact V^π_{μ,t} by enumeration of the interaction tree. The tree is cut at length T+1, where T
/// is μ's reward horizon, since no reward can follow.
inline ValueReport expected_value(const Agent& pi, const Environment& mu, int t) {
  detail::require_same_framework(pi, mu);
  if (t < 0) throw Error(ErrorCode::invalid_policy, "negative time");
  const int stop = std::min(t, mu.spec().reward_horizon + 1);
  detail::Enumerator e{pi, mu, mu.spec().u(), static_cast<std::size_t>(stop)};
  ValueReport r;
  r.value = e.below(History(pi.spec().orientation));
  r.horizon_used = t;
  r.path_count = e.paths;
  r.converged = t >= mu.spec().reward_horizon + 1;
  return r;
}

/// V^π_μ: expected_value at t = 2T + 2.
inline ValueReport total_value(const Agent& pi, const Environment& mu) {
  const int horizon = mu.spec().reward_horizon;
  if (horizon < 0) throw Error(ErrorCode::no_reward_horizon, "environment without reward horizon");
  return expected_value(pi, mu, 2 * horizon + 2);
}

inline Rational value(const Agent& pi, const Environment& mu) { return total_value(pi, mu).value; }

// ---------------------------------------------------------------------------
// Sampling

struct Trajectory {
  History path;
  Rational total_reward;
};

/// Seeded sampler; draws 53-bit integers and compares them exactly against rational CDFs.
class Sampler {
 public:
  Sampler(const Agent& pi, const Environment& mu, std::uint64_t seed) : pi_(pi), mu_(mu), rng_(seed) {
    detail::require_same_framework(pi, mu);
  }

  Trajectory sample(int t) {
    History h(pi_.spec().orientation);
    Rational total(0);
    const Universe& u = mu_.spec().u();
    for (int i = 0; i < t; ++i) {
      const Symbol s = draw(h);
      h = h.extended(s);
      if (s.is_percept()) total += u.reward(s);
    }
    return {std::move(h), std::move(total)};
  }

  double sample_reward(int t) {
    History h(pi_.spec().orientation);
    double total = 0;
    for (int i = 0; i < t; ++i) {
      const Symbol s = draw(h);
      h = h.extended(s);
      if (s.is_percept()) total += reward_double(s);
    }
    return total;
  }

 private:
  using Cdf = std::vector<std::pair<Symbol, std::uint64_t>>;
  static constexpr std::uint64_t scale = std::uint64_t{1} << 53;

  Symbol draw(const History& h) {
    auto it = cdf_.find(h);
    if (it == cdf_.end()) {
      const Distribution d = h.agent_turn() ? pi_(h) : mu_(h);
      Cdf cdf;
      Rational cum(0);
      for (const auto& [s, p] : d.entries()) {
        cum += p;
        // u < cum·2^53 ⇔ u < ceil(cum·2^53) for integer u
        const Rational scaled = cum * Rational(Integer(scale));
        Integer c = numerator(scaled) / denominator(scaled);
        if (Rational(c) < scaled) c += 1;
        cdf.emplace_back(s, c.convert_to<std::uint64_t>());
      }
      it = cdf_.emplace(h, std::move(cdf)).first;
    }
    const std::uint64_t draw = rng_() >> 11;
    for (const auto& [s, bound] : it->second)
      if (draw < bound) return s;
    return it->second.back().first;
  }

  double reward_double(Symbol s) {
    if (rewards_.empty())
      for (const auto& p : mu_.spec().u().percepts()) rewards_.push_back(to_double(mu_.spec().u().reward(p)));
    return rewards_[s.index];
  }

  const Agent& pi_;
  const Environment& mu_;
  std::mt19937_64 rng_;
  std::map<History, Cdf> cdf_;
  std::vector<double> rewards_;
};

/// One trajectory of length t; identical seeds replay identically.
inline Trajectory simulate(const Agent& pi, const Environment& mu, int t, std::uint64_t seed) {
  Sampler s(pi, mu, seed);
  return s.sample(t);
}

/// (h_0, …, h_length) for deterministic π, μ.
inline std::vector<History> determined_path(const Agent& pi, const Environment& mu, int length) {
  detail::require_same_framework(pi, mu);
  std::vector<History> out{History(pi.spec().orientation)};
  for (int i = 0; i < length; ++i) {
    const History& h = out.back();
    const Distribution d = h.agent_turn() ? pi(h) : mu(h);
    if (!d.is_point_mass()) throw Error(ErrorCode::not_deterministic, "non-point-mass step on the path");
    out.push_back(h.extended(d.point_symbol()));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Agreement and corpus equivalence

/// (V^π_μ ≤ V^ρ_μ) ⇔ (V^π_ν ≤ V^ρ_ν).
inline bool agree_about(const Environment& mu, const Environment& nu, const Agent& pi, const Agent& rho) {
  if (!same_framework(mu.spec(), nu.spec()))
    throw Error(ErrorCode::framework_mismatch, "environments live in different frameworks");
  return (value(pi, mu) <= value(rho, mu)) == (value(pi, nu) <= value(rho, nu));
}

struct DisagreementWitness {
  std::size_t pi = 0;
  std::size_t rho = 0;
  Rational mu_pi, mu_rho, nu_pi, nu_rho;
};

struct EquivalenceVerdict {
  bool distinguished = false;
  std::optional<DisagreementWitness> witness;
  std::size_t corpus_size = 0;
};

/// First ordered pair in value-vector order whose comparison differs between the two vectors.
inline std::optional<DisagreementWitness> find_disagreement(const std::vector<Rational>& a,
                                                            const std::vector<Rational>& b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j)
      if ((a[i] <= a[j]) != (b[i] <= b[j])) return DisagreementWitness{i, j, a[i], a[j], b[i], b[j]};
  return std::nullopt;
}

/// Corpus approximation of μ ∼ ν: distinguished only when some corpus pair disagrees.
inline EquivalenceVerdict corpus_equivalent(const Environment& mu, const Environment& nu,
                                            const std::vector<Agent>& corpus) {
  if (corpus.empty()) throw Error(ErrorCode::empty_corpus, "agent corpus is empty");
  if (!same_framework(mu.spec(), nu.spec()))
    throw Error(ErrorCode::framework_mismatch, "environments live in different frameworks");
  std::vector<Rational> a, b;
  for (const auto& pi : corpus) {
    a.push_back(value(pi, mu));
    b.push_back(value(pi, nu));
  }
  EquivalenceVerdict v;
  v.corpus_size = corpus.size();
  v.witness = find_disagreement(a, b);
  v.distinguished = v.witness.has_value();
  return v;
}

}  // namespace rlt
