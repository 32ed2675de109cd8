#pragma once

#include "rlt/error.hpp"
#include "rlt/rational.hpp"

#include <algorithm>
#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace rlt {

enum class SymbolKind : std::uint8_t { action, percept };

struct Symbol {
  SymbolKind kind = SymbolKind::action;
  std::uint32_t index = 0;

  static constexpr Symbol action(std::uint32_t i) { return {SymbolKind::action, i}; }
  static constexpr Symbol percept(std::uint32_t i) { return {SymbolKind::percept, i}; }
  constexpr bool is_action() const { return kind == SymbolKind::action; }
  constexpr bool is_percept() const { return kind == SymbolKind::percept; }

  auto operator<=>(const Symbol&) const = default;
};

/// Action alphabet, percept alphabet and the reward map over percepts.
class Universe {
 public:
  Universe(std::vector<std::string> actions, std::vector<std::string> percepts,
           std::vector<Rational> rewards)
      : actions_(std::move(actions)), percepts_(std::move(percepts)), rewards_(std::move(rewards)) {
    if (actions_.size() < 2)
      throw Error(ErrorCode::invalid_universe, "at least two actions are required");
    if (percepts_.empty()) throw Error(ErrorCode::invalid_universe, "at least one percept is required");
    if (rewards_.size() != percepts_.size())
      throw Error(ErrorCode::invalid_universe, "reward map must cover every percept");
    for (std::uint32_t i = 0; i < actions_.size(); ++i) add_name(actions_[i], Symbol::action(i));
    for (std::uint32_t i = 0; i < percepts_.size(); ++i) add_name(percepts_[i], Symbol::percept(i));
  }

  /// Convenience constructor from (name, reward) pairs.
  static Universe make(std::vector<std::string> actions,
                       const std::vector<std::pair<std::string, Rational>>& percepts) {
    std::vector<std::string> names;
    std::vector<Rational> rewards;
    for (const auto& [name, reward] : percepts) {
      names.push_back(name);
      rewards.push_back(reward);
    }
    return Universe(std::move(actions), std::move(names), std::move(rewards));
  }

  std::size_t action_count() const { return actions_.size(); }
  std::size_t percept_count() const { return percepts_.size(); }
  const std::vector<std::string>& action_names() const { return actions_; }
  const std::vector<std::string>& percept_names() const { return percepts_; }
  const std::vector<Rational>& rewards() const { return rewards_; }

  std::vector<Symbol> actions() const {
    std::vector<Symbol> out;
    for (std::uint32_t i = 0; i < actions_.size(); ++i) out.push_back(Symbol::action(i));
    return out;
  }
  std::vector<Symbol> percepts() const {
    std::vector<Symbol> out;
    for (std::uint32_t i = 0; i < percepts_.size(); ++i) out.push_back(Symbol::percept(i));
    return out;
  }
  std::vector<Symbol> alphabet(SymbolKind kind) const {
    return kind == SymbolKind::action ? actions() : percepts();
  }

  const Rational& reward(Symbol percept) const {
    if (!percept.is_percept() || percept.index >= percepts_.size())
      throw Error(ErrorCode::unknown_symbol, "reward queried for a non-percept symbol");
    return rewards_[percept.index];
  }

  const std::string& name(Symbol s) const {
    const auto& names = s.is_action() ? actions_ : percepts_;
    if (s.index >= names.size()) throw Error(ErrorCode::unknown_symbol, "symbol index out of range");
    return names[s.index];
  }

  Symbol lookup(const std::string& name) const {
    auto it = by_name_.find(name);
    if (it == by_name_.end()) throw Error(ErrorCode::unknown_symbol, "'" + name + "'");
    return it->second;
  }
  bool contains(Symbol s) const {
    return s.index < (s.is_action() ? actions_.size() : percepts_.size());
  }

  /// First percept (in declaration order) whose reward equals `value`.
  std::optional<Symbol> percept_with_reward(const Rational& value) const {
    for (std::uint32_t i = 0; i < percepts_.size(); ++i)
      if (rewards_[i] == value) return Symbol::percept(i);
    return std::nullopt;
  }

  /// Designated zero-reward percept used by tail rules.
  Symbol zero_percept() const {
    if (auto p = percept_with_reward(Rational(0))) return *p;
    throw Error(ErrorCode::no_zero_reward_percept, "universe has no reward-0 percept");
  }

  bool integer_rewards() const {
    return std::all_of(rewards_.begin(), rewards_.end(), [](const Rational& r) { return is_integer(r); });
  }

  bool operator==(const Universe& o) const {
    return actions_ == o.actions_ && percepts_ == o.percepts_ && rewards_ == o.rewards_;
  }

 private:
  void add_name(const std::string& name, Symbol s) {
    if (name.empty() || name.find('/') != std::string::npos)
      throw Error(ErrorCode::invalid_universe, "symbol names must be non-empty and contain no '/'");
    if (!by_name_.emplace(name, s).second)
      throw Error(ErrorCode::invalid_universe, "duplicate or shared symbol name '" + name + "'");
  }

  std::vector<std::string> actions_;
  std::vector<std::string> percepts_;
  std::vector<Rational> rewards_;
  std::map<std::string, Symbol> by_name_;
};

enum class Orientation : std::uint8_t { agent_first, percept_first };

constexpr Orientation flipped(Orientation o) {
  return o == Orientation::agent_first ? Orientation::percept_first : Orientation::agent_first;
}

constexpr std::string_view orientation_name(Orientation o) {
  return o == Orientation::agent_first ? "agent-first" : "percept-first";
}

/// Kind of symbol expected at `position` of a history with orientation `o`.
constexpr SymbolKind expected_kind(Orientation o, std::size_t position) {
  const bool even = position % 2 == 0;
  if (o == Orientation::agent_first) return even ? SymbolKind::action : SymbolKind::percept;
  return even ? SymbolKind::percept : SymbolKind::action;
}

/// A history of length n belongs to H_A iff the next symbol is an action.
constexpr bool is_agent_turn(Orientation o, std::size_t length) {
  return expected_kind(o, length) == SymbolKind::action;
}

/// Alternating action/percept sequence stamped with its orientation.
class History {
 public:
  explicit History(Orientation o = Orientation::agent_first) : orientation_(o) {}

  History(Orientation o, std::vector<Symbol> symbols) : orientation_(o), symbols_(std::move(symbols)) {
    for (std::size_t i = 0; i < symbols_.size(); ++i) {
      if (symbols_[i].kind != expected_kind(o, i)) {
        if (i == 0) throw Error(ErrorCode::orientation_mismatch, "first symbol has the wrong kind");
        throw Error(ErrorCode::alternation_violation,
                    "position " + std::to_string(i) + " breaks action/percept alternation");
      }
    }
  }

  Orientation orientation() const { return orientation_; }
  std::size_t size() const { return symbols_.size(); }
  bool empty() const { return symbols_.empty(); }
  const Symbol& operator[](std::size_t i) const { return symbols_[i]; }
  const Symbol& back() const { return symbols_.back(); }
  const std::vector<Symbol>& symbols() const { return symbols_; }
  auto begin() const { return symbols_.begin(); }
  auto end() const { return symbols_.end(); }

  bool agent_turn() const { return is_agent_turn(orientation_, symbols_.size()); }
  bool environment_turn() const { return !agent_turn(); }
  SymbolKind next_kind() const { return expected_kind(orientation_, symbols_.size()); }

  /// h⌢s
  History extended(Symbol s) const {
    if (s.kind != next_kind())
      throw Error(ErrorCode::alternation_violation, "extension breaks alternation");
    History out = *this;
    out.symbols_.push_back(s);
    return out;
  }

  History prefix(std::size_t n) const {
    History out(orientation_);
    out.symbols_.assign(symbols_.begin(), symbols_.begin() + static_cast<std::ptrdiff_t>(std::min(n, size())));
    return out;
  }

  /// Drops the first `n` symbols; the orientation flips when n is odd.
  History suffix(std::size_t n) const {
    const Orientation o = n % 2 == 0 ? orientation_ : flipped(orientation_);
    History out(o);
    if (n < size()) out.symbols_.assign(symbols_.begin() + static_cast<std::ptrdiff_t>(n), symbols_.end());
    return out;
  }

  /// s⌢h, re-oriented to start with s.
  History prepended(Symbol s) const {
    const Orientation o = s.is_action() ? Orientation::agent_first : Orientation::percept_first;
    std::vector<Symbol> syms;
    syms.reserve(size() + 1);
    syms.push_back(s);
    syms.insert(syms.end(), symbols_.begin(), symbols_.end());
    return History(o, std::move(syms));
  }

  /// Weak prefix (⊆).
  bool is_prefix_of(const History& other) const {
    return orientation_ == other.orientation_ && size() <= other.size() &&
           std::equal(symbols_.begin(), symbols_.end(), other.symbols_.begin());
  }
  /// Proper prefix (⊂).
  bool is_proper_prefix_of(const History& other) const {
    return size() < other.size() && is_prefix_of(other);
  }

  auto operator<=>(const History&) const = default;
  bool operator==(const History&) const = default;

 private:
  Orientation orientation_;
  std::vector<Symbol> symbols_;
};

/// Transposes each (h_{2i}, h_{2i+1}) pair; the result has the opposite orientation.
inline History local_reverse(const History& h) {
  if (h.size() % 2 != 0) throw Error(ErrorCode::odd_length, "local reverse needs an even-length history");
  std::vector<Symbol> out(h.begin(), h.end());
  for (std::size_t i = 0; i + 1 < out.size(); i += 2) std::swap(out[i], out[i + 1]);
  return History(flipped(h.orientation()), std::move(out));
}

/// R(h): reward of the final percept, 0 for the empty history or a trailing action.
inline Rational history_reward(const History& h, const Universe& u) {
  if (h.empty() || h.back().is_action()) return Rational(0);
  return u.reward(h.back());
}

/// Finitely supported exact distribution over symbols of one kind.
class Distribution {
 public:
  using Entry = std::pair<Symbol, Rational>;

  explicit Distribution(std::vector<Entry> entries) {
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) { return a.first < b.first; });
    Rational total(0);
    for (std::size_t i = 0; i < entries.size(); ++i) {
      const auto& [sym, p] = entries[i];
      if (i > 0 && entries[i - 1].first == sym)
        throw Error(ErrorCode::invalid_distribution, "duplicate support symbol");
      if (sym.kind != entries.front().first.kind)
        throw Error(ErrorCode::invalid_distribution, "support mixes actions and percepts");
      if (p < 0 || p > 1) throw Error(ErrorCode::invalid_distribution, "probability outside [0,1]");
      total += p;
      if (p != 0) entries_.push_back(entries[i]);
    }
    if (entries_.empty()) throw Error(ErrorCode::invalid_distribution, "empty support");
    if (total != 1) throw Error(ErrorCode::invalid_distribution, "probabilities sum to " + to_string(total));
  }

  static Distribution point(Symbol s) { return Distribution({{s, Rational(1)}}); }

  static Distribution uniform(std::span<const Symbol> support) {
    if (support.empty()) throw Error(ErrorCode::invalid_distribution, "uniform over empty set");
    const Rational p = make_rational(1, static_cast<std::int64_t>(support.size()));
    std::vector<Entry> e;
    for (const auto& s : support) e.emplace_back(s, p);
    return Distribution(std::move(e));
  }

  Rational probability(Symbol s) const {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), s,
                               [](const Entry& e, Symbol v) { return e.first < v; });
    return (it != entries_.end() && it->first == s) ? it->second : Rational(0);
  }

  const std::vector<Entry>& entries() const { return entries_; }
  SymbolKind kind() const { return entries_.front().first.kind; }
  bool is_point_mass() const { return entries_.size() == 1; }
  Symbol point_symbol() const {
    if (!is_point_mass()) throw Error(ErrorCode::not_deterministic, "distribution is not a point mass");
    return entries_.front().first;
  }
  std::vector<Symbol> support() const {
    std::vector<Symbol> out;
    for (const auto& e : entries_) out.push_back(e.first);
    return out;
  }

  bool operator==(const Distribution&) const = default;

 private:
  std::vector<Entry> entries_;
};

/// Optional per-history availability restriction (𝒜_{𝒻,h}, 𝒫_{𝒻,h}) of a framework.
struct AvailabilityTable {
  std::map<History, std::vector<Symbol>> restricted;
};

enum class Randomization : std::uint8_t { none, agents, environments, both };

/// Finitely generated stand-in for a framework (A, E, H).
struct FrameworkSpec {
  std::shared_ptr<const Universe> universe;
  Orientation orientation = Orientation::agent_first;
  bool deterministic_agents = false;
  bool deterministic_environments = false;
  int table_depth = 2;
  /// Environment-turn histories longer than this emit only zero-reward percepts.
  int reward_horizon = 2;
  bool integer_rewards = false;
  Randomization randomized = Randomization::none;
  std::shared_ptr<const AvailabilityTable> availability;

  const Universe& u() const { return *universe; }

  void validate() const {
    if (!universe) throw Error(ErrorCode::invalid_universe, "framework without a universe");
    if (reward_horizon < 0) throw Error(ErrorCode::no_reward_horizon, "negative reward horizon");
    if (table_depth < 0) throw Error(ErrorCode::invalid_policy, "negative table depth");
    if (integer_rewards && !universe->integer_rewards())
      throw Error(ErrorCode::invalid_universe, "integer_rewards set but some reward is not an integer");
  }

  std::vector<std::string> warnings() const {
    std::vector<std::string> out;
    if (table_depth < reward_horizon)
      out.push_back("table_depth " + std::to_string(table_depth) + " is below reward_horizon " +
                    std::to_string(reward_horizon));
    return out;
  }

  FrameworkSpec with_horizon(int horizon) const {
    FrameworkSpec s = *this;
    s.reward_horizon = horizon;
    return s;
  }
  FrameworkSpec with_depth(int depth) const {
    FrameworkSpec s = *this;
    s.table_depth = depth;
    return s;
  }
};

/// Two specs describe the same framework when they share universe, orientation and
/// determinism; depth and horizon are representation parameters of individual policies.
inline bool same_framework(const FrameworkSpec& a, const FrameworkSpec& b) {
  return a.universe && b.universe && (a.universe == b.universe || *a.universe == *b.universe) &&
         a.orientation == b.orientation && a.deterministic_agents == b.deterministic_agents &&
         a.deterministic_environments == b.deterministic_environments;
}

/// Classifies a validated history for a spec.
inline History validate_history(const std::vector<std::string>& names, const FrameworkSpec& spec) {
  std::vector<Symbol> syms;
  syms.reserve(names.size());
  for (const auto& n : names) syms.push_back(spec.u().lookup(n));
  return History(spec.orientation, std::move(syms));
}

/// All histories of length ≤ max_length, shortest first, lexicographic within a length.
inline std::vector<History> enumerate_histories(const Universe& u, Orientation o, std::size_t max_length) {
  std::vector<History> out{History(o)};
  std::size_t level_begin = 0;
  for (std::size_t len = 1; len <= max_length; ++len) {
    const std::size_t level_end = out.size();
    const auto alphabet = u.alphabet(expected_kind(o, len - 1));
    for (std::size_t i = level_begin; i < level_end; ++i)
      for (const auto& s : alphabet) out.push_back(out[i].extended(s));
    level_begin = level_end;
  }
  return out;
}

inline std::vector<History> agent_turn_histories(const Universe& u, Orientation o, std::size_t max_length) {
  auto all = enumerate_histories(u, o, max_length);
  std::erase_if(all, [](const History& h) { return !h.agent_turn(); });
  return all;
}

inline std::vector<History> environment_turn_histories(const Universe& u, Orientation o,
                                                       std::size_t max_length) {
  auto all = enumerate_histories(u, o, max_length);
  std::erase_if(all, [](const History& h) { return !h.environment_turn(); });
  return all;
}

}  // namespace rlt
