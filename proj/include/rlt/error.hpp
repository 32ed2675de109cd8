#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rlt {

enum class ErrorCode {
  // core
  invalid_universe,
  invalid_distribution,
  alternation_violation,
  unknown_symbol,
  orientation_mismatch,
  odd_length,
  // policies
  wrong_turn,
  wrong_orientation,
  invalid_policy,
  horizon_violation,
  not_deterministic,
  unavailable_symbol,
  no_unit_reward_percept,
  no_zero_reward_percept,
  action_unavailable,
  not_an_antichain,
  insufficient_reward_alphabet,
  condition_c1_violation,
  condition_c2_violation,
  condition_c3_violation,
  weight_out_of_range,
  framework_mismatch,
  already_randomized,
  // valuation
  no_reward_horizon,
  empty_corpus,
  // translations
  missing_env_map,
  wrong_framework,
  spec_mismatch,
  not_an_inclusion,
  // audit
  wrong_agent_map_kind,
  degenerate_rewards,
  chain_stalled,
  range_too_small,
  no_disagreement_found,
  property_prerequisite_failed,
  // elections
  not_weak,
  tie_rule_required,
  // cli
  config_parse_error,
  task_failure,
};

constexpr std::string_view error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_universe: return "InvalidUniverse";
    case ErrorCode::invalid_distribution: return "InvalidDistribution";
    case ErrorCode::alternation_violation: return "AlternationViolation";
    case ErrorCode::unknown_symbol: return "UnknownSymbol";
    case ErrorCode::orientation_mismatch: return "OrientationMismatch";
    case ErrorCode::odd_length: return "OddLength";
    case ErrorCode::wrong_turn: return "WrongTurn";
    case ErrorCode::wrong_orientation: return "WrongOrientation";
    case ErrorCode::invalid_policy: return "InvalidPolicy";
    case ErrorCode::horizon_violation: return "HorizonViolation";
    case ErrorCode::not_deterministic: return "NotDeterministic";
    case ErrorCode::unavailable_symbol: return "UnavailableSymbol";
    case ErrorCode::no_unit_reward_percept: return "NoUnitRewardPercept";
    case ErrorCode::no_zero_reward_percept: return "NoZeroRewardPercept";
    case ErrorCode::action_unavailable: return "ActionUnavailable";
    case ErrorCode::not_an_antichain: return "NotAnAntichain";
    case ErrorCode::insufficient_reward_alphabet: return "InsufficientRewardAlphabet";
    case ErrorCode::condition_c1_violation: return "ConditionC1Violation";
    case ErrorCode::condition_c2_violation: return "ConditionC2Violation";
    case ErrorCode::condition_c3_violation: return "ConditionC3Violation";
    case ErrorCode::weight_out_of_range: return "WeightOutOfRange";
    case ErrorCode::framework_mismatch: return "FrameworkMismatch";
    case ErrorCode::already_randomized: return "AlreadyRandomized";
    case ErrorCode::no_reward_horizon: return "NoRewardHorizon";
    case ErrorCode::empty_corpus: return "EmptyCorpus";
    case ErrorCode::missing_env_map: return "MissingEnvMap";
    case ErrorCode::wrong_framework: return "WrongFramework";
    case ErrorCode::spec_mismatch: return "SpecMismatch";
    case ErrorCode::not_an_inclusion: return "NotAnInclusion";
    case ErrorCode::wrong_agent_map_kind: return "WrongAgentMapKind";
    case ErrorCode::degenerate_rewards: return "DegenerateRewards";
    case ErrorCode::chain_stalled: return "ChainStalled";
    case ErrorCode::range_too_small: return "RangeTooSmall";
    case ErrorCode::no_disagreement_found: return "NoDisagreementFound";
    case ErrorCode::property_prerequisite_failed: return "PropertyPrerequisiteFailed";
    case ErrorCode::not_weak: return "NotWeak";
    case ErrorCode::tie_rule_required: return "TieRuleRequired";
    case ErrorCode::config_parse_error: return "ConfigParseError";
    case ErrorCode::task_failure: return "TaskFailure";
  }
  return "Unknown";
}

/// Every failure raised by the toolkit carries a machine-readable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(error_name(code)) + ": " + detail), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace rlt
