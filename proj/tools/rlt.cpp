#include "rlt/rlt.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace {

using namespace rlt;

struct Globals {
  std::uint64_t seed = 1;
  int depth = 2;
  std::optional<int> horizon;
  std::string out;
};

struct Frame {
  std::string universe;
  std::string framework;
};

void emit(const Globals& g, const std::string& text) {
  if (g.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(g.out);
  if (!f) throw Error(ErrorCode::config_parse_error, g.out + ": cannot write");
  f << text;
}

/// Loads --universe/--framework, falling back to `fallback` when neither is given.
FrameworkSpec load_frame(const Frame& f, const Globals& g, const FrameworkSpec& fallback) {
  FrameworkSpec s = fallback;
  if (!f.universe.empty() || !f.framework.empty()) {
    if (f.universe.empty() || f.framework.empty())
      throw Error(ErrorCode::config_parse_error, "--universe and --framework go together");
    const auto u = universe_from_json(read_json_file(f.universe), f.universe);
    s = framework_from_json(read_json_file(f.framework), u, f.framework);
  }
  if (g.horizon) s.reward_horizon = *g.horizon;
  return s;
}

FrameworkSpec mixture_base() {
  auto u = std::make_shared<const Universe>(
      Universe::make({"x0", "x1"}, {{"y0", Rational(0)}, {"y1", Rational(1)}, {"y2", Rational(2)}}));
  FrameworkSpec s;
  s.universe = u;
  s.table_depth = 2;
  s.reward_horizon = 2;
  return s;
}

Json frame_json(const FrameworkSpec& s) {
  Json j = Json::object();
  j["universe"] = to_json(s.u());
  j["frameworks"] = {{"base", to_json(s)}};
  return j;
}

/// Wraps a single task in a config and runs it through the batch runner.
int run_single(const Globals& g, const FrameworkSpec& base, Json task) {
  Json cfg = frame_json(base);
  cfg["seed"] = g.seed;
  task["framework"] = "base";
  task["seed"] = g.seed;
  cfg["tasks"] = Json::array({task});
  const ExperimentConfig c = load_config(cfg);
  const TaskReport r = run_task(c, c.tasks.front());
  emit(g, r.text);
  return r.passed ? 0 : 1;
}

template <PolicyKind K>
std::map<std::string, Policy<K>> named_policies(const Json& j, const FrameworkSpec& s, const std::string& where) {
  std::map<std::string, Policy<K>> out;
  for (const auto& [name, p] : j.items()) out.emplace(name, policy_from_json<K>(p, s, where + "." + name));
  return out;
}

int cmd_elect(const Globals& g, const FrameworkSpec& s, const std::string& comparator, const std::string& pairs_file) {
  const Json j = read_json_file(pairs_file);
  std::map<std::string, Agent> agents;
  std::map<std::string, Environment> envs;
  try {
    agents = named_policies<PolicyKind::agent>(j.at("agents"), s, pairs_file + ":agents");
    envs = named_policies<PolicyKind::environment>(j.at("environments"), s, pairs_file + ":environments");
  } catch (const Json::exception& e) {
    throw parse_error(pairs_file, e.what());
  }
  const auto env = [&](const std::string& id) {
    const auto it = envs.find(id);
    if (it == envs.end()) throw parse_error(pairs_file, "no environment " + id);
    return it->second;
  };
  const auto colon = comparator.find(':');
  const std::string kind = comparator.substr(0, colon);
  const std::string arg = colon == std::string::npos ? std::string() : comparator.substr(colon + 1);
  Comparator c;
  if (kind == "principal") {
    c = Comparator::principal(env(arg));
  } else if (kind == "majority") {
    std::vector<Environment> voters;
    std::stringstream ss(arg);
    std::string id;
    TieRule tie = TieRule::none;
    while (std::getline(ss, id, ',')) {
      if (id == "both_directions") tie = TieRule::both_directions;
      else voters.push_back(env(id));
    }
    c = Comparator::majority(std::move(voters), tie);
  } else {
    throw Error(ErrorCode::config_parse_error, "--comparator: expected principal:<env> or majority:<env>,...");
  }
  std::ostringstream csv;
  csv << "pi,rho,le,ge,votes_le,votes_ge,voters\n";
  if (!j.contains("pairs") || !j.at("pairs").is_array()) throw parse_error(pairs_file, "pairs must be an array");
  for (const auto& p : j.at("pairs")) {
    if (!p.is_array() || p.size() != 2) throw parse_error(pairs_file, "each pair must be [agent, agent]");
    const auto a = p.at(0).get<std::string>(), b = p.at(1).get<std::string>();
    if (!agents.count(a) || !agents.count(b)) throw parse_error(pairs_file, "pair names an unknown agent");
    const Comparison r = compare(c, agents.at(a), agents.at(b));
    csv << a << ',' << b << ',' << r.le << ',' << r.ge << ',' << r.votes_le << ',' << r.votes_ge << ',' << r.voters
        << '\n';
  }
  emit(g, csv.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact checks for translations between reinforcement learning frameworks"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "Seed for generated corpora")->capture_default_str();
  app.add_option("--depth", g.depth, "Table depth of generated corpora")->capture_default_str();
  app.add_option("--horizon", g.horizon, "Reward horizon override");
  app.add_option("--out", g.out, "Output file, or output directory for run");

  Frame frame;
  auto add_frame = [&frame](CLI::App* sub) {
    sub->add_option("--universe", frame.universe, "Universe JSON");
    sub->add_option("--framework", frame.framework, "Framework JSON");
  };

  std::string agent_file, env_file;
  auto* eval = app.add_subcommand("eval", "Exact value of an agent in an environment");
  add_frame(eval);
  eval->add_option("--agent", agent_file)->required();
  eval->add_option("--environment", env_file)->required();

  std::string translation, law = "weak", expect = "pass";
  auto* check = app.add_subcommand("check-translation", "Check a translation law on generated corpora");
  add_frame(check);
  check->add_option("--translation", translation)->required();
  check->add_option("--law", law)->check(CLI::IsMember({"weak", "condition1", "injectivity", "strong"}))->capture_default_str();
  check->add_option("--expect", expect)->check(CLI::IsMember({"pass", "fail", "inconclusive"}))->capture_default_str();

  std::string argument, from, to;
  int size = 6;
  auto* audit = app.add_subcommand("audit", "Run an impossibility audit");
  add_frame(audit);
  audit->add_option("--argument", argument)
      ->required()
      ->check(CLI::IsMember({"mixture", "nonstrong_demo", "descending_chain", "cardinality"}));
  audit->add_option("--translation", translation);
  audit->add_option("--from", from, "Source variant for planted candidates");
  audit->add_option("--to", to, "Destination variant for planted candidates");
  audit->add_option("--size", size, "Chain length K or mixture count n")->capture_default_str();

  auto* diamond = app.add_subcommand("diamond", "Weak-translation matrix between the four variants");
  add_frame(diamond);

  std::string comparator, pairs;
  auto* elect = app.add_subcommand("elect", "Tally comparisons between agent pairs as CSV");
  add_frame(elect);
  elect->add_option("--comparator", comparator, "principal:<env-id> or majority:<env-id>,...[,both_directions]")->required();
  elect->add_option("--pairs", pairs)->required();

  std::string config;
  auto* validate = app.add_subcommand("validate", "Parse and resolve a config without running it");
  validate->add_option("config", config)->required();
  auto* run = app.add_subcommand("run", "Run every task of a config");
  run->add_option("config", config)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*eval) {
      const FrameworkSpec s = load_frame(frame, g, default_diamond_base());
      const Agent pi = policy_from_json<PolicyKind::agent>(read_json_file(agent_file), s, agent_file);
      const Environment mu = policy_from_json<PolicyKind::environment>(read_json_file(env_file), s, env_file);
      const ValueReport r = g.horizon ? expected_value(pi, mu, *g.horizon) : total_value(pi, mu);
      emit(g, to_json(r).dump(2) + "\n");
      return 0;
    }
    if (*check) {
      return run_single(g, load_frame(frame, g, default_diamond_base()),
                        {{"type", "check-translation"}, {"translation", translation}, {"law", law},
                         {"expect", expect}, {"depth", g.depth}});
    }
    if (*audit) {
      Json task{{"type", "audit"}, {"argument", argument}, {"K", size}, {"n", size}};
      if (!translation.empty()) task["translation"] = translation;
      FrameworkSpec fallback = default_diamond_base();
      if (argument == "mixture") {
        fallback = mixture_base();
        if (translation.empty()) task["translation"] = "drop-first-action:x0";
      } else if (argument == "nonstrong_demo") {
        fallback = mixture_base();
      } else if (translation.empty()) {
        task["from"] = from.empty() ? (argument == "cardinality" ? "F^ae" : "F") : from;
        task["to"] = to.empty() ? (argument == "cardinality" ? "F" : "F^ae") : to;
      }
      return run_single(g, load_frame(frame, g, fallback), task);
    }
    if (*diamond) return run_single(g, load_frame(frame, g, default_diamond_base()), {{"type", "diamond"}});
    if (*elect) return cmd_elect(g, load_frame(frame, g, default_diamond_base()), comparator, pairs);
    if (*validate) {
      const ExperimentConfig c = load_config_file(config);
      std::cout << "ok: " << c.tasks.size() << " tasks, " << c.corpora.size() << " corpora, config hash "
                << c.hash() << "\n";
      return 0;
    }
    if (*run) {
      ExperimentConfig c = load_config_file(config);
      if (!g.out.empty()) c.output_dir = g.out;
      const RunResult r = rlt::run(c);
      std::cout << r.summary;
      try {
        require_success(r);
      } catch (const Error& e) {
        std::cerr << e.what();
      }
      return r.exit_code;
    }
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const Json::exception& e) {
    std::cerr << error_name(ErrorCode::config_parse_error) << ": " << e.what() << "\n";
    return 2;
  }
  return 0;
}
