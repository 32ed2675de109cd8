#pragma once

#include "rlt/json_io.hpp"

#include <filesystem>
#include <future>
#include <map>
#include <string>
#include <vector>

namespace rlt {

struct CorpusEntry {
  std::string framework;
  bool agents = true;
  std::vector<Agent> agent_list;
  std::vector<Environment> env_list;
  Json provenance;
};

struct TaskSpec {
  std::size_t index = 0;
  std::string id;
  std::string type;
  bool required = true;
  std::uint64_t seed = 0;
  Json body;
};

/// A parsed and resolved experiment configuration.
struct ExperimentConfig {
  Json source;
  std::filesystem::path base_dir;
  std::uint64_t seed = 0;
  std::shared_ptr<const Universe> universe;
  std::map<std::string, FrameworkSpec> frameworks;
  std::map<std::string, CorpusEntry> corpora;
  std::vector<TaskSpec> tasks;
  std::filesystem::path output_dir = "reports";
  bool parallel = true;

  /// Hash of the configuration with output paths removed.
  std::string hash() const {
    Json j = source;
    j.erase("output_dir");
    return fnv1a_hex(j.dump());
  }
};

struct TaskReport {
  std::size_t index = 0;
  std::string id;
  std::string type;
  bool required = true;
  bool passed = false;
  std::string file;
  std::string text;
};

struct RunResult {
  int exit_code = 0;
  std::vector<TaskReport> reports;
  std::string summary;
};

namespace detail {

inline const std::vector<std::string>& task_types() {
  static const std::vector<std::string> t{"eval", "check-translation", "audit", "diamond", "elect"};
  return t;
}

inline std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

template <PolicyKind K>
std::vector<Policy<K>> policies_from_array(const Json& arr, const FrameworkSpec& spec, const std::string& where) {
  if (!arr.is_array()) throw parse_error(where, "expected an array of policies");
  std::vector<Policy<K>> out;
  for (std::size_t i = 0; i < arr.size(); ++i)
    out.push_back(policy_from_json<K>(arr[i], spec, where + "[" + std::to_string(i) + "]"));
  return out;
}

inline CorpusEntry load_corpus(const ExperimentConfig& cfg, const std::string& name, const Json& j,
                               std::uint64_t default_seed) {
  const std::string where = "corpora." + name;
  CorpusEntry c;
  c.framework = j.at("framework").get<std::string>();
  if (!cfg.frameworks.count(c.framework)) throw parse_error(where, "unknown framework " + c.framework);
  const FrameworkSpec& spec = cfg.frameworks.at(c.framework);
  const std::string kind = j.value("kind", std::string("agents"));
  if (kind != "agents" && kind != "environments") throw parse_error(where, "kind must be agents or environments");
  c.agents = kind == "agents";
  const std::string src = j.value("source", std::string("all_deterministic"));
  const int depth = j.value("depth", spec.table_depth);
  c.provenance = {{"framework", c.framework}, {"kind", kind}, {"source", src}};
  if (src == "all_deterministic") {
    c.provenance["depth"] = depth;
    if (c.agents) c.agent_list = all_deterministic_agents(spec, depth);
    else c.env_list = all_deterministic_environments(spec, depth);
  } else if (src == "random") {
    const auto n = j.at("count").get<std::size_t>();
    const auto seed = j.value("seed", default_seed);
    c.provenance["depth"] = depth;
    c.provenance["count"] = n;
    c.provenance["seed"] = seed;
    if (c.agents) c.agent_list = random_agents(spec, depth, n, seed);
    else c.env_list = random_environments(spec, depth, n, seed);
  } else if (src == "inline" || src == "file") {
    Json arr;
    std::string at = where + ".policies";
    if (src == "inline") {
      arr = j.at("policies");
    } else {
      const auto path = resolve(cfg.base_dir, j.at("path").get<std::string>());
      at = path.string();
      arr = read_json_file(at);
    }
    if (c.agents) c.agent_list = policies_from_array<PolicyKind::agent>(arr, spec, at);
    else c.env_list = policies_from_array<PolicyKind::environment>(arr, spec, at);
    c.provenance["count"] = arr.size();
  } else {
    throw parse_error(where, "unknown corpus source " + src);
  }
  return c;
}

inline const FrameworkSpec& framework_ref(const ExperimentConfig& cfg, const TaskSpec& t, const char* key = "framework") {
  const std::string name = t.body.at(key).get<std::string>();
  const auto it = cfg.frameworks.find(name);
  if (it == cfg.frameworks.end()) throw parse_error("tasks[" + std::to_string(t.index) + "]", "unknown framework " + name);
  return it->second;
}

inline const CorpusEntry& corpus_ref(const ExperimentConfig& cfg, const TaskSpec& t, const char* key, bool agents) {
  const std::string where = "tasks[" + std::to_string(t.index) + "]." + key;
  const std::string name = t.body.at(key).get<std::string>();
  const auto it = cfg.corpora.find(name);
  if (it == cfg.corpora.end()) throw parse_error(where, "unknown corpus " + name);
  if (it->second.agents != agents) throw parse_error(where, name + " holds the wrong kind of policy");
  return it->second;
}

inline Translation translation_ref(const ExperimentConfig& cfg, const TaskSpec& t) {
  const FrameworkSpec& base = framework_ref(cfg, t);
  const Json& tr = t.body.at("translation");
  if (tr.is_string()) return make_translation(tr.get<std::string>(), base);
  return candidate_from_json(base, tr, "tasks[" + std::to_string(t.index) + "].translation");
}

inline std::vector<Agent> agents_for(const ExperimentConfig& cfg, const TaskSpec& t, const char* key,
                                     const FrameworkSpec& spec, std::uint64_t seed) {
  if (t.body.contains(key)) return corpus_ref(cfg, t, key, true).agent_list;
  const int depth = t.body.value("depth", 2);
  std::vector<Agent> out;
  try {
    out = all_deterministic_agents(spec, depth);
  } catch (const Error&) {
  }
  if (!spec.deterministic_agents)
    for (auto& a : random_agents(spec, depth, t.body.value("random_agents", 8), seed)) out.push_back(std::move(a));
  return out;
}

inline std::vector<Environment> envs_for(const ExperimentConfig& cfg, const TaskSpec& t, const char* key,
                                         const FrameworkSpec& spec, std::uint64_t seed) {
  if (t.body.contains(key)) return corpus_ref(cfg, t, key, false).env_list;
  const int depth = t.body.value("depth", 2);
  std::vector<Environment> out;
  try {
    out = all_deterministic_environments(spec, depth);
  } catch (const Error&) {
  }
  if (!spec.deterministic_environments)
    for (auto& e : random_environments(spec, depth, t.body.value("random_environments", 6), seed))
      out.push_back(std::move(e));
  return out;
}

inline bool audit_ok(const AuditReport& r) {
  return r.outcome == Outcome::contradiction_exhibited && r.all_checks_hold();
}

inline Json run_eval(const ExperimentConfig& cfg, const TaskSpec& t, bool& passed) {
  const auto& agents = corpus_ref(cfg, t, "agents", true);
  const auto& envs = corpus_ref(cfg, t, "environments", false);
  Json values = Json::array();
  for (std::size_t i = 0; i < agents.agent_list.size(); ++i)
    for (std::size_t j = 0; j < envs.env_list.size(); ++j) {
      const auto& pi = agents.agent_list[i];
      const auto& mu = envs.env_list[j];
      const ValueReport r = t.body.contains("horizon") ? expected_value(pi, mu, t.body.at("horizon").get<int>())
                                                       : total_value(pi, mu);
      Json v = to_json(r);
      v["agent"] = i;
      v["environment"] = j;
      values.push_back(std::move(v));
    }
  passed = true;
  return Json{{"values", values}};
}

inline Json run_check(const ExperimentConfig& cfg, const TaskSpec& t, bool& passed) {
  const Translation tr = translation_ref(cfg, t);
  const std::string law = t.body.value("law", std::string("weak"));
  const auto agents = agents_for(cfg, t, "agents", tr.source, t.seed);
  const auto envs = envs_for(cfg, t, "environments", tr.dest, t.seed + 1);
  LawReport r;
  if (law == "weak") r = check_weak(tr, agents, envs);
  else if (law == "condition1") r = check_condition1(tr, agents, envs);
  else if (law == "injectivity") r = check_injectivity(tr, envs);
  else if (law == "strong") r = check_strong(tr, envs, agents_for(cfg, t, "dest_agents", tr.dest, t.seed + 2), agents);
  else throw parse_error("tasks[" + std::to_string(t.index) + "].law", "unknown law " + law);
  const std::string expect = t.body.value("expect", std::string("pass"));
  passed = std::string(verdict_name(r.verdict)) == expect;
  return Json{{"translation", tr.id},
              {"expect", expect},
              {"corpus", {{"agents", agents.size()}, {"environments", envs.size()}}},
              {"report", to_json(r)}};
}

inline Json run_audit(const ExperimentConfig& cfg, const TaskSpec& t, bool& passed) {
  const std::string where = "tasks[" + std::to_string(t.index) + "]";
  const std::string arg = t.body.at("argument").get<std::string>();
  const FrameworkSpec& base = framework_ref(cfg, t);
  Json out{{"argument", arg}};
  std::vector<AuditReport> reports;
  Json plans = Json::array();
  if (arg == "mixture") {
    const Translation tr = translation_ref(cfg, t);
    reports.push_back(falsify_mixture(tr, depth1_env_map_family(tr)));
  } else if (arg == "nonstrong_demo") {
    reports.push_back(demo_nonstrong_times_map(base));
  } else if (arg == "descending_chain" || arg == "cardinality") {
    std::vector<Translation> candidates;
    if (t.body.contains("translation")) {
      candidates.push_back(translation_ref(cfg, t));
    } else {
      candidates = planted_candidates(base, parse_variant(t.body.at("from").get<std::string>()),
                                      parse_variant(t.body.at("to").get<std::string>()));
    }
    for (const auto& c : candidates) {
      if (arg == "descending_chain") {
        auto [plan, report] = build_descending_chain(c, t.body.value("K", 6));
        plans.push_back(to_json(plan));
        reports.push_back(std::move(report));
      } else {
        reports.push_back(cardinality_audit(c, t.body.value("n", 6)));
      }
    }
  } else {
    throw parse_error(where + ".argument", "unknown argument " + arg);
  }
  passed = !reports.empty();
  out["audits"] = Json::array();
  for (const auto& r : reports) {
    passed = passed && audit_ok(r);
    out["audits"].push_back(to_json(r));
  }
  if (!plans.empty()) out["chains"] = plans;
  return out;
}

inline Json run_diamond(const ExperimentConfig& cfg, const TaskSpec& t, bool& passed) {
  const FrameworkSpec base = t.body.contains("framework") ? framework_ref(cfg, t) : default_diamond_base();
  const DiamondMatrix m = diamond_report(base, t.seed, t.body.value("parallel", true));
  passed = m.reproduced();
  return to_json(m);
}

inline Json run_elect(const ExperimentConfig& cfg, const TaskSpec& t, bool& passed) {
  const std::string where = "tasks[" + std::to_string(t.index) + "]";
  const auto& agents = corpus_ref(cfg, t, "agents", true).agent_list;
  const auto& voters = corpus_ref(cfg, t, "voters", false).env_list;
  const std::string kind = t.body.value("comparator", std::string("principal"));
  Comparator c;
  if (kind == "principal") {
    const auto i = t.body.value("voter", std::size_t{0});
    if (i >= voters.size()) throw parse_error(where + ".voter", "index out of range");
    c = Comparator::principal(voters[i]);
  } else if (kind == "majority") {
    const std::string tie = t.body.value("tie", std::string("none"));
    c = Comparator::majority(voters, tie == "both_directions" ? TieRule::both_directions : TieRule::none);
  } else {
    throw parse_error(where + ".comparator", "unknown comparator " + kind);
  }
  Json tallies = Json::array();
  for (std::size_t i = 0; i < agents.size(); ++i)
    for (std::size_t j = 0; j < agents.size(); ++j) {
      if (i == j) continue;
      Json row = to_json(compare(c, agents[i], agents[j]));
      row["pi"] = i;
      row["rho"] = j;
      tallies.push_back(std::move(row));
    }
  Json out{{"comparator", kind}, {"voters", c.voters.size()}, {"tallies", tallies}};
  passed = true;
  if (t.body.contains("translation")) {
    const Translation tr = translation_ref(cfg, t);
    const auto src_agents = agents_for(cfg, t, "source_agents", tr.source, t.seed);
    const auto src_envs = envs_for(cfg, t, "dest_environments", tr.dest, t.seed + 1);
    const Comparator dest = Comparator::principal(voters.at(t.body.value("voter", std::size_t{0})));
    const Comparator src = induce_source_comparator(tr, dest, src_agents, src_envs);
    const LawReport r = check_preservation(tr, src, dest, ordered_pairs(src_agents));
    passed = r.passed();
    out["translation"] = tr.id;
    out["preservation"] = to_json(r);
  }
  return out;
}

}  // namespace detail

/// Parses and resolves a configuration. `base_dir` anchors relative paths.
inline ExperimentConfig load_config(const Json& j, const std::filesystem::path& base_dir = ".") {
  ExperimentConfig cfg;
  cfg.source = j;
  cfg.base_dir = base_dir;
  try {
    if (!j.is_object()) throw parse_error("config", "expected an object");
    cfg.seed = j.value("seed", std::uint64_t{0});
    cfg.parallel = j.value("parallel", true);
    if (j.contains("output_dir")) cfg.output_dir = detail::resolve(base_dir, j.at("output_dir").get<std::string>());
    if (!j.contains("universe")) throw parse_error("config", "missing universe");
    const Json& u = j.at("universe");
    if (u.is_string()) {
      const auto path = detail::resolve(base_dir, u.get<std::string>()).string();
      cfg.universe = universe_from_json(read_json_file(path), path);
    } else {
      cfg.universe = universe_from_json(u);
    }
    const Json frameworks = j.value("frameworks", Json::object());
    for (const auto& [name, f] : frameworks.items()) {
      const std::string where = "frameworks." + name;
      auto universe = cfg.universe;
      if (f.contains("universe")) {
        const Json& fu = f.at("universe");
        if (fu.is_string()) {
          const auto path = detail::resolve(base_dir, fu.get<std::string>()).string();
          universe = universe_from_json(read_json_file(path), path);
        } else {
          universe = universe_from_json(fu, where + ".universe");
        }
      }
      cfg.frameworks.emplace(name, framework_from_json(f, universe, where));
    }
    std::uint64_t k = 0;
    const Json corpora = j.value("corpora", Json::object());
    for (const auto& [name, c] : corpora.items())
      cfg.corpora.emplace(name, detail::load_corpus(cfg, name, c, cfg.seed + 1000 + k++));
    const Json tasks = j.value("tasks", Json::array());
    if (!tasks.is_array()) throw parse_error("tasks", "expected an array");
    for (std::size_t i = 0; i < tasks.size(); ++i) {
      const std::string where = "tasks[" + std::to_string(i) + "]";
      TaskSpec t;
      t.index = i;
      t.body = tasks[i];
      t.type = t.body.at("type").get<std::string>();
      const auto& types = detail::task_types();
      if (std::find(types.begin(), types.end(), t.type) == types.end())
        throw parse_error(where + ".type", "unknown task type " + t.type);
      t.id = t.body.value("id", t.type + "-" + std::to_string(i));
      t.required = t.body.value("required", true);
      t.seed = t.body.value("seed", cfg.seed + i);
      for (const char* key : {"agents", "environments", "voters", "source_agents", "dest_agents",
                              "dest_environments"})
        if (t.body.contains(key)) {
          const auto name = t.body.at(key).get<std::string>();
          if (!cfg.corpora.count(name)) throw parse_error(where + "." + key, "unknown corpus " + name);
        }
      if (t.body.contains("framework") && !cfg.frameworks.count(t.body.at("framework").get<std::string>()))
        throw parse_error(where + ".framework", "unknown framework " + t.body.at("framework").get<std::string>());
      cfg.tasks.push_back(std::move(t));
    }
  } catch (const Json::exception& e) {
    throw parse_error("config", e.what());
  }
  return cfg;
}

inline ExperimentConfig load_config_file(const std::string& path) {
  const std::filesystem::path p(path);
  return load_config(read_json_file(path), p.has_parent_path() ? p.parent_path() : std::filesystem::path("."));
}

inline TaskReport run_task(const ExperimentConfig& cfg, const TaskSpec& t) {
  TaskReport rep;
  rep.index = t.index;
  rep.id = t.id;
  rep.type = t.type;
  rep.required = t.required;
  Json out{{"version", version},
           {"config_hash", cfg.hash()},
           {"task", {{"index", t.index}, {"id", t.id}, {"type", t.type}, {"required", t.required}, {"seed", t.seed}}}};
  Json corpora = Json::object();
  for (const char* key : {"agents", "environments", "voters", "source_agents", "dest_agents", "dest_environments"})
    if (t.body.contains(key)) {
      const auto name = t.body.at(key).get<std::string>();
      corpora[name] = cfg.corpora.at(name).provenance;
    }
  if (!corpora.empty()) out["corpora"] = corpora;
  bool passed = false;
  try {
    Json result;
    if (t.type == "eval") result = detail::run_eval(cfg, t, passed);
    else if (t.type == "check-translation") result = detail::run_check(cfg, t, passed);
    else if (t.type == "audit") result = detail::run_audit(cfg, t, passed);
    else if (t.type == "diamond") result = detail::run_diamond(cfg, t, passed);
    else result = detail::run_elect(cfg, t, passed);
    out["result"] = std::move(result);
  } catch (const Error& e) {
    passed = false;
    out["error"] = {{"code", error_name(e.code())}, {"message", e.what()}};
  } catch (const Json::exception& e) {
    passed = false;
    out["error"] = {{"code", error_name(ErrorCode::config_parse_error)}, {"message", e.what()}};
  }
  out["passed"] = passed;
  rep.passed = passed;
  char name[32];
  std::snprintf(name, sizeof name, "%03zu-", t.index);
  rep.file = std::string(name) + t.type + ".json";
  rep.text = out.dump(2) + "\n";
  return rep;
}

/// Runs every task, writes one report per task plus summary.json, and returns the exit code.
inline RunResult run(const ExperimentConfig& cfg, bool write_files = true) {
  RunResult res;
  if (cfg.tasks.empty()) return res;
  if (cfg.parallel) {
    std::vector<std::future<TaskReport>> futures;
    for (const auto& t : cfg.tasks) futures.push_back(std::async(std::launch::async, [&cfg, &t] { return run_task(cfg, t); }));
    for (auto& f : futures) res.reports.push_back(f.get());
  } else {
    for (const auto& t : cfg.tasks) res.reports.push_back(run_task(cfg, t));
  }
  Json summary{{"version", version}, {"config_hash", cfg.hash()}, {"tasks", Json::array()}};
  for (const auto& r : res.reports) {
    summary["tasks"].push_back(
        {{"index", r.index}, {"id", r.id}, {"type", r.type}, {"required", r.required}, {"passed", r.passed}, {"file", r.file}});
    if (r.required && !r.passed) res.exit_code = 1;
  }
  summary["exit_code"] = res.exit_code;
  res.summary = summary.dump(2) + "\n";
  if (write_files) {
    std::filesystem::create_directories(cfg.output_dir);
    for (const auto& r : res.reports) std::ofstream(cfg.output_dir / r.file) << r.text;
    std::ofstream(cfg.output_dir / "summary.json") << res.summary;
  }
  return res;
}

/// Raises TaskFailure carrying the first failing required report.
inline void require_success(const RunResult& r) {
  for (const auto& t : r.reports)
    if (t.required && !t.passed)
      throw Error(ErrorCode::task_failure, "task " + t.id + " failed\n" + t.text);
}

}  // namespace rlt
