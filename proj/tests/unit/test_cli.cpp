#include "fixtures.hpp"
#include "rlt/runner.hpp"

#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

using namespace rlt;
namespace fs = std::filesystem;

namespace {

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::task_failure;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("rlt_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

Json base_config() {
  const auto s = fx::ap(false, 2);
  return Json{{"seed", 11},
              {"universe", to_json(s.u())},
              {"frameworks", {{"ap", to_json(s)}}},
              {"corpora",
               {{"A", {{"framework", "ap"}, {"kind", "agents"}, {"source", "random"}, {"count", 4}}},
                {"E", {{"framework", "ap"}, {"kind", "environments"}, {"source", "random"}, {"count", 3}, {"seed", 5}}},
                {"D", {{"framework", "ap"}, {"kind", "environments"}, {"source", "all_deterministic"}, {"depth", 1}}}}},
              {"tasks", Json::array()}};
}

std::pair<int, std::string> shell(const std::string& cmd) {
  std::string out;
  FILE* p = popen((cmd + " 2>&1").c_str(), "r");
  char buf[4096];
  while (std::size_t n = fread(buf, 1, sizeof buf, p)) out.append(buf, n);
  const int status = pclose(p);
  return {WEXITSTATUS(status), out};
}

}  // namespace

TEST(JsonIo, UniverseAndFrameworkRoundTrip) {
  const auto s = fx::spec(fx::ternary_universe(), Orientation::percept_first, true, false, 3, 4);
  const auto u = universe_from_json(to_json(s.u()));
  EXPECT_EQ(*u, s.u());
  const auto back = framework_from_json(to_json(s), u);
  EXPECT_TRUE(same_framework(back, s));
  EXPECT_EQ(back.table_depth, 3);
  EXPECT_EQ(back.reward_horizon, 4);
}

TEST(JsonIo, RationalsAreStrings) {
  const auto s = fx::ap(false, 2);
  const Json j = to_json(uniform_agent(s).materialized(1), {});
  EXPECT_EQ(j.at("table").at("").at("x0"), "1/2");
}

TEST(JsonIo, TabularPoliciesRoundTrip) {
  const auto s = fx::pa(false, 2);
  for (const auto& pi : random_agents(s, 2, 5, 3)) {
    const Agent back = policy_from_json<PolicyKind::agent>(to_json(pi), s);
    EXPECT_TRUE(equal_up_to(back, pi, 4));
  }
  for (const auto& mu : random_environments(s, 2, 5, 4)) {
    const Environment back = policy_from_json<PolicyKind::environment>(to_json(mu), s);
    EXPECT_TRUE(equal_up_to(back, mu, 4));
  }
}

TEST(JsonIo, SerializedWitnessesReproduceTheirValues) {
  const auto s = fx::spec(fx::ternary_universe(), Orientation::agent_first, false, false, 2, 2);
  const auto t = sum_map(s);
  const auto r = falsify_mixture(t, depth1_env_map_family(t));
  ASSERT_TRUE(r.witness.has_value());
  EXPECT_TRUE(recheck_serialized_witness(to_json(*r.witness)));
  const auto chain = build_descending_chain(planted_candidates(default_diamond_base(), Variant::F, Variant::Fae)[1], 6);
  ASSERT_TRUE(chain.report.witness.has_value());
  EXPECT_TRUE(recheck_serialized_witness(to_json(*chain.report.witness)));
}

TEST(JsonIo, CorruptedPolicyFileNamesThePath) {
  const auto dir = scratch("corrupt");
  const auto path = (dir / "broken_policy.json").string();
  write(path, "{\"kind\": \"agent\", \"table\": {\"x0/y9\": ");
  try {
    read_json_file(path);
    FAIL() << "no error raised";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::config_parse_error);
    EXPECT_NE(std::string(e.what()).find("broken_policy.json"), std::string::npos);
  }
  write(path, R"({"kind": "agent", "table": {"x0/y9": {"x0": "1"}}})");
  Json cfg = base_config();
  cfg["corpora"]["F"] = {{"framework", "ap"}, {"kind", "agents"}, {"source", "file"}, {"path", path}};
  try {
    load_config(cfg);
    FAIL() << "no error raised";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::config_parse_error);
    EXPECT_NE(std::string(e.what()).find("broken_policy.json"), std::string::npos);
  }
}

TEST(Runner, EmptyTaskListExitsZeroWithoutReports) {
  auto cfg = load_config(base_config());
  cfg.output_dir = scratch("empty") / "out";
  const auto r = run(cfg);
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_TRUE(r.reports.empty());
  EXPECT_FALSE(fs::exists(cfg.output_dir));
}

TEST(Runner, UnknownReferencesAreParseErrors) {
  Json cfg = base_config();
  cfg["tasks"] = {{{"type", "eval"}, {"agents", "nope"}, {"environments", "E"}}};
  EXPECT_EQ(code_of([&] { load_config(cfg); }), ErrorCode::config_parse_error);
  cfg["tasks"] = {{{"type", "teleport"}}};
  EXPECT_EQ(code_of([&] { load_config(cfg); }), ErrorCode::config_parse_error);
}

TEST(Runner, GeneratedCorporaRecordSeeds) {
  Json cfg = base_config();
  cfg["tasks"] = {{{"type", "eval"}, {"agents", "A"}, {"environments", "E"}}};
  const auto r = run(load_config(cfg), false);
  const Json rep = Json::parse(r.reports.at(0).text);
  EXPECT_EQ(rep.at("corpora").at("E").at("seed"), 5);
  EXPECT_TRUE(rep.at("corpora").at("A").contains("seed"));
  EXPECT_EQ(rep.at("result").at("values").size(), 12u);
}

TEST(Runner, EvalValuesMatchTheOracle) {
  Json cfg = base_config();
  cfg["tasks"] = {{{"type", "eval"}, {"agents", "A"}, {"environments", "E"}}};
  const auto c = load_config(cfg);
  const Json rep = Json::parse(run(c, false).reports.at(0).text);
  for (const auto& v : rep.at("result").at("values")) {
    const auto& pi = c.corpora.at("A").agent_list.at(v.at("agent").get<std::size_t>());
    const auto& mu = c.corpora.at("E").env_list.at(v.at("environment").get<std::size_t>());
    EXPECT_EQ(parse_rational(v.at("value").get<std::string>()), fx::brute_force_value(pi, mu, 3));
  }
}

TEST(Runner, ExitCodeFollowsRequiredTasks) {
  Json cfg = base_config();
  cfg["tasks"] = {{{"type", "check-translation"}, {"framework", "ap"}, {"translation", "local-reverse"}},
                  {{"type", "check-translation"},
                   {"framework", "ap"},
                   {"translation", "local-reverse"},
                   {"expect", "fail"},
                   {"required", false}}};
  auto r = run(load_config(cfg), false);
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_TRUE(r.reports[0].passed);
  EXPECT_FALSE(r.reports[1].passed);
  cfg["tasks"][1]["required"] = true;
  r = run(load_config(cfg), false);
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_EQ(code_of([&] { require_success(r); }), ErrorCode::task_failure);
}

TEST(Runner, TaskErrorsAreReported) {
  Json cfg = base_config();
  cfg["corpora"]["E2"] = {{"framework", "ap"}, {"kind", "environments"}, {"source", "random"}, {"count", 2}};
  cfg["tasks"] = {{{"type", "elect"}, {"agents", "A"}, {"voters", "E2"}, {"comparator", "majority"}}};
  const auto r = run(load_config(cfg), false);
  EXPECT_EQ(r.exit_code, 1);
  const Json rep = Json::parse(r.reports[0].text);
  EXPECT_EQ(rep.at("error").at("code"), "TieRuleRequired");
}

TEST(Runner, ElectWithPreservation) {
  Json cfg = base_config();
  cfg["tasks"] = {{{"type", "elect"},
                   {"agents", "A"},
                   {"voters", "E"},
                   {"framework", "ap"},
                   {"translation", "identity"}}};
  const auto r = run(load_config(cfg), false);
  EXPECT_EQ(r.exit_code, 0);
  const Json rep = Json::parse(r.reports[0].text);
  EXPECT_EQ(rep.at("result").at("tallies").size(), 12u);
  EXPECT_EQ(rep.at("result").at("preservation").at("verdict"), "pass");
}

TEST(Runner, ReportsAreDeterministicAndEmbedHash) {
  Json cfg = base_config();
  cfg["tasks"] = {{{"type", "eval"}, {"agents", "A"}, {"environments", "D"}},
                  {{"type", "audit"}, {"framework", "ap"}, {"argument", "nonstrong_demo"}}};
  const auto dir = scratch("det");
  cfg["output_dir"] = (dir / "one").string();
  const auto a = run(load_config(cfg));
  cfg["output_dir"] = (dir / "two").string();
  const auto b = run(load_config(cfg));
  ASSERT_EQ(a.reports.size(), b.reports.size());
  for (std::size_t i = 0; i < a.reports.size(); ++i) {
    EXPECT_EQ(a.reports[i].text, b.reports[i].text);
    const Json rep = Json::parse(a.reports[i].text);
    EXPECT_EQ(rep.at("version"), version);
    EXPECT_EQ(rep.at("config_hash"), load_config(cfg).hash());
    EXPECT_TRUE(fs::exists(dir / "one" / a.reports[i].file));
  }
  EXPECT_TRUE(fs::exists(dir / "two" / "summary.json"));
  Json other = cfg;
  other["seed"] = 12;
  EXPECT_NE(load_config(other).hash(), load_config(cfg).hash());
}

TEST(Runner, AuditWitnessesAreSelfContained) {
  const auto s = fx::spec(fx::ternary_universe(), Orientation::agent_first, false, false, 2, 2);
  Json cfg{{"universe", to_json(s.u())},
           {"frameworks", {{"t", to_json(s)}}},
           {"tasks", {{{"type", "audit"}, {"framework", "t"}, {"argument", "mixture"}, {"translation", "drop-first-action:x0"}}}}};
  const auto r = run(load_config(cfg), false);
  EXPECT_EQ(r.exit_code, 0);
  const Json rep = Json::parse(r.reports[0].text);
  const Json& audit = rep.at("result").at("audits").at(0);
  EXPECT_EQ(audit.at("candidates").size(), 216u);
  EXPECT_TRUE(recheck_serialized_witness(audit.at("witness")));
  for (const auto& c : audit.at("candidates")) ASSERT_TRUE(recheck_serialized_witness(c.at("witness")));
}

TEST(Binary, ValidateEvalAndElect) {
  const auto dir = scratch("bin");
  const auto s = fx::ap(true, 2);
  write(dir / "universe.json", to_json(s.u()).dump());
  write(dir / "framework.json", to_json(s).dump());
  Json cfg = base_config();
  write(dir / "config.json", cfg.dump());
  auto [code, out] = shell(std::string(RLT_CLI_PATH) + " validate " + (dir / "config.json").string());
  EXPECT_EQ(code, 0) << out;
  EXPECT_NE(out.find("ok:"), std::string::npos);

  const Agent pi = constant_agent(s, s.u().lookup("x1")).materialized(2);
  const Environment mu = build_indicator_environment(s, fx::hist(s, {"x1"})).materialized(2);
  write(dir / "agent.json", to_json(pi).dump());
  write(dir / "env.json", to_json(mu).dump());
  const std::string frame =
      " --universe " + (dir / "universe.json").string() + " --framework " + (dir / "framework.json").string();
  std::tie(code, out) = shell(std::string(RLT_CLI_PATH) + " eval" + frame + " --agent " + (dir / "agent.json").string() +
                              " --environment " + (dir / "env.json").string());
  EXPECT_EQ(code, 0) << out;
  EXPECT_EQ(parse_rational(Json::parse(out).at("value").get<std::string>()), 1);

  Json pairs{{"agents", {{"a", to_json(pi)}, {"b", to_json(constant_agent(s, s.u().lookup("x0")))}}},
             {"environments", {{"m", to_json(mu)}}},
             {"pairs", Json::array({Json::array({"a", "b"}), Json::array({"b", "a"})})}};
  write(dir / "pairs.json", pairs.dump());
  std::tie(code, out) = shell(std::string(RLT_CLI_PATH) + " elect" + frame + " --comparator principal:m --pairs " +
                              (dir / "pairs.json").string());
  EXPECT_EQ(code, 0) << out;
  EXPECT_EQ(out, "pi,rho,le,ge,votes_le,votes_ge,voters\na,b,0,1,0,1,1\nb,a,1,0,1,0,1\n");

  write(dir / "bad.json", "{ not json");
  std::tie(code, out) = shell(std::string(RLT_CLI_PATH) + " validate " + (dir / "bad.json").string());
  EXPECT_NE(code, 0);
  EXPECT_NE(out.find("ConfigParseError"), std::string::npos);
  EXPECT_NE(out.find("bad.json"), std::string::npos);
}
