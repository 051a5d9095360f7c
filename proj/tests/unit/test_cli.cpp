#include "grim/cli.hpp"
#include "grim/error.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace grim;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("grim_cli_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string write(const std::string& name, const std::string& text) const {
    std::ofstream(path / name) << text;
    return (path / name).string();
  }
  std::string at(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run(std::vector<std::string> args) {
  args.insert(args.begin(), "grim");
  return cli::run_command(args);
}

struct Hand {
  TempDir dir;
  std::string phi, a, d;
  Hand() {
    phi = dir.write("phi.csv", "1,0,1\n0,1,1\n");
    a = dir.write("a.csv", "1\n1\n1\n");
    d = dir.write("d.csv", "0,1\n1,0\n");
  }
};

}  // namespace

TEST_CASE("approx on the hand instance") {
  Hand h;
  const std::string out = h.dir.at("r.json");
  REQUIRE(run({"approx", "--evals", h.phi, "--weights", h.a, "--max-steps", "2", "--distances", h.d,
               "--diagnostics", "--out", out}) == cli::kOk);
  const json r = json::parse(slurp(out));
  CHECK(r["mode"] == "approx");
  CHECK(r["result"]["steps_completed"] == 2);
  CHECK(r["result"]["achieved_sup"].get<double>() < 1e-12);
  CHECK(r["result"]["support_size"] == 3);
  CHECK(r["diagnostics"]["separation"]["passed"] == true);
  CHECK(r["diagnostics"]["step_bound"]["within_hard_cap"] == true);
  CHECK(r["trace_file"] == h.dir.at("r.trace.csv"));
  const std::string trace = slurp(h.dir.at("r.trace.csv"));
  CHECK(trace ==
        "step,selected_indices,residual_sup,support_size,shuffle_winner\n"
        "1,0,1.0000000000000002,2,0\n"
        "2,1,0,3,0\n");
}

TEST_CASE("exit codes") {
  Hand h;
  CHECK(run({"approx", "--evals", h.phi, "--weights", h.a, "--bogus"}) == cli::kConfigError);
  CHECK(run({"approx", "--evals", h.phi}) == cli::kConfigError);
  CHECK(run({}) == cli::kConfigError);
  CHECK(run({"approx", "--evals", h.dir.at("missing.csv"), "--weights", h.a}) == cli::kDataError);
  const std::string bad = h.dir.write("bad.csv", "1,0,zz\n0,1,1\n");
  CHECK(run({"approx", "--evals", bad, "--weights", h.a}) == cli::kDataError);
  // epsilon0 >= epsilon
  CHECK(run({"approx", "--evals", h.phi, "--weights", h.a, "--epsilon", "1e-6", "--epsilon0", "1e-3"}) ==
        cli::kConfigError);
  // more steps than min(N - 1, Lambda) allows
  CHECK(run({"approx", "--evals", h.phi, "--weights", h.a, "--max-steps", "5"}) == cli::kConfigError);
  CHECK(run({"approx", "--evals", h.phi, "--weights", h.a, "--method", "fast"}) == cli::kConfigError);
  CHECK(run({"approx", "--evals", h.phi, "--weights", h.a, "--out", h.dir.at("no/such/dir/r.json")}) ==
        cli::kDataError);
  CHECK(run({"--help"}) == cli::kOk);
}

TEST_CASE("run --config with relative paths") {
  Hand h;
  h.dir.write("cfg.json", R"({"mode": "approx", "evals": "phi.csv", "weights": "a.csv",
                             "max_steps": 2, "k_schedule": 1, "out": "cfg_out.json"})");
  REQUIRE(run({"run", "--config", h.dir.at("cfg.json")}) == cli::kOk);
  const json r = json::parse(slurp(h.dir.at("cfg_out.json")));
  CHECK(r["result"]["steps_completed"] == 2);
  CHECK(fs::exists(h.dir.at("cfg_out.trace.csv")));

  h.dir.write("unknown.json", R"({"mode": "approx", "evals": "phi.csv", "weights": "a.csv", "epsilom": 1})");
  CHECK(run({"run", "--config", h.dir.at("unknown.json")}) == cli::kConfigError);
  h.dir.write("typed.json", R"({"mode": "approx", "evals": "phi.csv", "weights": "a.csv", "epsilon": "x"})");
  CHECK(run({"run", "--config", h.dir.at("typed.json")}) == cli::kConfigError);
  h.dir.write("broken.json", "{\"mode\": ");
  CHECK(run({"run", "--config", h.dir.at("broken.json")}) == cli::kConfigError);
  h.dir.write("mode.json", R"({"mode": "nope"})");
  CHECK(run({"run", "--config", h.dir.at("mode.json")}) == cli::kConfigError);
  CHECK(run({"run", "--config", h.dir.at("absent.json")}) != cli::kOk);
}

TEST_CASE("settings round-trip through json") {
  cli::Settings s;
  s.mode = "quadrature";
  s.epsilon = 1e-4;
  s.epsilon0 = 1e-9;
  s.max_steps = 7;
  s.k_schedule = {2, 3};
  s.s_schedule = {4};
  s.seed = 99;
  s.points = "/tmp/p.csv";
  s.bandwidth = 0.5;
  s.nodes = 9;
  const cli::Settings back = cli::settings_from_json(cli::settings_to_json(s));
  CHECK(cli::settings_to_json(back) == cli::settings_to_json(s));
  CHECK(back.k_schedule == std::vector<int>{2, 3});
  CHECK(back.points == fs::path("/tmp/p.csv"));
}

TEST_CASE("schedule resolution") {
  cli::Settings s;
  s.k_schedule = {2};
  s.s_schedule = {3};
  GrimConfig c = cli::resolve_config(s, 4);
  CHECK(c.max_steps == 4);
  CHECK(c.k_schedule == std::vector<int>{2, 2, 2, 2});
  CHECK(c.s_schedule == std::vector<int>{3, 3, 3, 3});
  s.k_schedule = {1, 2, 3};
  c = cli::resolve_config(s, 10);
  CHECK(c.max_steps == 3);
  CHECK(c.s_schedule.size() == 3);
}

TEST_CASE("trace csv of an empty trace is just the header") {
  CHECK(cli::trace_csv(GrimTrace{}) == "step,selected_indices,residual_sup,support_size,shuffle_winner\n");
  GrimTrace t;
  t.steps.push_back(GrimStep{1, {4, 2}, 3, 0.25, 0.0, {0, 1}, {0.5, 0.5}});
  CHECK(cli::trace_csv(t) ==
        "step,selected_indices,residual_sup,support_size,shuffle_winner\n1,4;2,0.25,2,3\n");
}

TEST_CASE("same seed, same trace bytes") {
  TempDir dir;
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  std::string pts;
  for (int i = 0; i < 60; ++i) pts += std::to_string(g(rng)) + "," + std::to_string(g(rng)) + "\n";
  const std::string p = dir.write("pts.csv", pts);
  for (const char* name : {"a", "b"}) {
    REQUIRE(run({"quadrature", "--points", p, "--nodes", "8", "--k", "2", "--s", "3", "--seed", "5",
                 "--epsilon", "1e-8", "--out", dir.at(std::string(name) + ".json")}) == cli::kOk);
  }
  CHECK(slurp(dir.at("a.trace.csv")) == slurp(dir.at("b.trace.csv")));
  const json r = json::parse(slurp(dir.at("a.json")));
  CHECK(r["metrics"]["node_count"].get<int>() <= 8);
  CHECK(r["metrics"]["wce_squared"].get<double>() >= 0.0);

  // Diagnostics need k = s = 1 for the separation part; otherwise it is reported inapplicable.
  REQUIRE(run({"quadrature", "--points", p, "--nodes", "6", "--diagnostics", "--epsilon", "1e-3",
               "--out", dir.at("c.json")}) == cli::kOk);
  const json c = json::parse(slurp(dir.at("c.json")));
  CHECK(c["diagnostics"]["separation"]["passed"] == true);
  CHECK(c["diagnostics"]["step_bound"]["packing_bound_kind"] == "greedy_lower_estimate");
  CHECK(run({"quadrature", "--points", p, "--nodes", "61"}) == cli::kConfigError);
}

TEST_CASE("cubature, l2-demo and geim-compare") {
  TempDir dir;
  const std::string p = dir.write("pts.csv", "x,weight\n0,0.25\n1,0.25\n2,0.25\n3,0.25\n");
  REQUIRE(run({"cubature", "--points", p, "--degree", "1", "--out", dir.at("cub.json")}) == cli::kOk);
  const json c = json::parse(slurp(dir.at("cub.json")));
  CHECK(c["metrics"]["moment_count"] == 2);
  CHECK(c["metrics"]["moment_max_rel_error"].get<double>() <= 1e-12);
  CHECK(c["result"]["support_size"].get<int>() <= 2);
  CHECK(run({"cubature", "--points", p, "--weights", dir.write("w.csv", "1\n1\n1\n1\n")}) == cli::kConfigError);

  const std::vector<std::string> demo{"--n", "3", "--functionals", "40", "--width", "0.01",
                                      "--domain-points", "2001"};
  std::vector<std::string> l2{"l2-demo"};
  l2.insert(l2.end(), demo.begin(), demo.end());
  l2.insert(l2.end(), {"--out", dir.at("l2.json")});
  REQUIRE(run(l2) == cli::kOk);
  const json l = json::parse(slurp(dir.at("l2.json")));
  CHECK(l["metrics"]["l2_error"].get<double>() > 0.0);
  CHECK(l["metrics"]["sup_error"].get<double>() >= l["result"]["achieved_sup"].get<double>() - 1e-12);

  std::vector<std::string> gc{"geim-compare"};
  gc.insert(gc.end(), demo.begin(), demo.end());
  gc.insert(gc.end(), {"--features", "4", "--out", dir.at("gc.json")});
  REQUIRE(run(gc) == cli::kOk);
  const json g = json::parse(slurp(dir.at("gc.json")));
  CHECK(g["geim"]["selected_features"].size() == 4);
  CHECK(g["geim"]["selected_functionals"].size() == 4);
  CHECK(g["geim"]["metrics"]["l2_error"].get<double>() >= 0.0);
  CHECK(g["result"]["support_size"].get<int>() <= 4);
}
