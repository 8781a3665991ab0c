#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cli/cli.hpp"
#include "cli/config.hpp"
#include "edpm/errors.hpp"

using namespace edpm;
using namespace edpm::cli;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "edpm");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = dispatch(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("edpm_test_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("bounds and minimal truncation") {
  const auto m = run({"min-trunc", "--n", "200", "--alpha-theta", "0.5", "--alpha-psi", "0.5", "--eps", "0.01"});
  CHECK(m.code == 0);
  CHECK(m.out == "N=7 M=7\n");

  const auto b = run({"bounds", "--n", "200", "--N", "10", "--M", "10", "--alpha-theta", "0.5", "--alpha-psi", "0.5"});
  CHECK(b.code == 0);
  CHECK(b.out.rfind("L1 bound: 2.437e-05 (N=10 M=10)\n", 0) == 0);

  const auto j = run({"bounds", "--json", "--M", "50", "--alpha-psi", "0.5,3"});
  REQUIRE(j.code == 0);
  const auto parsed = nlohmann::json::parse(j.out);
  CHECK(parsed.at("bound").get<double>() == doctest::Approx(7.669e-5).epsilon(1e-3));
}

TEST_CASE("usage errors") {
  CHECK(run({}).code != 0);
  CHECK(run({"nonsense"}).code == config_error);
  const auto unknown = run({"bounds", "--set", "bounds.nope=3"});
  CHECK(unknown.code == config_error);
  CHECK(unknown.err.find("bounds.nope") != std::string::npos);
  CHECK(run({"bounds", "--alpha-theta", "-1"}).code == config_error);
  CHECK(run({"min-trunc", "--eps", "abc"}).code == config_error);
  CHECK(run({"fit-blocked", "--data", "/nonexistent/data.csv"}).code == io_error);
  CHECK(run({"--version"}).code == 0);
}

TEST_CASE("config precedence and round trip") {
  const auto dir = scratch_dir("config");
  {
    std::ofstream f(dir / "c.json");
    f << R"({"bounds": {"n": 1000, "alpha_theta": 3.0}, "bounds.alpha_psi": [3.0]})";
  }
  const Config c = parse_config((dir / "c.json").string());
  CHECK(c.size("bounds.n") == 1000);
  CHECK(c.real("bounds.alpha_theta") == 3.0);
  CHECK(c.size("bounds.N") == 10);

  const auto from_file = run({"min-trunc", "--config", (dir / "c.json").string()});
  CHECK(from_file.out == "N=42 M=42\n");
  const auto overridden = run({"min-trunc", "--config", (dir / "c.json").string(), "--n", "2000"});
  CHECK(overridden.out == "N=44 M=44\n");

  const Config again = parse_config_text(c.resolved().dump());
  CHECK(again.resolved() == c.resolved());

  CHECK_THROWS_AS(parse_config_text(R"({"chain": {"iterations": "many"}})"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("{not json"), ConfigError);
  CHECK_THROWS_AS(parse_config((dir / "missing.json").string()), IoError);
  fs::remove_all(dir);
}

TEST_CASE("simulate, fit, predict") {
  const auto dir = scratch_dir("pipeline");
  const auto sim = run({"simulate", "--p", "2", "--n", "30", "--seed", "4", "--output-dir", (dir / "sim").string()});
  REQUIRE(sim.code == 0);
  CHECK(fs::exists(dir / "sim" / "data.csv"));
  CHECK(fs::exists(dir / "sim" / "manifest.json"));

  const auto fit = run({"fit-blocked", "--data", (dir / "sim" / "data.csv").string(), "--iterations", "60",
                        "--burn-in", "20", "--thin", "4", "--N", "4", "--M", "4", "--output-dir",
                        (dir / "fit").string()});
  REQUIRE(fit.code == 0);
  CHECK(fit.out.find("wrote 10 draws") != std::string::npos);

  const auto urn = run({"fit-polya", "--data", (dir / "sim" / "data.csv").string(), "--iterations", "60",
                        "--burn-in", "20", "--thin", "4", "--output-dir", (dir / "urn").string()});
  REQUIRE(urn.code == 0);

  for (const char* fitdir : {"fit", "urn"}) {
    const auto pred = run({"predict", "--chain", (dir / fitdir / "chain.jsonl").string(), "--hyperparameters",
                           (dir / fitdir / "hyperparameters.json").string(), "--x",
                           (dir / "sim" / "data.csv").string(), "--output-dir", (dir / "pred").string()});
    REQUIRE(pred.code == 0);
    const auto csv = slurp(dir / "pred" / "predictions.csv");
    CHECK(csv.rfind("id,mean,q025,q25,q75,q975\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 31);
  }

  const Hyperparameters hp = read_hyperparameters((dir / "fit" / "hyperparameters.json").string());
  const auto back = hyperparameters_from_json(hyperparameters_to_json(hp));
  CHECK(back.beta0 == hp.beta0);
  CHECK(back.C_y == hp.C_y);
  CHECK(back.c_x == hp.c_x);

  const auto mismatch = run({"predict", "--chain", (dir / "fit" / "chain.jsonl").string(), "--hyperparameters",
                             (dir / "fit" / "hyperparameters.json").string(), "--x",
                             (dir / "fit" / "trace.csv").string(), "--output-dir", (dir / "pred").string()});
  CHECK(mismatch.code == config_error);
  fs::remove_all(dir);
}
