#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "qge/cli.hpp"
#include "qge/statevector.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = qge::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("qge_cli_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::string first_line(const fs::path& p) {
  std::ifstream f(p);
  std::string line;
  std::getline(f, line);
  return line;
}

}  // namespace

TEST_CASE("winding subcommand") {
  const fs::path dir = scratch("winding");
  const Run r = run({"winding", "--t1", "1.0", "--N", "200", "-o", dir.string()});
  REQUIRE(r.code == qge::cli::ok);
  const json j = json::parse(r.out);
  CHECK(j["value"].get<double>() == doctest::Approx(0.5).epsilon(0.05));
  CHECK(j["oracle_value"] == 0.5);
  CHECK(fs::exists(dir / "winding.json"));
  CHECK(fs::exists(dir / "winding_texture.csv"));
  CHECK(json::parse(slurp(dir / "winding.json"))["N"] == 200);
}

TEST_CASE("texture output starts with the resolved configuration") {
  const fs::path dir = scratch("texture");
  REQUIRE(run({"texture", "--t1", "0.2", "--N", "20", "--out", dir.string()}).code == 0);
  const std::string header = first_line(dir / "texture.csv");
  CHECK(header.rfind("# ", 0) == 0);
  CHECK(header.find("t1=0.2") != std::string::npos);
  CHECK(header.find("N=20") != std::string::npos);
  CHECK(header.find("via-dilation=false") != std::string::npos);
}

TEST_CASE("identical invocations give identical files") {
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  const std::vector<std::string> base{"texture", "--t1", "1.0", "--N", "24", "--shots", "2000", "--seed", "5"};
  auto with = [&](const fs::path& dir, const std::string& jobs) {
    auto args = base;
    args.insert(args.end(), {"-o", dir.string(), "-j", jobs});
    return run(args).code;
  };
  REQUIRE(with(a, "1") == 0);
  REQUIRE(with(b, "1") == 0);
  CHECK(slurp(a / "texture.csv") == slurp(b / "texture.csv"));

  const fs::path c = scratch("det_c");
  REQUIRE(with(c, "2") == 0);
  auto body = [](const std::string& s) { return s.substr(s.find('\n')); };
  CHECK(body(slurp(a / "texture.csv")) == body(slurp(c / "texture.csv")));
}

TEST_CASE("config files set defaults and flags override them") {
  const fs::path dir = scratch("config");
  {
    std::ofstream cfg(dir / "run.ini");
    cfg << "[texture]\nt1=1.8\nN=16\n";
  }
  REQUIRE(run({"--config", (dir / "run.ini").string(), "texture", "-o", dir.string()}).code == 0);
  CHECK(first_line(dir / "texture.csv").find("t1=1.8") != std::string::npos);
  REQUIRE(run({"--config", (dir / "run.ini").string(), "texture", "--t1", "0.3", "-o", dir.string()}).code == 0);
  const std::string header = first_line(dir / "texture.csv");
  CHECK(header.find("t1=0.3") != std::string::npos);
  CHECK(header.find("N=16") != std::string::npos);
}

TEST_CASE("output directory falls back to the environment") {
  const fs::path dir = scratch("env");
  ::setenv(qge::cli::kOutputDirEnv, dir.string().c_str(), 1);
  const Run r = run({"texture", "--N", "16"});
  ::unsetenv(qge::cli::kOutputDirEnv);
  REQUIRE(r.code == 0);
  CHECK(fs::exists(dir / "texture.csv"));
}

TEST_CASE("phase diagram reports transitions") {
  const fs::path dir = scratch("phase");
  const Run r = run({"phase-diagram", "--t1-start", "0.2", "--t1-stop", "1.8", "--t1-step", "0.4", "--N", "100",
                     "-o", dir.string()});
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  REQUIRE(j["transitions"].size() == 2);
  CHECK(j["transitions"][0].get<double>() == doctest::Approx(0.4));
  CHECK(j["transitions"][1].get<double>() == doctest::Approx(1.6));
  CHECK(fs::exists(dir / "phase_diagram.csv"));
}

TEST_CASE("prepare and dilation-check outputs") {
  const fs::path dir = scratch("prep");
  REQUIRE(run({"prepare", "--t1", "1.8", "-o", dir.string()}).code == 0);
  CHECK(fs::exists(dir / "prepare_right.csv"));
  CHECK(fs::exists(dir / "prepare_left.csv"));

  const Run d = run({"dilation-check", "--t1", "1.8", "--steps", "2000", "-o", dir.string()});
  REQUIRE(d.code == 0);
  const json j = json::parse(d.out);
  CHECK(j["max_population_difference"].get<double>() < 1e-3);
  CHECK(j["min_eig_M_minus_I"].get<double>() > 0.0);
  CHECK(fs::exists(dir / "dilation_schedule.csv"));
  std::ifstream cmp(dir / "dilation_comparison.csv");
  std::string line;
  std::getline(cmp, line);
  std::getline(cmp, line);
  CHECK(line == "t,pop0_dilated,pop0_direct,abs_diff,success_prob");
}

TEST_CASE("genexp subcommand") {
  const fs::path dir = scratch("genexp");
  qge::save_state((dir / "zero.txt").string(), qge::StateVector(1));
  {
    std::ofstream o(dir / "z.txt");
    o << "Z\n";
  }
  const Run r = run({"genexp", "--psi1", (dir / "zero.txt").string(), "--psi2", (dir / "zero.txt").string(), "--O",
                     (dir / "z.txt").string()});
  REQUIRE(r.code == 0);
  CHECK(r.out == "1.0 0.0\n");
}

TEST_CASE("exit codes and error records") {
  const Run bad_bc = run({"texture", "--bc", "xyz"});
  CHECK(bad_bc.code == qge::cli::usage);
  CHECK(json::parse(bad_bc.err)["exit_code"] == 2);

  CHECK(run({}).code == qge::cli::usage);
  CHECK(run({"texture", "--N", "-4"}).code == qge::cli::usage);
  CHECK(run({"winding", "--bc", "obc", "--t1", "0.5", "--delta", "0.5"}).code == qge::cli::usage);

  const fs::path dir = scratch("errors");
  const Run b0 = run({"dilation-check", "--t1", "1.8", "--b", "0", "--steps", "500", "-o", dir.string()});
  CHECK(b0.code == qge::cli::physics);
  const json e = json::parse(b0.err);
  CHECK(e["exit_code"] == 3);
  CHECK(e.contains("error"));
  CHECK(e.contains("message"));

  CHECK(run({"genexp", "--psi1", "/nonexistent", "--psi2", "/nonexistent", "--O", "/nonexistent"}).code ==
        qge::cli::usage);
}
