#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "gmext/cli.hpp"
#include "json.hpp"

using namespace gmext;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "gmext");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "gmext_cli_tests";
  fs::create_directories(dir);
  return dir / name;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const std::vector<std::string> kMinimal = {"--N", "3", "--p", "5", "--q", "1",
                                           "--m", "6", "--s", "1", "--k", "4"};

std::vector<std::string> with(std::vector<std::string> head, const std::vector<std::string>& tail) {
  head.insert(head.end(), tail.begin(), tail.end());
  return head;
}

}  // namespace

TEST_SUITE("cli_harness") {
  TEST_CASE("config parsing") {
    std::istringstream in("# comment\nN = 3\n\np=5 # trailing\n");
    const auto c = parse_config(in);
    CHECK(c.at("N") == "3");
    CHECK(c.at("p") == "5");
    std::istringstream unknown("foo = 1\n");
    CHECK_THROWS_AS(parse_config(unknown), std::invalid_argument);
    std::istringstream malformed("N 3\n");
    CHECK_THROWS_AS(parse_config(malformed), std::invalid_argument);
  }

  TEST_CASE("classify output and exit codes") {
    auto r = cli(with({"classify"}, kMinimal));
    CHECK(r.code == exit_code::existence);
    CHECK(r.out.find("EXISTS_MINIMAL_GROWTH Thm2.2(i) u~r^-1 v~r^-1") != std::string::npos);
    r = cli({"classify", "--N", "2", "--p", "5", "--q", "1", "--m", "6", "--s", "1", "--k", "4"});
    CHECK(r.code == exit_code::nonexistence);
    CHECK(r.out.find("NONEXISTENCE Thm2.1(i)") != std::string::npos);
    r = cli({"classify", "--N", "3", "--p", "0.5", "--q", "1", "--m", "6", "--s", "1", "--k", "4"});
    CHECK(r.code == exit_code::nonexistence);
    r = cli({"classify", "--N", "3", "--p", "4", "--q", "3", "--m", "6", "--s", "1", "--k", "4"});
    CHECK(r.code == exit_code::inconclusive);
  }

  TEST_CASE("bad configuration") {
    CHECK(cli({"classify", "--N", "3"}).code == exit_code::bad_config);
    CHECK(cli(with({"classify", "--kind", "FOO"}, kMinimal)).code == exit_code::bad_config);
    CHECK(cli({"classify", "--config", "/nonexistent/file"}).code == exit_code::bad_config);
    CHECK(cli({"bogus"}).code == exit_code::bad_config);
  }

  TEST_CASE("solve writes deterministic artifacts") {
    const auto a = scratch("solve_a").string();
    const auto b = scratch("solve_b").string();
    const std::vector<std::string> grid = {"--R", "1e4", "--n", "401", "--lambda_fraction", "0.5"};
    REQUIRE(cli(with(with({"solve", "--out", a}, kMinimal), grid)).code == 0);
    REQUIRE(cli(with(with({"solve", "--out", b}, kMinimal), grid)).code == 0);
    CHECK(slurp(a + ".csv") == slurp(b + ".csv"));
    const auto ma = nlohmann::json::parse(slurp(a + ".json"));
    auto mb = nlohmann::json::parse(slurp(b + ".json"));
    mb["config"]["out"] = ma["config"]["out"];
    CHECK(ma == mb);
    CHECK(slurp(a + ".csv").rfind("r,u,v,residual_u,residual_v\n", 0) == 0);
    CHECK(ma["verdict"]["condition"] == "Thm2.2(i)");
    CHECK(ma["box"]["holds"] == true);
    CHECK(ma.contains("schedule"));
    CHECK(ma.contains("fits"));

    const auto c = scratch("solve_c").string();
    REQUIRE(cli({"solve", "--manifest", a + ".json", "--out", c}).code == 0);
    CHECK(slurp(a + ".csv") == slurp(c + ".csv"));
  }

  TEST_CASE("solve records truncation stability") {
    const auto a = scratch("trunc_a").string();
    const auto b = scratch("trunc_b").string();
    REQUIRE(cli(with({"solve", "--out", a, "--R", "1e6", "--n", "3001"}, kMinimal)).code == 0);
    REQUIRE(cli(with({"solve", "--out", b, "--R", "2e6", "--n", "3151", "--reference", a + ".json"},
                     kMinimal))
                .code == 0);
    const auto m = nlohmann::json::parse(slurp(b + ".json"));
    REQUIRE(m.contains("truncation_stability"));
    CHECK(m["truncation_stability"]["delta_u_power"].get<double>() < 0.01);
    CHECK(m["truncation_stability"]["delta_v_power"].get<double>() < 0.01);
    CHECK(m["truncation_stability"]["stable"] == true);
  }

  TEST_CASE("solve refuses nonexistence") {
    const auto r = cli({"solve", "--N", "3", "--p", "5", "--q", "1", "--m", "2", "--s", "1", "--k",
                        "4", "--out", scratch("refuse").string()});
    CHECK(r.code == exit_code::nonexistence);
    CHECK(r.err.find("probe") != std::string::npos);
  }

  TEST_CASE("sweep atlas") {
    auto r = cli({"sweep", "--N", "3", "--q", "1", "--m", "5", "--s", "1", "--k", "4", "--p_range",
                  "3:7:5"});
    CHECK(r.code == 0);
    std::vector<std::string> lines;
    std::istringstream in(r.out);
    for (std::string line; std::getline(in, line);) lines.push_back(line);
    REQUIRE(lines.size() == 6);
    CHECK(lines[0].rfind("N,kind,p,q,m,s,k,outcome,condition", 0) == 0);
    CHECK(lines[1].find("Thm2.1(iii)") != std::string::npos);
    CHECK(lines[2].find("Thm2.2(i):p=boundary") != std::string::npos);
    CHECK(lines[3].find("Thm2.2(i)") != std::string::npos);

    r = cli({"sweep", "--N", "3", "--q", "1", "--m", "5", "--s", "1", "--k", "4", "--p_range",
             "3:7:0"});
    CHECK(r.code == 0);
    CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 1);
  }

  TEST_CASE("sweep across the log edge") {
    const auto r = cli({"sweep", "--N", "5", "--p", "5", "--q", "1", "--s", "1", "--k", "4",
                        "--m_range", "3:5:3", "--jobs", "2"});
    CHECK(r.code == 0);
    CHECK(r.out.find("POWER_LOG") != std::string::npos);
    CHECK(r.out.find("Thm2.3(ii)") != std::string::npos);
    const auto again = cli({"sweep", "--N", "5", "--p", "5", "--q", "1", "--s", "1", "--k", "4",
                            "--m_range", "3:5:3", "--jobs", "1"});
    CHECK(again.out == r.out);
  }

  TEST_CASE("fit subcommand") {
    const auto a = scratch("fit_src").string();
    REQUIRE(cli(with({"solve", "--out", a, "--R", "1e6", "--n", "3001"}, kMinimal)).code == 0);
    auto r = cli(with({"fit", "--csv", a + ".csv"}, kMinimal));
    CHECK(r.code == 0);
    CHECK(r.out.find("PASS") != std::string::npos);
    r = cli({"fit", "--csv", a + ".csv", "--window_lo", "1", "--window_hi", "1e5"});
    CHECK(r.err.find("warning") != std::string::npos);

    const auto bad = scratch("bad.csv");
    std::ofstream(bad) << "x,u\n1,2\n";
    CHECK(cli({"fit", "--csv", bad.string()}).code == exit_code::bad_csv);
    std::ofstream(bad) << "r,u\n1,2\n2,abc\n";
    CHECK(cli({"fit", "--csv", bad.string()}).code == exit_code::bad_csv);
    std::ofstream(bad) << "r,u\n1,1\n2,0.5\n10,0.1\n";
    CHECK(cli({"fit", "--csv", bad.string()}).code == exit_code::bad_csv);
  }

  TEST_CASE("probe subcommand") {
    const auto r = cli({"probe", "--N", "3", "--p", "5", "--q", "1", "--m", "2", "--s", "1",
                        "--k", "4", "--R_list", "1e2,1e3,1e4"});
    CHECK(r.code == 0);
    CHECK(r.out.find("decreasing") != std::string::npos);
  }
}
