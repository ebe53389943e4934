#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "hres/cli.hpp"

namespace {

struct Run {
  int code;
  std::string out, err;
  nlohmann::json json() const { return nlohmann::json::parse(out); }
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "hres");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = hres::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

double result(const nlohmann::json& j, const std::string& q) {
  for (const auto& r : j["results"])
    if (r["quantity"] == q) return r["value"].get<double>();
  FAIL("missing quantity " << q);
  return 0.0;
}

std::string temp_file(const std::string& name, const std::string& content) {
  auto p = std::filesystem::temp_directory_path() / name;
  std::ofstream(p) << content;
  return p.string();
}

}  // namespace

TEST_CASE("rho command") {
  auto r = run({"rho", "--n", "1", "--mu", "0"});
  CHECK(r.code == 0);
  CHECK(result(r.json(), "rho") == doctest::Approx(0.25).epsilon(1e-12));
  auto a = run({"rho", "--n", "1", "--mu", "0.9"});
  auto b = run({"rho", "--n", "1", "--mu", "-0.9"});
  CHECK(std::abs(result(a.json(), "rho") - result(b.json(), "rho")) < 1e-12);
  auto bad = run({"rho", "--n", "1", "--mu", "1.5"});
  CHECK(bad.code == 2);
  CHECK(bad.err.find("diverges") != std::string::npos);
  auto grid = run({"--csv", "rho", "--n", "2", "--grid"});
  CHECK(grid.code == 0);
  CHECK(grid.out.rfind("mu,rho,error\n", 0) == 0);
}

TEST_CASE("output format and global flags") {
  auto r = run({"rho", "--n", "1", "--mu", "0.25"});
  CHECK(r.out.find("\"value\": 0.29289321881345") != std::string::npos);
  CHECK(r.json().count("elapsed") == 0);
  CHECK(r.json()["results"][0]["error"].is_number());
  auto t = run({"--timing", "rho", "--n", "1", "--mu", "0"});
  CHECK(t.json().count("elapsed") == 1);
  auto f = run({"--verify-fixtures", "rho", "--n", "1", "--mu", "0"});
  CHECK(f.code == 0);
  CHECK(f.json()["fixtures"].size() > 20);
  CHECK(run({"--threads", "4", "rho", "--n", "1", "--mu", "0"}).out == run({"rho", "--n", "1", "--mu", "0"}).out);
  CHECK(run({}).code == 2);
  auto vf = run({"--verify-fixtures"});
  CHECK(vf.code == 0);
  CHECK(vf.json()["command"] == "verify-fixtures");
  CHECK(vf.json()["fixtures"].size() > 0);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({"--help"}).code == 0);
  CHECK(run({"--tol", "1e-10", "rho", "--n", "1", "--mu", "0"}).code == 0);
}

TEST_CASE("constants command") {
  auto g = run({"constants", "--family", "gamma", "--n", "1", "--k", "0"});
  CHECK(g.code == 0);
  CHECK(result(g.json(), "gamma") == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(run({"constants", "--family", "alpha", "--n", "2", "--kappa", "0", "--p", "0", "--q", "0"}).code == 2);
  auto b = run({"constants", "--family", "beta", "--n", "3", "--kappa", "1", "--p", "0", "--q", "1", "--check-symmetry"});
  CHECK(b.code == 0);
  CHECK(b.json()["all_passed"] == true);
  auto csv = run({"--csv", "constants", "--family", "gamma", "--n", "2", "--k", "1"});
  CHECK(csv.out.rfind("indices,coefficient,mu,rho\n", 0) == 0);
  auto l = run({"constants", "--family", "length", "--n", "1"});
  CHECK(result(l.json(), "r_n") == doctest::Approx(1.0 / 16).epsilon(1e-12));
}

TEST_CASE("residue command") {
  auto r = run({"residue", "--symbol", "koranyi-power:-4", "--gauged"});
  CHECK(r.code == 0);
  auto j = r.json();
  CHECK(std::abs(std::abs(result(j, "laurent_residue.re")) - 23.2989895416674) < 1e-4 * 23.3);
  CHECK(result(j, "density.re") == doctest::Approx(23.2989895416674 / std::pow(2 * 3.14159265358979, 3)).epsilon(1e-10));
  auto z = run({"residue", "--symbol", "gauss-tapered:-3", "--gauged"});
  CHECK(z.code == 0);
  CHECK(std::abs(result(z.json(), "laurent_residue.re")) < 1e-6);
  CHECK(run({"residue", "--symbol", "nonsense:-3"}).code == 2);
}

TEST_CASE("weyl command") {
  std::ostringstream eigen;
  for (int k = 1; k <= 2000; ++k) eigen << std::sqrt(k / 3.0) << '\n';
  auto ok = run({"weyl", "--input", temp_file("hres_weyl_ok.txt", "# synthetic\n" + eigen.str()), "--expected-nu0", "3"});
  CHECK(ok.code == 0);
  CHECK(std::abs(result(ok.json(), "nu0") / 3 - 1) < 0.01);
  CHECK(std::abs(result(ok.json(), "exponent") - 0.5) < 0.0025);
  CHECK(run({"weyl", "--input", temp_file("hres_weyl_short.txt", "1\n2\n3\n")}).code == 2);
  CHECK(run({"weyl", "--input", "/nonexistent/spectrum"}).code == 2);
}

TEST_CASE("s3 command") {
  auto h = run({"s3", "--check", "heat"});
  CHECK(h.code == 0);
  auto j = h.json();
  CHECK(result(j, "gamma_10") == doctest::Approx(1.0 / 16).epsilon(1e-6));
  CHECK(result(j, "gamma_11_prime") == doctest::Approx(1.0 / 64).epsilon(1e-6));
  CHECK(run({"s3", "--check", "bogus"}).code == 2);
  auto bad = temp_file("hres_bad_model.json", R"({"charts": ["stereo-north", "stereo-south"], "partition": false})");
  CHECK(run({"s3", "--check", "volume", "--model-file", bad}).code == 2);
}

TEST_CASE("determinism with a seed") {
  auto a = run({"--seed", "11", "s3", "--check", "weyl", "--jitter", "0.001"});
  auto b = run({"--seed", "11", "s3", "--check", "weyl", "--jitter", "0.001"});
  auto c = run({"--seed", "12", "s3", "--check", "weyl", "--jitter", "0.001"});
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out != c.out);
}

TEST_CASE("heat command") {
  auto r = run({"heat", "--trace", "s3-sublaplacian"});
  CHECK(r.code == 0);
  auto j = r.json();
  CHECK(j["zeta"][0]["location"] == 2.0);
  CHECK(j["zeta"][0]["value"].get<double>() == doctest::Approx(9.869604401089358 / 16).epsilon(1e-8));
  std::string rows = "t,value\n";
  for (int i = 0; i < 50; ++i) rows += "0.01,1\n";
  CHECK(run({"heat", "--samples", temp_file("hres_dup.csv", rows), "--depth", "2"}).code == 3);
  CHECK(run({"heat", "--depth", "9"}).code == 2);
}

TEST_CASE("index command") {
  auto r = run({"index", "--plus", "5", "--minus", "3"});
  CHECK(result(r.json(), "index") == 2.0);
  CHECK(r.json()["results"][0]["error"] == "exact");
}
