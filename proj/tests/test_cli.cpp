#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <unistd.h>

#include "doctest.h"
#include "json.hpp"
#include "stabcert/cli.hpp"
#include "stabcert/report_io.hpp"

using namespace stabcert;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code = -1;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  Result r;
  r.code = cli::run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("stabcert_cli_" + std::to_string(::getpid())) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

json read_json(const fs::path& p) { return json::parse(slurp(p)); }

}  // namespace

TEST_CASE("usage errors exit 64, help exits 0") {
  CHECK(run({"certify", "--gamma", "2", "--beta", "1"}).code == cli::kUsage);
  CHECK(run({"certify", "--gamma", "0.1"}).code == cli::kUsage);
  CHECK(run({"certify", "--gamma", "0.1", "--beta", "1", "--no-such-flag"}).code == cli::kUsage);
  CHECK(run({"certify", "--optimizer", "adam", "--gamma", "0.1", "--beta", "1"}).code == cli::kUsage);
  CHECK(run({}).code == cli::kUsage);
  CHECK(run({"bound", "--gamma", "0.1", "--beta", "1", "--n", "0", "--T", "5"}).code == cli::kUsage);
  CHECK(run({"simulate", "sideways"}).code == cli::kUsage);
  const auto help = run({"--help"});
  CHECK(help.code == cli::kOk);
  CHECK(help.out.find("certify") != std::string::npos);
  CHECK(run({"simulate", "--help"}).code == cli::kOk);
}

TEST_CASE("certify writes a certificate and maps status to the exit code") {
  const auto dir = scratch("certify");
  const auto ok = run({"certify", "--optimizer", "nag", "--gamma", "0.25", "--beta", "1.0", "--out-dir", dir.string()});
  REQUIRE(ok.code == cli::kOk);
  const auto cert = read_json(dir / "certificate.json");
  CHECK(cert["status"] == "feasible");
  CHECK(cert["optimizer"] == "nag");
  for (const char* key : {"gamma", "beta", "P", "lambda", "tau1", "tau2", "lmi_max_eig", "p_min_eig", "solver_seed"})
    CHECK(cert.contains(key));
  CHECK(!cert.contains("rho"));
  CHECK(cert["P"].size() == 2);
  CHECK(cert["lambda"].get<double>() >= 1e-6);
  CHECK(cert["lmi_max_eig"].get<double>() <= -1e-8);

  const auto bad = run({"certify", "--optimizer", "sgd", "--eta", "3.0", "--gamma", "1", "--beta", "1",
                        "--out-dir", dir.string()});
  CHECK(bad.code == cli::kInfeasible);
  CHECK(read_json(dir / "certificate.json")["status"] != "feasible");
}

TEST_CASE("certify --rate reports rho") {
  const auto dir = scratch("rate");
  const auto r = run({"certify", "--optimizer", "sgd", "--gamma", "0.1", "--beta", "1", "--rate", "--rho-hi", "0.5",
                      "--bisect-tol", "1e-3", "--out-dir", dir.string()});
  REQUIRE(r.code == cli::kOk);
  const auto cert = read_json(dir / "certificate.json");
  REQUIRE(cert.contains("rho"));
  CHECK(cert["rho"].get<double>() > 0.08);
  CHECK(cert["rho"].get<double>() <= 0.1 + 1e-9);
}

TEST_CASE("certify is reproducible byte for byte") {
  const auto a = scratch("repro_a");
  const auto b = scratch("repro_b");
  const std::vector<std::string> base{"certify", "--optimizer", "sgd", "--gamma", "0.1", "--beta", "1", "--seed", "3",
                                      "--out-dir"};
  auto args_a = base;
  args_a.push_back(a.string());
  auto args_b = base;
  args_b.push_back(b.string());
  REQUIRE(run(args_a).code == cli::kOk);
  REQUIRE(run(args_b).code == cli::kOk);
  CHECK(slurp(a / "certificate.json") == slurp(b / "certificate.json"));
}

TEST_CASE("lyapunov exit codes and violator naming") {
  const auto dir = scratch("lyapunov");
  const auto one = run({"lyapunov", "--gamma", "1", "--beta", "1", "--out-dir", dir.string()});
  CHECK(one.code == cli::kOk);
  const auto doc = read_json(dir / "lyapunov.json");
  CHECK(doc["best"]["rho"].get<double>() >= 0.98);

  const auto det = run({"lyapunov", "--gamma", "0.5", "--beta", "1", "--eps", "0.001", "--rho", "0.1", "--out-dir",
                        dir.string()});
  CHECK(det.code == cli::kInfeasible);
  CHECK(det.out.find("alpha=0") != std::string::npos);
  CHECK(read_json(dir / "lyapunov.json")["alpha0_margin"].get<double>() > 0.0);

  const auto hundred = run({"lyapunov", "--gamma", "0.01", "--beta", "1", "--out-dir", dir.string()});
  CHECK(hundred.code == cli::kInfeasible);
  CHECK(read_json(dir / "lyapunov.json").contains("closest"));
}

TEST_CASE("bound table scaling and limits") {
  const auto dir = scratch("bound");
  auto bound = [&](const std::string& n, const std::string& T) {
    REQUIRE(run({"bound", "--G", "2", "--gamma", "0.1", "--beta", "1", "--n", n, "--T", T, "--out-dir",
                 dir.string()})
                .code == cli::kOk);
    return read_json(dir / "bounds.json");
  };
  const auto a = bound("100", "50");
  const auto b = bound("200", "50");
  CHECK(b["sgd"]["loss"].get<double>() == doctest::Approx(a["sgd"]["loss"].get<double>() / 2));
  CHECK(b["cjy"]["loss"].get<double>() == doctest::Approx(a["cjy"]["loss"].get<double>() / 2));
  CHECK(b["nag"]["loss"].get<double>() == doctest::Approx(a["nag"]["loss"].get<double>() / std::sqrt(2.0)));

  const auto zero = bound("100", "0");
  CHECK(zero["nag"]["param"].get<double>() == 0.0);
  CHECK(zero["nag"]["loss"].get<double>() == 0.0);

  const double g = 2.0, gamma = 0.1, beta = 1.0, n = 100.0, kappa = beta / gamma;
  CHECK(a["nag"]["loss_limit"].get<double>() ==
        doctest::Approx(4 * g * g * std::pow(kappa, 0.25) / (beta * std::sqrt(n))).epsilon(1e-12));
  CHECK(a["sgd"]["loss_limit"].get<double>() == doctest::Approx(2 * g * g / (gamma * n)).epsilon(1e-12));
  CHECK(a["cjy"]["loss_limit"].get<double>() == doctest::Approx(4 * beta * beta / (gamma * n)).epsilon(1e-12));

  const std::string csv = slurp(dir / "bounds.csv");
  CHECK(csv.rfind("bound,form,at_T,limit\n", 0) == 0);
  CHECK(csv.find('\r') == std::string::npos);
}

TEST_CASE("simulate writes reproducible reports") {
  const auto a = scratch("sim_a");
  const auto b = scratch("sim_b");
  const std::vector<std::string> base{"simulate", "vs-n", "--synthetic", "--sizes", "20,40,80", "--trials", "4",
                                      "--T", "200", "--seed", "7", "--out-dir"};
  auto args_a = base;
  args_a.push_back(a.string());
  auto args_b = base;
  args_b.push_back(b.string());
  const auto r = run(args_a);
  REQUIRE(r.code == cli::kOk);
  REQUIRE(run(args_b).code == cli::kOk);
  CHECK(slurp(a / "report.csv") == slurp(b / "report.csv"));
  CHECK(slurp(a / "summary.json") == slurp(b / "summary.json"));

  const std::string csv = slurp(a / "report.csv");
  CHECK(csv.rfind("config_id,n,T,trial,metric,value\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 3 * 4 * 2);
  const auto summary = read_json(a / "summary.json");
  CHECK(summary["mode"] == "vs-n");
  CHECK(summary["slope"].contains("slope"));
  CHECK(summary["sizes"].size() == 3);
  CHECK(summary["sizes"][0]["theory"].contains("nag"));

  const auto t = run({"simulate", "vs-t", "--sizes", "20,40", "--trials", "3", "--checkpoints", "10,20,40,80",
                      "--out-dir", a.string()});
  REQUIRE(t.code == cli::kOk);
  const auto ts = read_json(a / "summary.json");
  CHECK(ts["mode"] == "vs-t");
  CHECK(ts["checkpoints"].size() == 4);
  CHECK(ts.contains("saturating"));
}

TEST_CASE("simulate reads CSV data and reports data errors with 66") {
  const auto dir = scratch("sim_data");
  const auto pool = synthetic_dataset(60, 3, 2.0, 5);
  CsvWriter csv({"f1", "f2", "f3", "label"});
  for (std::size_t i = 0; i < pool.size(); ++i) {
    const auto r = pool.row(i);
    csv.add_row({format_double(r[0]), format_double(r[1]), format_double(r[2]), pool.labels[i] > 0 ? "1" : "0"});
  }
  write_file(dir / "data.csv", csv.str());
  const auto ok = run({"simulate", "vs-n", "--data", (dir / "data.csv").string(), "--sizes", "10,20,40", "--trials",
                       "3", "--T", "100", "--probes", "8", "--out-dir", dir.string()});
  CHECK(ok.code == cli::kOk);

  const std::string fixtures = STABCERT_FIXTURE_DIR;
  CHECK(run({"simulate", "vs-n", "--data", fixtures + "/malformed.csv", "--out-dir", dir.string()}).code ==
        cli::kDataError);
  CHECK(run({"simulate", "vs-n", "--data", fixtures + "/single_class.csv", "--out-dir", dir.string()}).code ==
        cli::kDataError);
  CHECK(run({"simulate", "vs-n", "--data", (dir / "missing.csv").string()}).code == cli::kDataError);
  CHECK(run({"simulate", "vs-n", "--data", (dir / "data.csv").string(), "--sizes", "10,100", "--out-dir",
             dir.string()})
            .code == cli::kUsage);
}

TEST_CASE("csv quoting") {
  CHECK(csv_field("plain") == "plain");
  CHECK(csv_field("a,b") == "\"a,b\"");
  CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(csv_field("two\nlines") == "\"two\nlines\"");
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(1.0) == "1");
}
