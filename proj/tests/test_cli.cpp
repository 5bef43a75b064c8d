#include "latblock/csv.hpp"

#include <doctest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <memory>
#include <string>
#include <sys/wait.h>

namespace {

struct Run {
  int code;
  std::string out;
};

Run cli(const std::string& args) {
  const std::string cmd = std::string(LATBLOCK_CLI_PATH) + " " + args + " 2>&1";
  std::unique_ptr<FILE, int (*)(FILE*)> pipe(popen(cmd.c_str(), "r"), pclose);
  std::string out;
  std::array<char, 4096> buf{};
  while (std::fgets(buf.data(), static_cast<int>(buf.size()), pipe.get())) out += buf.data();
  const int status = pclose(pipe.release());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string tmp(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("latblock_cli_" + name)).string();
}

}  // namespace

TEST_CASE("help and usage errors") {
  CHECK(cli("--help").code == 0);
  CHECK(cli("constants --help").code == 0);
  CHECK(cli("").code == 2);
  CHECK(cli("constants --template square --bogus 1").code == 2);
  CHECK(cli("frobnicate").code == 2);
}

TEST_CASE("constants") {
  const Run r = cli("constants --template hypercube:d=2");
  CHECK(r.code == 0);
  CHECK(r.out.find("K0        0.4444") != std::string::npos);
  CHECK(r.out.find("K1        0.4444") != std::string::npos);
  const Run c = cli("constants --template circle --cov expsep:b1=1,b2=1");
  CHECK(c.code == 0);
  CHECK(c.out.find("B0") != std::string::npos);
  CHECK(c.out.find("tau2") != std::string::npos);
  CHECK(cli("constants --template circle:r=0.9").code == 2);
}

TEST_CASE("simulate, estimate and scale") {
  const std::string field = tmp("field.csv");
  CHECK(cli("simulate --cov expsep:b1=1,b2=1 --template square --scale 14,18 --out " + field).code == 2);
  CHECK_FALSE(std::filesystem::exists(field));
  REQUIRE(cli("simulate --cov expsep:b1=1,b2=1 --template square --scale 14,18 --seed 4 --replicate 2 --out " + field)
              .code == 0);
  const std::string first = latblock::read_text_file(field);
  REQUIRE(cli("simulate --cov expsep:b1=1,b2=1 --template square --scale 14,18 --seed 4 --replicate 2 --out " + field)
              .code == 0);
  CHECK(latblock::read_text_file(field) == first);

  const Run est = cli("estimate --data " + field + " --template square --scheme ol --scale 4 --stat mean");
  CHECK(est.code == 0);
  CHECK(est.out.find("subsamples  165") != std::string::npos);
  const Run inferred = cli("estimate --data " + field + " --template square --delta 14,18 --scale 4");
  CHECK(inferred.code == 0);
  CHECK(inferred.out == est.out);
  CHECK(cli("estimate --data " + field + " --template square --scale 4 --stat ratio").code == 0);
  CHECK(cli("estimate --data " + field + " --template square --scale 4 --stat median").code == 2);
  CHECK(cli("estimate --data /nonexistent/f.csv --template square --scale 4").code == 1);

  const std::string plan = tmp("plan.csv");
  const Run npi = cli("scale --method npi --template square --data " + field + " --c1 0.5 --c2 0.5 --csv " + plan);
  CHECK(npi.code == 0);
  CHECK(npi.out.find("b0_hat") != std::string::npos);
  CHECK(latblock::read_text_file(plan).rfind("key,value\n", 0) == 0);
  CHECK(cli("scale --method hj --template square --data " + field + " --lambda-m 8").code == 0);
  CHECK(cli("scale --method hj --template square --data " + field + " --lambda-m 3").code == 1);
  const Run theory = cli("scale --method theory --template square --delta 14,18 --cov expsep:b1=1,b2=1");
  CHECK(theory.code == 0);
  CHECK(theory.out.find("s_lambda_opt_int  5") != std::string::npos);
  CHECK(cli("scale --method theory --template square --delta 14,18 --b0 1").code == 2);
  std::filesystem::remove(field);
  std::filesystem::remove(plan);
}

TEST_CASE("study") {
  const std::string config = tmp("study.json");
  const std::string mse = tmp("mse.csv");
  const std::string scaling = tmp("scaling.csv");
  latblock::write_text_file(config, R"({
    "regions": [{"template": "square", "delta": [10, 12], "name": "box"}],
    "covariograms": ["expsep:b1=1,b2=1"],
    "s_lambda_grid": [2, 3],
    "replicates": 100,
    "outputs": {"mse_csv": ")" + mse + R"(", "scaling_csv": ")" + scaling + R"("}
  })");
  CHECK(cli("study --config " + config).code == 2);
  REQUIRE(cli("study --config " + config + " --seed 11 --threads 2").code == 0);
  const std::string a = latblock::read_text_file(mse);
  REQUIRE(cli("study --config " + config + " --seed 11 --threads 1").code == 0);
  CHECK(latblock::read_text_file(mse) == a);
  CHECK(latblock::read_text_file(scaling).find("box,\"expsep:b1=1,b2=1\",OL,same,") != std::string::npos);
  CHECK(cli("study --config /nonexistent.json --seed 1").code == 1);
  for (const auto& p : {config, mse, scaling}) std::filesystem::remove(p);
}
