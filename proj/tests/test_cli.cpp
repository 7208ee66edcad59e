#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path kWork = fs::path(EXOTEST_TEST_DIR) / "cli";

int run(const std::string& args) {
  fs::create_directories(kWork);
  const std::string cmd = "cd '" + kWork.string() + "' && '" EXOTEST_CLI_PATH "' " + args +
                          " 2>>'" + (kWork / "stderr.log").string() + "'";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(kWork / p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void spit(const fs::path& p, const std::string& text) {
  fs::create_directories(kWork);
  std::ofstream(kWork / p, std::ios::binary) << text;
}

std::size_t lines(const std::string& s) { return std::count(s.begin(), s.end(), '\n'); }

}  // namespace

TEST_CASE("simulate is reproducible and --latent adds a column") {
  REQUIRE(run("simulate --n 5 --seed 3 --output a.csv") == 0);
  REQUIRE(run("simulate --n 5 --seed 3 --output b.csv") == 0);
  CHECK(slurp("a.csv") == slurp("b.csv"));
  CHECK(lines(slurp("a.csv")) == 6);
  REQUIRE(run("simulate --n 5 --seed 3 --latent --output c.csv") == 0);
  CHECK(slurp("c.csv").starts_with("y,delta,x,w,z,u_t\n"));
  REQUIRE(run("simulate --n 5 --seed 4 --output d.csv") == 0);
  CHECK(slurp("a.csv") != slurp("d.csv"));
}

TEST_CASE("EXOTEST_SEED is used unless --seed is given") {
  REQUIRE(run("simulate --n 20 --seed 77 --output s77.csv") == 0);
  REQUIRE(run("simulate --n 20 --output s42.csv") == 0);
  REQUIRE(std::system(("cd '" + kWork.string() + "' && EXOTEST_SEED=77 '" EXOTEST_CLI_PATH
                       "' simulate --n 20 --output env.csv")
                          .c_str()) == 0);
  REQUIRE(std::system(("cd '" + kWork.string() + "' && EXOTEST_SEED=77 '" EXOTEST_CLI_PATH
                       "' simulate --n 20 --seed 42 --output env42.csv")
                          .c_str()) == 0);
  CHECK(slurp("env.csv") == slurp("s77.csv"));
  CHECK(slurp("env42.csv") == slurp("s42.csv"));
}

TEST_CASE("describe writes the cell table and curves") {
  spit("four.csv", "y,delta,x,w,z\n1,1,0,0,0\n2,0,0,0,0\n3,1,0,0,0\n4,1,0,0,0\n");
  REQUIRE(run("describe --input four.csv --output cells.csv --logrank lr.csv") == 0);
  CHECK(slurp("cells.csv") == "x,w,z,count,censoring_rate\n0,0,0,4,0.25\n");
  CHECK(slurp("cells.curves.csv").starts_with("x,w,z,t,cdf,at_risk,events\n0,*,0,1,0.25,4,1\n"));
  CHECK(slurp("lr.csv") == "stratum,chi_square,df,p_value\n");
  CHECK(slurp("four.csv") == "y,delta,x,w,z\n1,1,0,0,0\n2,0,0,0,0\n3,1,0,0,0\n4,1,0,0,0\n");
}

TEST_CASE("describe on a JTPA-sized simulated file lists eight cells") {
  REQUIRE(run("simulate --n 1127 --output sim.csv") == 0);
  REQUIRE(run("describe --input sim.csv --output sim_cells.csv --curves sim_curves.csv") == 0);
  CHECK(lines(slurp("sim_cells.csv")) == 9);
}

TEST_CASE("usage and parse errors exit with 2") {
  spit("empty.csv", "");
  spit("bad.csv", "y,delta,x,w,z\n1,1,0,0,0\n1,7,0,0,0\n");
  CHECK(run("describe --input empty.csv") == 2);
  CHECK(run("describe --input bad.csv") == 2);
  CHECK(run("describe --input missing.csv") == 2);
  CHECK(run("test --input bad.csv") == 2);
  CHECK(run("test --input four.csv --statistic xy") == 2);
  CHECK(run("test --input four.csv --boot c") == 2);
  CHECK(run("test --input four.csv --reps 0") == 2);
  CHECK(run("test --input four.csv --weights heavy") == 2);
  CHECK(run("power --alpha 0,,2 --mc 10") == 2);
  CHECK(run("power --alpha 0,x --mc 10") == 2);
  CHECK(run("power --n 0 --mc 10") == 2);
  CHECK(run("simulate --n 10,20") == 2);
  CHECK(run("frobnicate") == 2);
  CHECK(run("") == 2);
  std::ifstream log(kWork / "stderr.log");
  std::stringstream all;
  all << log.rdbuf();
  CHECK(all.str().find("line 3") != std::string::npos);
}

TEST_CASE("degenerate data exits with 3") {
  spit("degen.csv", "y,delta,x,w,z\n1,1,0,0,0\n2,0,1,0,1\n3,0,1,1,1\n");
  CHECK(run("test --input degen.csv --reps 10") == 3);
}

TEST_CASE("test report on single-cell data") {
  spit("four.csv", "y,delta,x,w,z\n1,1,0,0,0\n2,0,0,0,0\n3,1,0,0,0\n4,1,0,0,0\n");
  REQUIRE(run("test --input four.csv --reps 10 --output single.json") == 0);
  const auto j = nlohmann::json::parse(slurp("single.json"));
  CHECK(j["t_obs"] == 0.0);
  CHECK(j["p_value"] == 0.0);
  CHECK(j["B"] == 10);
  CHECK(j["t_star"].size() == 10);
}

TEST_CASE("outputs are identical across runs and thread counts") {
  REQUIRE(run("simulate --n 400 --seed 9 --output null.csv") == 0);
  for (const std::string flags : {"--statistic ks --boot a", "--statistic cm --boot b"}) {
    REQUIRE(run("test --input null.csv --reps 50 " + flags + " --threads 1 --output t1.json") == 0);
    REQUIRE(run("test --input null.csv --reps 50 " + flags + " --threads 3 --output t3.json") == 0);
    REQUIRE(run("test --input null.csv --reps 50 " + flags + " --threads 1 --output t1b.json") == 0);
    CHECK(slurp("t1.json") == slurp("t3.json"));
    CHECK(slurp("t1.json") == slurp("t1b.json"));
  }
  REQUIRE(run("test --input null.csv --reps 30 --no-t-star --output nt.json") == 0);
  CHECK_FALSE(nlohmann::json::parse(slurp("nt.json")).contains("t_star"));

  const std::string power = "power --n 150 --alpha 0,2 --mc 30 --replicates ";
  REQUIRE(run(power + "r1.csv --threads 1 --output p1.csv") == 0);
  REQUIRE(run(power + "r3.csv --threads 3 --output p3.csv") == 0);
  CHECK(slurp("p1.csv") == slurp("p3.csv"));
  CHECK(slurp("r1.csv") == slurp("r3.csv"));
  CHECK(lines(slurp("p1.csv")) == 1 + 2 * 4);

  REQUIRE(run("plot-data --input null.csv --output s1.csv --ranks rk.csv") == 0);
  REQUIRE(run("plot-data --input null.csv --output s2.csv") == 0);
  CHECK(slurp("s1.csv") == slurp("s2.csv"));
  CHECK(slurp("s1.csv").starts_with("v,x,w,d_hat\n"));
  CHECK(lines(slurp("rk.csv")) == 401);
}

TEST_CASE("power grid is the cartesian product and accepts negative lists") {
  REQUIRE(run("power --n 100 --lambda=-5.7,-4.6 --eta 1.4,2.4 --statistic cm --boot a --mc 20 "
              "--output grid.csv") == 0);
  CHECK(lines(slurp("grid.csv")) == 1 + 4);
}
