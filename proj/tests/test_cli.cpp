#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <sys/wait.h>
#include <fstream>
#include <sstream>
#include <string>

#ifndef BTQ_CLI_PATH
#define BTQ_CLI_PATH "btq"
#endif

namespace {

struct RunResult {
  int exit_code;
  std::string output;
};

RunResult run_cli(const std::string& args) {
  std::string cmd = std::string(BTQ_CLI_PATH) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  char buf[512];
  while (fgets(buf, sizeof(buf), pipe)) out += buf;
  int status = pclose(pipe);
  int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return {code, out};
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream(path) << text;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

} // namespace

TEST_CASE("list prints the catalog with stable content") {
  RunResult r = run_cli("list");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("models (4)") != std::string::npos);
  CHECK(r.output.find("experiments (9)") != std::string::npos);
  CHECK(r.output.find("degenerate_quartic") != std::string::npos);
  CHECK(r.output.find("x3  =  (1-|z|^2)/(1+|z|^2)") != std::string::npos);
}

TEST_CASE("a minimal expansion config runs to a passing report") {
  write_file("/tmp/btq_cli_min.json",
             R"({"experiment":"expansion","model":{"kind":"cp1_fs"},"symbols":{"f":"1"},"k_ladder":[8,12,16]})");
  RunResult r = run_cli("run /tmp/btq_cli_min.json --output /tmp/btq_cli_out");
  CHECK(r.exit_code == 0);
  std::string report = read_file("/tmp/btq_cli_out/report.json");
  CHECK(report.find("\"pass\": true") != std::string::npos);
  // fitted c0 ~ 1/2pi = 0.159154943...
  CHECK(report.find("0.15915494") != std::string::npos);
  std::string csv = read_file("/tmp/btq_cli_out/report.csv");
  CHECK(csv.rfind("k,value\n", 0) == 0);
}

TEST_CASE("unknown model names are rejected naming the key") {
  write_file("/tmp/btq_cli_bad.json", R"({"experiment":"expansion","model":{"kind":"cp2"}})");
  RunResult r = run_cli("run /tmp/btq_cli_bad.json");
  CHECK(r.exit_code == 1);
  CHECK(r.output.find("model") != std::string::npos);
  CHECK(r.output.find("cp2") != std::string::npos);
}

TEST_CASE("unknown keys are rejected by name") {
  write_file("/tmp/btq_cli_key.json", R"({"experiment":"expansion","laddder":[8]})");
  RunResult r = run_cli("run /tmp/btq_cli_key.json");
  CHECK(r.exit_code == 1);
  CHECK(r.output.find("laddder") != std::string::npos);
}

TEST_CASE("a forced threshold failure exits with code 2 and still writes the report") {
  // a six-node radial rule cannot integrate the k=16..48 Gram monomials, so the
  // fitted leading coefficient misses its 1e-3 tolerance while the run completes
  write_file("/tmp/btq_cli_fail.json",
             R"({"experiment":"expansion","model":{"kind":"cp1_fs"},"symbols":{"f":"1"},)"
             R"("k_ladder":[16,24,32,48],"quadrature":{"radial":6,"angular":100}})");
  RunResult r = run_cli("run /tmp/btq_cli_fail.json --output /tmp/btq_cli_fail_out");
  CHECK(r.exit_code == 2);
  std::string report = read_file("/tmp/btq_cli_fail_out/report.json");
  CHECK(report.find("\"pass\": false") != std::string::npos);
}

TEST_CASE("an aliasing-level quadrature override is a configuration-grade error") {
  write_file("/tmp/btq_cli_alias.json",
             R"({"experiment":"decay","model":{"kind":"cp1_fs"},"symbols":{"f":"1"},"k_ladder":[16,24],)"
             R"("quadrature":{"radial":8,"angular":40}})");
  RunResult r = run_cli("run /tmp/btq_cli_alias.json");
  CHECK(r.exit_code == 1);
  CHECK(r.output.find("aliasing") != std::string::npos);
}

TEST_CASE("identical configs produce byte-identical reports") {
  write_file("/tmp/btq_cli_det.json",
             R"({"experiment":"weyl","model":{"kind":"cp1_fs"},"symbols":{"f":"x3*x3"},"k_ladder":[8,12]})");
  RunResult a = run_cli("run /tmp/btq_cli_det.json --output /tmp/btq_det_a --seed 9");
  RunResult b = run_cli("run /tmp/btq_cli_det.json --output /tmp/btq_det_b --seed 9");
  CHECK(a.exit_code == 0);
  CHECK(b.exit_code == 0);
  CHECK(read_file("/tmp/btq_det_a/report.json") == read_file("/tmp/btq_det_b/report.json"));
  // and across thread counts (ordered reductions make the pool invisible)
  RunResult c = run_cli("run /tmp/btq_cli_det.json --output /tmp/btq_det_c --seed 9 --threads 2");
  CHECK(read_file("/tmp/btq_det_a/report.json") == read_file("/tmp/btq_det_c/report.json"));
}
