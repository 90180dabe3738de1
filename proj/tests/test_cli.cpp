#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <string>

#include "cubetest/text_io.hpp"
#include "doctest.h"

namespace {

namespace fs = std::filesystem;

struct RunResult {
  int code = -1;
  std::string out;
};

// Runs the CLI with `args`, capturing stdout; stderr is discarded.
RunResult run(const std::string& args) {
  const std::string command = std::string(CUBETEST_CLI_PATH) + " " + args + " 2>/dev/null";
  RunResult result;
  FILE* pipe = popen(command.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buffer[4096];
  std::size_t got = 0;
  while ((got = fread(buffer, 1, sizeof(buffer), pipe)) > 0) result.out.append(buffer, got);
  const int status = pclose(pipe);
  result.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

std::string scratch(const std::string& name, const std::string& contents) {
  fs::create_directories(CUBETEST_SCRATCH_DIR);
  const auto path = (fs::path(CUBETEST_SCRATCH_DIR) / name).string();
  cubetest::write_text_file(path, contents);
  return path;
}

std::string scratch_path(const std::string& name) {
  fs::create_directories(CUBETEST_SCRATCH_DIR);
  return (fs::path(CUBETEST_SCRATCH_DIR) / name).string();
}

double value_after(const std::string& text, const std::string& key) {
  const auto at = text.find(key + " ");
  REQUIRE(at != std::string::npos);
  const auto end = text.find('\n', at);
  return cubetest::parse_double(text.substr(at + key.size() + 1, end - at - key.size() - 1));
}

}  // namespace

TEST_CASE("gen writes the table of an additive spec") {
  const auto spec = scratch("additive.spec", "class additive\nweights 0.5 0.5\n");
  const auto r = run("gen " + spec);
  CHECK(r.code == 0);
  CHECK(r.out.find("dim 2\n00 0\n01 0.5\n10 0.5\n11 1\n") != std::string::npos);
  CHECK(r.out.find("# class additive\n") != std::string::npos);
}

TEST_CASE("gen is byte-identical across runs and honours --seed for random specs") {
  const auto spec = scratch("random.spec", "class coverage\nn 5\nseed 3\nrandom\n");
  const auto a = scratch_path("a.table");
  const auto b = scratch_path("b.table");
  CHECK(run("gen " + spec + " --out " + a).code == 0);
  CHECK(run("gen " + spec + " --out " + b).code == 0);
  CHECK(cubetest::read_text_file(a) == cubetest::read_text_file(b));
  const auto reseeded = run("gen " + spec + " --seed 4");
  CHECK(reseeded.code == 0);
  CHECK(reseeded.out != cubetest::read_text_file(a));
}

TEST_CASE("malformed input exits with code 2") {
  CHECK(run("gen " + scratch("bad.spec", "class additive\nweights 0.5 x\n")).code == 2);
  CHECK(run("gen " + scratch_path("does_not_exist.spec")).code == 2);
  CHECK(run("check " + scratch("bad.table", "dim 1\n0 0\n") + " submodular").code == 2);
  CHECK(run("frobnicate").code == 2);
  CHECK(run("").code == 2);
}

TEST_CASE("check reports violations with witnesses") {
  const auto and_table = scratch("and.table", "dim 2\n00 0\n01 0\n10 0\n11 1\n");
  const auto r = run("check " + and_table + " submodular");
  CHECK(r.code == 1);
  CHECK(r.out.find("points 10 01\n") != std::string::npos);
  CHECK(value_after(r.out, "lhs") == 0.0);
  CHECK(value_after(r.out, "rhs") == 1.0);

  const auto cover = scratch("cover.spec", "class coverage\nn 6\nseed 11\nrandom\n");
  const auto table = scratch_path("cover.table");
  REQUIRE(run("gen " + cover + " --out " + table).code == 0);
  CHECK(run("check " + table + " submodular").code == 0);
  CHECK(run("check " + table + " xos").code == 3);
  CHECK(run("check " + table + " coverage").code == 3);
  CHECK(run("check " + table + " gross_substitutes").code == 3);
}

TEST_CASE("influence modes") {
  const auto dict = scratch("dict.table", "dim 2\n00 0\n01 0\n10 1\n11 1\n");
  const auto exact = run("influence " + dict + " {1}");
  CHECK(exact.code == 0);
  CHECK(value_after(exact.out, "influence") == 0.25);

  const auto spec = scratch("xos.spec", "class xos\nn 6\nseed 2\nrandom\n");
  const auto table = scratch_path("xos.table");
  REQUIRE(run("gen " + spec + " --out " + table).code == 0);
  const auto e = run("influence " + table + " 1,4,5 --mode exact");
  const auto f = run("influence " + table + " 1,4,5 --mode fourier");
  CHECK(std::abs(value_after(e.out, "influence") - value_after(f.out, "influence")) <= 1e-9);

  const auto one = run("influence " + dict + " {1} --mode estimate:1:5");
  CHECK(one.code == 0);
  CHECK(value_after(one.out, "queries") == 2.0);
  const auto seeded = run("influence " + dict + " {1} --mode estimate:100 --seed 5");
  CHECK(seeded.out == run("influence " + dict + " {1} --mode estimate:100:5").out);
  CHECK(run("influence " + dict + " {1} --mode guess").code == 2);
  CHECK(run("influence " + dict + " {1} --mode estimate:0:1").code == 2);
}

TEST_CASE("test runs a plan and writes a summary") {
  const auto plan = scratch("plan.txt",
                            "plan v1\nclass submodular\nn 8\nk 2\ntrial_count 6\nseed_base 3\n"
                            "instance far_mode_b\nconfig q 20\nconfig m 50\nconfig num_parts 6\n");
  const auto out = scratch_path("summary.txt");
  CHECK(run("test " + plan + " --out " + out + " --threads 2").code == 0);
  const auto summary = cubetest::read_text_file(out);
  CHECK(summary.rfind("summary v1\n", 0) == 0);
  CHECK(value_after(summary, "accept_rate") == 0.0);
  CHECK(summary.find("trial 5 seed 8\n") != std::string::npos);

  const auto config = scratch("override.cfg", "m 40\n");
  const auto with_config = run("test " + plan + " --config " + config + " --seed 10");
  CHECK(with_config.code == 0);
  CHECK(with_config.out.find("trial 0 seed 10\n") != std::string::npos);
  CHECK(value_after(with_config.out, "expected_queries") != value_after(summary, "expected_queries"));

  const auto xos_plan = scratch("xos_plan.txt", "plan v1\nclass xos\nn 6\ntrial_count 1\n");
  CHECK(run("test " + xos_plan).code == 3);
  const auto huge = scratch("huge_plan.txt", "plan v1\nclass submodular\nn 6\ntrial_count 1\nconfig core_grid 0.001\n");
  CHECK(run("test " + huge).code == 4);
}

TEST_CASE("certify reports the distance decomposition") {
  const auto and_table = scratch("and2.table", "dim 2\n00 0\n01 0\n10 0\n11 1\n");
  const auto r = run("certify " + and_table + " submodular 2 0.25");
  CHECK(r.code == 0);
  CHECK(value_after(r.out, "slack") == 0.125);
  CHECK(value_after(r.out, "certified_distance") ==
        doctest::Approx(std::max(0.0, value_after(r.out, "core_distance") - 0.125)));

  const auto member = scratch("member.table", "dim 2\n00 0\n01 0.5\n10 0.5\n11 0.75\n");
  const auto m = run("certify " + member + " submodular 2 0.25");
  CHECK(value_after(m.out, "certified_distance") <= 0.25);

  std::string parity = "dim 4\n";
  for (int x = 0; x < 16; ++x) {
    std::string bits;
    int ones = 0;
    for (int i = 3; i >= 0; --i) {
      bits += ((x >> i) & 1) ? '1' : '0';
      ones += (x >> i) & 1;
    }
    parity += bits + (ones % 2 ? " 0\n" : " 1\n");
  }
  const auto p = run("certify " + scratch("parity.table", parity) + " submodular 2 0.25");
  CHECK(value_after(p.out, "junta_distance") == doctest::Approx(0.5));

  CHECK(run("certify " + and_table + " submodular 4 0.25").code == 4);
  CHECK(run("certify " + and_table + " xos 2 0.25").code == 3);
}
