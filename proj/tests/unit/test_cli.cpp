#include <doctest.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(SYMLAND_CLI) + " " + args + " 2>/dev/null";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
  const int st = pclose(p);
  r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("verify exit codes") {
  CHECK(run("verify C0 C1 C4 C5 CI --d 3..8").code == 0);
  const Run c3 = run("verify C3 --d 8,16,32");
  CHECK(c3.code == 0);
  CHECK(c3.out.find("AsymptoticConsistent") != std::string::npos);
  CHECK(run("verify BogusName --d 3").code == 2);
  CHECK(run("verify C0 --d 5..3").code == 2);
  CHECK(run("verify C0 --d 3 --format xml").code == 2);
  CHECK(run("frobnicate").code == 2);
}

TEST_CASE("spectrum verdicts") {
  const Run c4 = run("spectrum C4 --d 4..8");
  CHECK(c4.code == 0);
  CHECK(c4.out.find("\"ExactMatch\"") != std::string::npos);
  const Run c2 = run("spectrum C2 --d 8,16,32");
  CHECK(c2.code == 0);
  CHECK(c2.out.find("\"AsymptoticConsistent\"") != std::string::npos);
}

TEST_CASE("puiseux golden file") {
  const Run r = run("puiseux --pattern DiagSd1 --kernel frobenius --depth 4");
  CHECK(r.code == 0);
  CHECK(r.out == slurp(std::string(GOLDEN_DIR) + "/puiseux_diagsd1_frobenius_depth4.json"));
  const Run g = run("puiseux --pattern DiagSd --kernel gauss --format csv");
  CHECK(g.code == 0);
}

TEST_CASE("radial verdicts") {
  const Run c5 = run("radial C5 --d 4 --restarts 8");
  CHECK(c5.code == 0);
  CHECK(c5.out.find("\"SaddleCertified\"") != std::string::npos);
  CHECK(c5.out.find("\"order\": 3") != std::string::npos);
  const Run c0 = run("radial C0 --d 3 --restarts 8");
  CHECK(c0.out.find("\"SaddleCertified\"") != std::string::npos);
  const Run ci = run("radial CI --d 4 --restarts 8");
  CHECK(ci.code == 0);
  CHECK(ci.out.find("\"NotASaddle\"") != std::string::npos);
}

TEST_CASE("config file, flag override and --out") {
  const std::string cfg = std::string(TEST_TMP_DIR) + "/cli_test.cfg";
  const std::string out = std::string(TEST_TMP_DIR) + "/cli_test_out.csv";
  {
    std::ofstream f(cfg);
    f << "families = C4\nd = 3..4\nformat = json\n";
  }
  const Run r = run("verify --config " + cfg + " --format csv --out " + out);
  CHECK(r.code == 0);
  CHECK(r.out.empty());
  CHECK(slurp(out).rfind("family,d,loss", 0) == 0);
}

TEST_CASE("identical runs give identical bytes") {
  const std::string args = "sphere-min C0 --d 3 --r 0.05,0.1 --restarts 4 --seed 3";
  CHECK(run(args).out == run(args).out);
}
