#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

namespace {

std::string g_binary;

struct RunResult {
  int exit_code = -1;
  std::string output;
};

RunResult run(const std::string& args) {
  RunResult r;
  std::string cmd = g_binary + " " + args + " 2>&1";
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  std::array<char, 512> buf;
  while (fgets(buf.data(), buf.size(), p)) r.output += buf.data();
  int status = pclose(p);
  r.exit_code = WEXITSTATUS(status);
  return r;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

TEST_CASE("canon command examples and exit codes") {
  RunResult r1 = run("canon \"R[j,i,k,l]*R[i,j,k,l]\" --out /tmp/invar_cli_test");
  CHECK(r1.exit_code == 0);
  CHECK(r1.output == "-1 * R[i,j,k,l]*R[i,j,k,l]\n");

  RunResult r2 = run("canon \"P[a,a]*P[b,b] - P[a,a]*P[b,b]\" --out /tmp/invar_cli_test");
  CHECK(r2.exit_code == 0);
  CHECK(r2.output == "0\n");

  RunResult r3 = run("canon \"g[a,b]*gi[a,b]\" --n 4 --out /tmp/invar_cli_test");
  CHECK(r3.exit_code == 0);
  CHECK(r3.output == "4\n");

  RunResult bad = run("canon \"R[i,j\" --out /tmp/invar_cli_test");
  CHECK(bad.exit_code == 2);

  RunResult arity = run("canon \"Ric[a,b,c]*Ric[a,b,c]\" --out /tmp/invar_cli_test");
  CHECK(arity.exit_code == 2);  // caught at parse time as an arity error
}

TEST_CASE("vary command: top order and weight guard") {
  RunResult r = run("vary \"P[a,a]*P[b,b]\" --order 2 --n 4 --out /tmp/invar_cli_test");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("phi[i,i]*phi[j,j]") != std::string::npos);

  RunResult w = run("vary \"W[i,j,k,l]*W[i,j,k,l]\" --order 1 --n 4 --out /tmp/invar_cli_test");
  CHECK(w.exit_code == 0);
  CHECK(w.output == "0\n");

  RunResult bad = run("vary \"Scal\" --order 1 --n 4 --out /tmp/invar_cli_test");
  CHECK(bad.exit_code == 3);
}

TEST_CASE("identical RunConfig gives byte-identical reports") {
  namespace fs = std::filesystem;
  fs::path dir1 = "/tmp/invar_cli_rep1";
  fs::path dir2 = "/tmp/invar_cli_rep2";
  fs::remove_all(dir1);
  fs::remove_all(dir2);
  std::string args =
      "kernel --n 4 --b-min 1 --seed 7 --grid 8 --trials 6 --tol 1e-3 --out ";
  RunResult a = run(args + dir1.string());
  RunResult b = run(args + dir2.string());
  auto strip_path = [](std::string s) {
    auto pos = s.find("report: ");
    return pos == std::string::npos ? s : s.substr(0, pos);
  };
  CHECK(strip_path(a.output) == strip_path(b.output));
  // exactly one report each, byte-identical
  std::string fa, fb;
  for (auto& e : fs::directory_iterator(dir1)) fa = e.path().string();
  for (auto& e : fs::directory_iterator(dir2)) fb = e.path().string();
  REQUIRE(!fa.empty());
  REQUIRE(!fb.empty());
  CHECK(slurp(fa) == slurp(fb));
  CHECK(fs::path(fa).filename() == fs::path(fb).filename());
}

TEST_CASE("refusal path: enumeration beyond the budget") {
  RunResult r = run("kernel --n 8 --out /tmp/invar_cli_test");
  CHECK(r.exit_code == 3);
  CHECK(r.output.find("refused") != std::string::npos);
}

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: cli_test <path-to-invar-binary>\n");
    return 1;
  }
  g_binary = argv[1];
  doctest::Context ctx;
  return ctx.run();
}
