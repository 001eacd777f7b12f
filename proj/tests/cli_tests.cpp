// CLI behavior: error handling, spec'd outputs, cache correctness.

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void check(bool ok, const std::string& what) {
  if (!ok) {
    std::cerr << "[FAIL] " << what << "\n";
    ++g_failures;
  } else {
    std::cout << "[ok] " << what << "\n";
  }
}

struct RunResult {
  int code = 0;
  std::string out;
  std::string err;
};

RunResult run(const std::string& cli, const std::string& args,
              const std::string& env = "") {
  fs::path tmp_out = fs::temp_directory_path() / "sierpoly_cli_out.txt";
  fs::path tmp_err = fs::temp_directory_path() / "sierpoly_cli_err.txt";
  std::string cmd = env + " " + cli + " " + args + " >" + tmp_out.string() + " 2>" +
                    tmp_err.string();
  int code = std::system(cmd.c_str());
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
  };
  return {code, slurp(tmp_out), slurp(tmp_err)};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: cli_tests <path-to-cli>\n";
    return 2;
  }
  const std::string cli = argv[1];

  // invalid r: nonzero exit, single-line diagnostic on stderr
  {
    RunResult r = run(cli, "build --r 8 --k 2");
    check(r.code != 0, "build --r 8 exits nonzero");
    check(r.err.find("multiple of 4") != std::string::npos, "diagnostic names the rule");
    check(std::count(r.err.begin(), r.err.end(), '\n') <= 1, "single-line diagnostic");
  }

  // identified vertices are at distance zero; cycle distances
  {
    RunResult r = run(cli, "dist --r 6 --k 3 004 335");
    check(r.code == 0 && r.out == "0\n", "dist 004 335 = 0");
    r = run(cli, "dist --r 6 --k 1 0 3");
    check(r.code == 0 && r.out == "3\n", "dist 0 3 = 3 on the 6-cycle");
  }

  // engines agree on random pairs at k=6
  {
    std::mt19937_64 rng(99);
    bool agree = true;
    for (int t = 0; t < 3; ++t) {
      std::string u, v;
      for (int i = 0; i < 6; ++i) {
        u.push_back(char('0' + rng() % 6));
        v.push_back(char('0' + rng() % 6));
      }
      RunResult a = run(cli, "dist --r 6 --k 6 " + u + " " + v + " --engine hier");
      RunResult b = run(cli, "dist --r 6 --k 6 " + u + " " + v + " --engine bfs");
      agree = agree && a.code == 0 && b.code == 0 && a.out == b.out;
    }
    check(agree, "bfs and hier engines agree at k=6");
  }

  // build exports
  {
    RunResult r = run(cli, "build --r 6 --k 3 --format dot");
    check(r.code == 0 && r.out.find("\"004\"") != std::string::npos, "dot export mentions 004");
    std::size_t nodes = 0;
    for (std::size_t pos = 0; (pos = r.out.find(";\n", pos)) != std::string::npos; ++pos)
      ++nodes;
    RunResult r1 = run(cli, "build --r 6 --k 1 --format edgelist");
    check(r1.out == "0 1\n0 5\n1 2\n2 3\n3 4\n4 5\n", "k=1 edge list is the 6-cycle");
  }

  // gh: radius 0 stabilizes at level 1; the fig sequence has a finite level
  {
    RunResult r0 = run(cli, "gh --r 6 --xi \"1(54)*\" --radius 0");
    check(r0.code == 0 && r0.out.find("\"level\": 1") != std::string::npos,
          "gh radius 0 -> level 1");
    RunResult r5 = run(cli, "gh --r 6 --xi \"1(54)*\" --radius 5");
    check(r5.code == 0 && r5.out.find("\"level\"") != std::string::npos,
          "gh radius 5 reports a level");
  }

  // iso verdicts
  {
    RunResult r = run(cli, "iso --r 6 --xi \"4*\" --eta \"13(4)*\" --max-radius 2");
    check(r.code == 0 && r.out.find("\"found\": true") != std::string::npos,
          "cofinal pair: algebraic yes");
    r = run(cli, "iso --r 6 --xi \"4*\" --eta \"5*\" --max-radius 2");
    check(r.code == 0 && r.out.find("\"found\": true") != std::string::npos,
          "rotated pair: algebraic yes");
    check(r.out.find("\"shift\": 1") != std::string::npos, "sigma reported");
    r = run(cli, "iso --r 6 --xi \"4*\" --eta \"(45)*\" --max-radius 3");
    check(r.code == 0 && r.out.find("\"found\": false") != std::string::npos,
          "4* vs (45)*: no sigma");
  }

  // equivariance carries the r=5 reflection finding
  {
    RunResult r = run(cli, "equivariance --r 5 --k 2");
    check(r.code == 0 && r.out.find("\"preservesClasses\": false") != std::string::npos,
          "r=5 reflection failure reported");
    check(r.out.find("\"reflect\": true") != std::string::npos, "reflections listed");
  }

  // malformed sequence: parse error with position
  {
    RunResult r = run(cli, "census --r 6 --xi \"4((\" --m-max 3");
    check(r.code != 0 && r.err.find("position") != std::string::npos,
          "malformed xi reports a parse error with position");
  }

  // cache: fresh and cached runs byte-identical over randomized configs
  {
    fs::path dir = fs::temp_directory_path() / "sierpoly_cache_test";
    fs::remove_all(dir);
    std::string env = "SIERPOLY_CACHE=" + dir.string();
    std::mt19937_64 rng(2025);
    bool ok = true;
    for (int t = 0; t < 20; ++t) {
      std::ostringstream cmd;
      switch (t % 3) {
        case 0:
          cmd << "ball --r 6 --k " << (2 + int(rng() % 3)) << " --center "
              << std::string(1, char('0' + rng() % 6)) << std::string(1, char('0' + rng() % 6))
              << " --radius " << (1 + int(rng() % 2));
          break;
        case 1:
          cmd << "gh --r 6 --xi \"" << (rng() % 2 ? "4*" : "1(54)*") << "\" --radius "
              << int(rng() % 4);
          break;
        default:
          cmd << "iso --r 6 --xi \"4*\" --eta \"" << (rng() % 2 ? "13(4)*" : "5*")
              << "\" --max-radius " << (1 + int(rng() % 2));
      }
      std::string c = cmd.str();
      // pad k for ball centers of length 2
      if (c.rfind("ball", 0) == 0) {
        std::size_t kpos = c.find("--k ") + 4;
        c[kpos] = '2';
      }
      RunResult fresh = run(cli, c, env);
      RunResult cached = run(cli, c, env);
      ok = ok && fresh.code == 0 && cached.code == 0 && fresh.out == cached.out;
    }
    check(ok, "20 randomized configs: cached and fresh outputs byte-identical");
    check(fs::exists(dir) && !fs::is_empty(dir), "cache directory populated");
    RunResult clear = run(cli, "cache-clear", env);
    check(clear.code == 0, "cache-clear succeeds");
    bool empty_now = true;
    if (fs::exists(dir))
      for (const auto& e : fs::directory_iterator(dir))
        empty_now = empty_now && e.path().extension() != ".json";
    check(empty_now, "cache-clear removed the entries");
    fs::remove_all(dir);
  }

  if (g_failures) {
    std::cerr << g_failures << " CLI check(s) failed\n";
    return 1;
  }
  std::cout << "all CLI checks passed\n";
  return 0;
}
