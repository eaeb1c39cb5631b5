#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#ifndef BCREG_CLI_PATH
#define BCREG_CLI_PATH "bcreg"
#endif

namespace {

namespace fs = std::filesystem;

std::string temp_path(const std::string& name) {
  return (fs::temp_directory_path() / name).string();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(BCREG_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempFile {
  std::string path;
  explicit TempFile(std::string p) : path(std::move(p)) {}
  ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("cli gen is deterministic per seed") {
  TempFile a(temp_path("bcreg_cli_gen_a.xyz"));
  TempFile b(temp_path("bcreg_cli_gen_b.xyz"));
  REQUIRE(run_cli("gen box 256 " + a.path + " --seed 7") == 0);
  REQUIRE(run_cli("gen box 256 " + b.path + " --seed 7") == 0);
  CHECK(slurp(a.path) == slurp(b.path));
  CHECK_FALSE(slurp(a.path).empty());

  TempFile c(temp_path("bcreg_cli_gen_c.xyz"));
  REQUIRE(run_cli("gen box 256 " + c.path + " --seed 8") == 0);
  CHECK(slurp(a.path) != slurp(c.path));
}

TEST_CASE("cli register of a cloud onto itself is near-identity") {
  TempFile cloud(temp_path("bcreg_cli_self.xyz"));
  TempFile out(temp_path("bcreg_cli_self.json"));
  REQUIRE(run_cli("gen surface 400 " + cloud.path + " --seed 3") == 0);
  REQUIRE(run_cli("register " + cloud.path + " " + cloud.path +
                  " --backend handcrafted --out " + out.path) == 0);
  const std::string json = slurp(out.path);
  CHECK(json.find("\"rotation\"") != std::string::npos);
  CHECK(json.find("\"confidences\"") != std::string::npos);
  CHECK(json.find("\"low_confidence\": false") != std::string::npos);
}

TEST_CASE("cli register output is byte-identical across runs") {
  TempFile cloud(temp_path("bcreg_cli_det.xyz"));
  TempFile out1(temp_path("bcreg_cli_det1.json"));
  TempFile out2(temp_path("bcreg_cli_det2.json"));
  REQUIRE(run_cli("gen lshape 300 " + cloud.path + " --seed 5") == 0);
  REQUIRE(run_cli("register " + cloud.path + " " + cloud.path +
                  " --backend oracle --seed 11 --out " + out1.path) == 0);
  REQUIRE(run_cli("register " + cloud.path + " " + cloud.path +
                  " --backend oracle --seed 11 --out " + out2.path) == 0);
  CHECK(slurp(out1.path) == slurp(out2.path));
}

TEST_CASE("cli rejects unknown flags with exit 1") {
  CHECK(run_cli("register a.xyz b.xyz --frobnicate") == 1);
  CHECK(run_cli("definitely-not-a-subcommand") == 1);
  CHECK(run_cli("") == 1);
}

TEST_CASE("cli bench writes a csv with |levels| x |methods| rows") {
  TempFile cfg(temp_path("bcreg_cli_bench_cfg.json"));
  TempFile csv(temp_path("bcreg_cli_bench.csv"));
  TempFile json(temp_path("bcreg_cli_bench.json"));
  {
    std::ofstream out(cfg.path);
    out << "{\"levels\": [45, -45], \"trials_per_level\": 1, \"base_points\": 500,\n"
           "  \"subset_points\": 400, \"input_size\": 200, \"mid_size\": 200,\n"
           "  \"match_size\": 100, \"k\": 50, \"seed\": 4}\n";
  }
  REQUIRE(run_cli("bench --config " + cfg.path + " --out " + csv.path + " --json " + json.path +
                  " --backend oracle") == 0);
  const std::string text = slurp(csv.path);
  int lines = 0;
  for (char ch : text) {
    if (ch == '\n') ++lines;
  }
  CHECK(lines == 1 + 2 * 2);  // header + 2 levels x {coarse, refined}
  CHECK(slurp(json.path).find("\"rows\"") != std::string::npos);
}

TEST_CASE("cli bench is byte-identical across runs with one seed") {
  TempFile csv1(temp_path("bcreg_cli_bench_d1.csv"));
  TempFile csv2(temp_path("bcreg_cli_bench_d2.csv"));
  TempFile cfg(temp_path("bcreg_cli_bench_dcfg.json"));
  {
    std::ofstream out(cfg.path);
    out << "{\"levels\": [90], \"trials_per_level\": 2, \"base_points\": 500,\n"
           "  \"subset_points\": 400, \"input_size\": 200, \"mid_size\": 200,\n"
           "  \"match_size\": 100, \"k\": 50, \"seed\": 12}\n";
  }
  REQUIRE(run_cli("bench --config " + cfg.path + " --out " + csv1.path) == 0);
  REQUIRE(run_cli("bench --config " + cfg.path + " --out " + csv2.path) == 0);
  const std::string a = slurp(csv1.path);
  CHECK(a == slurp(csv2.path));
  CHECK(a.find("level,method,mean_RE") == 0);
}

TEST_CASE("cli icp runs and reports iterations") {
  TempFile cloud(temp_path("bcreg_cli_icp.xyz"));
  TempFile out(temp_path("bcreg_cli_icp.json"));
  REQUIRE(run_cli("gen lshape 200 " + cloud.path + " --seed 9") == 0);
  REQUIRE(run_cli("icp " + cloud.path + " " + cloud.path + " --out " + out.path) == 0);
  const std::string json = slurp(out.path);
  CHECK(json.find("\"iterations\"") != std::string::npos);
}

TEST_CASE("cli register exits 2 on degenerate geometry") {
  TempFile cloud(temp_path("bcreg_cli_line.xyz"));
  {
    std::ofstream out(cloud.path);
    for (int i = 0; i < 8; ++i) out << 0.25 * i << " 0 0\n";
  }
  CHECK(run_cli("register " + cloud.path + " " + cloud.path + " --backend oracle") == 2);
}

TEST_CASE("cli register accepts precomputed feature files and dumps consensus") {
  TempFile cloud(temp_path("bcreg_cli_pre.xyz"));
  TempFile feats(temp_path("bcreg_cli_pre.feats"));
  TempFile out(temp_path("bcreg_cli_pre.json"));
  TempFile dump(temp_path("bcreg_cli_pre_consensus.csv"));
  REQUIRE(run_cli("gen box 128 " + cloud.path + " --seed 6") == 0);
  {
    // unit-norm one-hot-ish features, one row per point
    std::ofstream f(feats.path);
    f << "D 4 N 128\n";
    for (int i = 0; i < 128; ++i) {
      f << ((i % 4) == 0) << " " << ((i % 4) == 1) << " " << ((i % 4) == 2) << " "
        << ((i % 4) == 3) << "\n";
    }
  }
  REQUIRE(run_cli("register " + cloud.path + " " + cloud.path + " --backend file:" + feats.path +
                  "," + feats.path + " --k 16 --no-refine --out " + out.path +
                  " --dump-consensus " + dump.path) == 0);
  CHECK(slurp(out.path).find("\"rotation\"") != std::string::npos);
  int commas = 0;
  const std::string first_line = slurp(dump.path).substr(0, slurp(dump.path).find('\n'));
  for (char ch : first_line) {
    if (ch == ',') ++commas;
  }
  CHECK(commas == 127);  // 128 columns, row-major CSV
}

TEST_CASE("cli register with ground truth reports errors") {
  TempFile cloud(temp_path("bcreg_cli_gt.xyz"));
  TempFile gt(temp_path("bcreg_cli_gt.json"));
  TempFile out(temp_path("bcreg_cli_gt_out.json"));
  REQUIRE(run_cli("gen box 300 " + cloud.path + " --seed 2") == 0);
  {
    std::ofstream g(gt.path);
    g << "{\"rotation\": [1,0,0, 0,1,0, 0,0,1], \"translation\": [0,0,0]}\n";
  }
  REQUIRE(run_cli("register " + cloud.path + " " + cloud.path + " --backend oracle --gt " +
                  gt.path + " --out " + out.path) == 0);
  const std::string json = slurp(out.path);
  CHECK(json.find("\"re_deg\"") != std::string::npos);
  CHECK(json.find("\"te\"") != std::string::npos);
}
