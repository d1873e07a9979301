#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

#ifndef MGCN_CLI_PATH
#error "MGCN_CLI_PATH must point at the mgcn binary"
#endif

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) {
    path = fs::temp_directory_path() / ("mgcn_cli_" + name);
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

int run_cli(const std::string& args) {
  const std::string cmd =
      std::string(MGCN_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream out(p);
  out << content;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string small_spec() {
  return "layers=2\nnodes=30,30\ncommunities=2\np_in=0.4\np_out=0.05\n"
         "q_same=0.3\nq_diff=0.05\nattributes=identity\nseed=5\n";
}

std::size_t count_lines(const std::string& s) {
  std::size_t n = 0;
  for (char c : s)
    if (c == '\n') ++n;
  return n;
}

}  // namespace

TEST_CASE("generate then train then eval round trip") {
  TempDir tmp("flow");
  write_file(tmp.path / "spec.txt", small_spec());
  const std::string data = (tmp.path / "data").string();
  REQUIRE(run_cli("generate " + (tmp.path / "spec.txt").string() + " " + data) ==
          0);
  CHECK(fs::exists(fs::path(data) / "manifest"));
  CHECK(fs::exists(fs::path(data) / "edges_1_1.txt"));
  CHECK(fs::exists(fs::path(data) / "edges_1_2.txt"));
  CHECK(fs::exists(fs::path(data) / "labels_1.txt"));

  const std::string run = (tmp.path / "run").string();
  REQUIRE(run_cli("train " + data + " --out " + run +
                  " --epochs 30 --dim 4 --seed 1") == 0);
  CHECK(fs::exists(fs::path(run) / "manifest.txt"));
  CHECK(fs::exists(fs::path(run) / "embeddings_1.txt"));
  CHECK(fs::exists(fs::path(run) / "embeddings_2.txt"));
  CHECK(fs::exists(fs::path(run) / "scores.txt"));
  const std::string history = slurp(fs::path(run) / "history.txt");
  CHECK(history.rfind("# mgcn-v1 history", 0) == 0);
  CHECK(count_lines(history) == 31);  // header plus one row per epoch

  const std::string evalout = (tmp.path / "eval").string();
  REQUIRE(run_cli("eval " + data + " --out " + evalout +
                  " --ratios 0.2,0.5 --runs 2 --methods mgcn --seed 3"
                  " --config /dev/null") == 0);
  const std::string report = slurp(fs::path(evalout) / "report.txt");
  CHECK(count_lines(report) == 4);  // two header lines plus one row per ratio
  CHECK(report.find("mgcn") != std::string::npos);
}

TEST_CASE("eval covers multiple methods and dimension sweeps") {
  TempDir tmp("methods");
  write_file(tmp.path / "spec.txt", small_spec());
  const std::string data = (tmp.path / "data").string();
  REQUIRE(run_cli("generate " + (tmp.path / "spec.txt").string() + " " + data) ==
          0);
  write_file(tmp.path / "cfg.txt", "epochs=20\nembedding_dim=4\n");

  const std::string m_out = (tmp.path / "m").string();
  REQUIRE(run_cli("eval " + data + " --out " + m_out +
                  " --ratios 0.5 --runs 2 --seed 1 --config " +
                  (tmp.path / "cfg.txt").string() +
                  " --methods mgcn,gcn-no-cross,unsup+logreg") == 0);
  CHECK(count_lines(slurp(fs::path(m_out) / "report.txt")) == 5);

  const std::string d_out = (tmp.path / "d").string();
  REQUIRE(run_cli("eval " + data + " --out " + d_out +
                  " --ratios 0.5 --runs 2 --seed 1 --dims 2,4 --config " +
                  (tmp.path / "cfg.txt").string()) == 0);
  CHECK(count_lines(slurp(fs::path(d_out) / "report.txt")) == 4);

  // a dimension sweep over several ratios is a config error
  CHECK(run_cli("eval " + data + " --out " + d_out +
                " --ratios 0.2,0.5 --runs 1 --dims 2 --config " +
                (tmp.path / "cfg.txt").string()) == 2);
}

TEST_CASE("generate is byte-for-byte deterministic") {
  TempDir tmp("gendet");
  write_file(tmp.path / "spec.txt", small_spec());
  const std::string a = (tmp.path / "a").string();
  const std::string b = (tmp.path / "b").string();
  REQUIRE(run_cli("generate " + (tmp.path / "spec.txt").string() + " " + a) ==
          0);
  REQUIRE(run_cli("generate " + (tmp.path / "spec.txt").string() + " " + b) ==
          0);
  for (const auto& entry : fs::directory_iterator(a)) {
    const auto name = entry.path().filename();
    CHECK(slurp(entry.path()) == slurp(fs::path(b) / name));
  }
}

TEST_CASE("train is byte-for-byte deterministic") {
  TempDir tmp("traindet");
  write_file(tmp.path / "spec.txt", small_spec());
  const std::string data = (tmp.path / "data").string();
  REQUIRE(run_cli("generate " + (tmp.path / "spec.txt").string() + " " + data) ==
          0);
  const std::string a = (tmp.path / "a").string();
  const std::string b = (tmp.path / "b").string();
  const std::string flags = " --epochs 25 --dim 4 --seed 7 --ratio 0.5";
  REQUIRE(run_cli("train " + data + " --out " + a + flags) == 0);
  REQUIRE(run_cli("train " + data + " --out " + b + flags) == 0);
  for (const std::string f :
       {"embeddings_1.txt", "embeddings_2.txt", "history.txt", "scores.txt"})
    CHECK(slurp(fs::path(a) / f) == slurp(fs::path(b) / f));

  // a different seed changes the embeddings
  const std::string c = (tmp.path / "c").string();
  REQUIRE(run_cli("train " + data + " --out " + c +
                  " --epochs 25 --dim 4 --seed 8 --ratio 0.5") == 0);
  CHECK(slurp(fs::path(a) / "embeddings_1.txt") !=
        slurp(fs::path(c) / "embeddings_1.txt"));
}

TEST_CASE("--no-between-edges is accepted and changes the result") {
  TempDir tmp("nobetween");
  write_file(tmp.path / "spec.txt", small_spec());
  const std::string data = (tmp.path / "data").string();
  REQUIRE(run_cli("generate " + (tmp.path / "spec.txt").string() + " " + data) ==
          0);
  const std::string with = (tmp.path / "with").string();
  const std::string without = (tmp.path / "without").string();
  const std::string flags = " --epochs 20 --dim 4 --seed 2";
  REQUIRE(run_cli("train " + data + " --out " + with + flags) == 0);
  REQUIRE(run_cli("train " + data + " --out " + without + flags +
                  " --no-between-edges") == 0);
  CHECK(slurp(fs::path(with) / "embeddings_1.txt") !=
        slurp(fs::path(without) / "embeddings_1.txt"));
}

TEST_CASE("exit codes distinguish config, I/O, and numeric failures") {
  TempDir tmp("exitcodes");

  // bad probability in the synthetic spec
  write_file(tmp.path / "bad.txt",
             "layers=1\nnodes=10\ncommunities=2\np_in=1.2\np_out=0.05\n"
             "q_same=0.3\nq_diff=0.05\nseed=1\n");
  CHECK(run_cli("generate " + (tmp.path / "bad.txt").string() + " " +
                (tmp.path / "out").string()) == 2);

  // missing dataset directory
  CHECK(run_cli("train /nonexistent/dataset --out " +
                (tmp.path / "out").string()) == 3);

  // unknown subcommand and missing required option
  CHECK(run_cli("frobnicate") == 2);
  CHECK(run_cli("train") == 2);

  // absurd learning rate drives the loss non-finite
  write_file(tmp.path / "spec.txt", small_spec());
  const std::string data = (tmp.path / "data").string();
  REQUIRE(run_cli("generate " + (tmp.path / "spec.txt").string() + " " + data) ==
          0);
  CHECK(run_cli("train " + data + " --out " + (tmp.path / "div").string() +
                " --epochs 20 --dim 4 --optimizer plain-gd --lr 1e160") == 4);
}
