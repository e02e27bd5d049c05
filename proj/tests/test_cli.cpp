#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "erralign/cli.hpp"

using namespace erralign;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "erralign");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

const std::string fixtures = ERRALIGN_FIXTURES;

}  // namespace

TEST_CASE("cli exit codes") {
  CHECK(cli({}).code == kExitInputError);
  CHECK(cli({"frobnicate"}).code == kExitInputError);
  CHECK(cli({"score", "--metric", "ec", "--bogus"}).code == kExitInputError);
  CHECK(cli({"--help"}).code == kExitOk);
  CHECK(cli({"score", "--metric", "ec"}).code == kExitInputError);
  auto missing = cli({"score", "--metric", "ec", "--truth", "/nonexistent.csv", "--a", "x", "--b", "y"});
  CHECK(missing.code == kExitInputError);
  CHECK(missing.err.find("error: cannot open") != std::string::npos);
  CHECK(cli({"synth", "--preset", "nope", "--out", "x"}).code == kExitInputError);
  CHECK(cli({"score", "--metric", "cles", "--alpha", "-1", "--truth", fixtures + "/animals/truth.csv", "--a",
             fixtures + "/animals/cnn1.csv", "--b", fixtures + "/animals/cnn2.csv"})
            .code == kExitInputError);
}

TEST_CASE("score on identical runs") {
  const std::string run = fixtures + "/animals/cnn1.csv";
  auto r = cli({"score", "--metric", "ec", "--truth", fixtures + "/animals/truth.csv", "--a", run, "--b", run,
                "--b-id", "copy"});
  REQUIRE(r.code == kExitOk);
  CHECK(r.out ==
        "domain,system_a,system_b,metric,value,status,reason,support\n"
        "default,cnn1,copy,ec,1,ok,,60\n");
  auto ma = cli({"score", "--metric", "ma", "--truth", fixtures + "/animals/truth.csv", "--a", run, "--b", run,
                 "--b-id", "copy"});
  CHECK(ma.out.find(",ma,1,ok,,") != std::string::npos);
}

TEST_CASE("score reports dropped instances and writes --out") {
  const fs::path dir = fs::temp_directory_path() / ("erralign_cli_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  std::ofstream(dir / "a.csv") << "instance_id,label\nani000,cat\n";
  auto r = cli({"score", "--metric", "ec", "--truth", fixtures + "/animals/truth.csv", "--a", (dir / "a.csv").string(),
                "--b", fixtures + "/animals/cnn1.csv", "--out", (dir / "s.csv").string()});
  CHECK(r.code == kExitOk);
  CHECK(r.out.empty());
  CHECK(r.err.find("59 instance ids") != std::string::npos);
  CHECK(fs::exists(dir / "s.csv"));
  fs::remove_all(dir);
}

TEST_CASE("zscore needs a family source") {
  CHECK(cli({"zscore", "--scores", fixtures + "/scores_two_domains.csv"}).code == kExitInputError);
}
