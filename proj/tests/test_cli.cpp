#include "doctest.h"
#include "slicenet/documents.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <string>

namespace fs = std::filesystem;
using namespace slicenet;

namespace {

struct Run {
  int code;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(SLICENET_CLI_PATH) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  std::array<char, 4096> buf{};
  while (std::fgets(buf.data(), static_cast<int>(buf.size()), pipe)) out += buf.data();
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() /
            ("slicenet_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter_++));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string write(const std::string& name, const std::string& text) const {
    write_text_file(path_ / name, text);
    return (path_ / name).string();
  }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  fs::path path_;
  static inline int counter_ = 0;
};

const char* kBalanced =
    R"({"schema": "slicenet.spec/1", "n": 2, "b": [1, 1], "d": [1, 2], "g": [1, 10]})";

}  // namespace

TEST_CASE("optimize, verify and profile-csv") {
  TempDir dir;
  const auto spec = dir.write("spec.json", kBalanced);
  const auto result = dir.file("result.json");

  auto r = run("optimize " + spec + " -o " + result);
  REQUIRE(r.code == 0);
  CHECK(r.out.find("balanced  = yes") != std::string::npos);
  const auto doc = parse_result_document(read_text_file(result));
  CHECK(doc.strategy.p[1] == doctest::Approx(0.975));

  r = run("verify " + result);
  CHECK(r.code == 0);
  CHECK(r.out.find("verified: optimal") != std::string::npos);

  r = run("profile-csv " + result);
  CHECK(r.code == 0);
  CHECK(r.out.rfind("slice,b,d,g,F,J,E,e,p\n", 0) == 0);
  CHECK(parse_profile_csv(r.out).size() == 2);

  r = run("optimize " + spec);
  CHECK(r.code == 0);
  CHECK(r.out.find("\"schema\": \"slicenet.result/1\"") != std::string::npos);
}

TEST_CASE("verify rejects a hand-edited strategy with exit 3") {
  TempDir dir;
  const auto spec = dir.write("spec.json", kBalanced);
  const auto result = dir.file("edited.json");
  REQUIRE(run("evaluate " + spec + " --p 0,0.5 -o " + result).code == 0);
  const auto r = run("verify " + result);
  CHECK(r.code == 3);
  CHECK(r.out.find("right_condition") != std::string::npos);
}

TEST_CASE("input errors exit 1 and name the problem") {
  TempDir dir;
  auto r = run("optimize " +
               dir.write("bad.json", R"({"schema": "slicenet.spec/1", "n": 2, "b": [1, 1],
                                         "d": [2, 1], "g": [1, 1]})"));
  CHECK(r.code == 1);
  CHECK(r.out.find("'d'") != std::string::npos);

  r = run("optimize " + dir.write("cut.json", std::string(kBalanced).substr(0, 30)));
  CHECK(r.code == 1);
  CHECK(r.out.find("parse error") != std::string::npos);

  r = run("optimize " + dir.file("missing.json"));
  CHECK(r.code == 1);

  r = run("oracle " + dir.write("six.json", R"({"schema": "slicenet.spec/1", "n": 6,
      "b": [1,1,1,1,1,1], "d": [1,2,3,4,5,6], "g": [1,1,1,1,1,1]})"));
  CHECK(r.code == 1);

  r = run("evaluate " + dir.write("spec.json", kBalanced) + " --p 0,1.5");
  CHECK(r.code == 1);

  r = run("frobnicate");
  CHECK(r.code == 1);
  CHECK(run("--help").code == 0);
}

TEST_CASE("oracle and simulate") {
  TempDir dir;
  const auto spec = dir.write("spec.json", kBalanced);
  auto r = run("oracle " + spec + " --step 0.025");
  CHECK(r.code == 0);
  CHECK(r.out.find("within slack") != std::string::npos);

  const auto result = dir.file("result.json");
  REQUIRE(run("optimize " + spec + " -o " + result).code == 0);
  r = run("simulate " + spec + " " + result + " --replications 20000 --seed 3");
  CHECK(r.code == 0);
  CHECK(r.out.find("pass") != std::string::npos);

  const auto other = dir.write("other.json",
      R"({"schema": "slicenet.spec/1", "n": 2, "b": [1, 1], "d": [1, 2], "g": [10, 1]})");
  CHECK(run("simulate " + other + " " + result).code == 1);

  const auto frac = dir.write("frac.json",
      R"({"schema": "slicenet.spec/1", "n": 2, "b": [1, 1], "d": [1, 2], "g": [1.5, 2]})");
  const auto frac_result = dir.file("frac_result.json");
  REQUIRE(run("optimize " + frac + " -o " + frac_result).code == 0);
  CHECK(run("simulate " + frac + " " + frac_result + " --replications 100").code == 1);
  r = run("simulate " + frac + " " + frac_result + " --replications 20000 --round-g");
  CHECK(r.out.find("rounded") != std::string::npos);
}
