#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "cli.hpp"
#include "matrix_io.hpp"
#include "report.hpp"
#include "support/test_support.hpp"
#include "svarid/error.hpp"
#include "svarid/identifier.hpp"

using namespace svarid;
using namespace svarid::cli;
using svarid::testing::draws_config;

namespace {

const std::string kSpecDir = SVARID_SPEC_DIR;

std::string spec_path(const std::string& name) { return kSpecDir + "/" + name; }

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

class TempFile {
 public:
  explicit TempFile(const std::string& content) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("svarid_cli_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++) + ".txt");
    std::ofstream(path_) << content;
  }
  ~TempFile() { std::filesystem::remove(path_); }
  std::string path() const { return path_.string(); }

 private:
  std::filesystem::path path_;
};

}  // namespace

TEST(CliCheck, ExitCodesFollowVerdicts) {
  EXPECT_EQ(invoke({"check", spec_path("counterexample.spec")}).code, kExitNotIdentified);
  EXPECT_EQ(invoke({"check", spec_path("recursive3.spec")}).code, kExitOk);
  EXPECT_EQ(invoke({"check", "--spec", spec_path("mixed4.spec")}).code, kExitOk);
  EXPECT_EQ(invoke({"check", spec_path("count_failure.spec")}).code, kExitNotIdentified);
}

TEST(CliCheck, CounterexampleText) {
  const auto res = invoke({"check", spec_path("counterexample.spec"), "--draws", "10"});
  EXPECT_TRUE(contains(res.out, "q = (2, 1, 0)"));
  EXPECT_TRUE(contains(res.out, "rank(M_2) = 2"));
  EXPECT_TRUE(contains(res.out, "IR0(1,2) is implied by other restrictions: A0(2,1), A0(3,1)"));
  EXPECT_TRUE(contains(res.out, "verdict: NotIdentified_Redundancy"));
  EXPECT_TRUE(contains(res.out, "draw 9: FAIL"));
}

TEST(CliCheck, CountFailureText) {
  const auto res = invoke({"check", spec_path("count_failure.spec")});
  EXPECT_TRUE(contains(res.out, "overall: FAIL"));
  EXPECT_TRUE(contains(res.out, "note: "));
  EXPECT_TRUE(contains(res.out, "verdict: NotIdentified_CountFailure"));
  EXPECT_FALSE(contains(res.out, "draw 0"));
}

TEST(CliCheck, JsonMatchesLibraryReport) {
  const auto res = invoke({"check", spec_path("mixed4.spec"), "--format", "json", "--draws", "3", "--seed", "9"});
  ASSERT_EQ(res.code, kExitOk);
  const auto j = Json::parse(res.out);
  const auto spec = load_spec_file(spec_path("mixed4.spec"));
  const auto report = check_exact_identification(spec, draws_config(3, 9));
  EXPECT_EQ(j["command"], "check");
  EXPECT_EQ(j["n"], 4);
  EXPECT_EQ(j["q"].get<std::vector<int>>(), report.compiled.q);
  EXPECT_EQ(j["verdict"], "ExactlyIdentified");
  ASSERT_EQ(j["draws"].size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(j["draws"][i]["seed"].get<std::uint64_t>(), report.draws[i].seed);
    EXPECT_EQ(j["draws"][i]["pass"], true);
    const auto& cols = j["draws"][i]["columns"];
    ASSERT_EQ(cols.size(), 4u);
    for (std::size_t c = 0; c < 4; ++c) {
      EXPECT_EQ(cols[c]["rank"], report.draws[i].rotation.per_column[c].rank);
      EXPECT_EQ(cols[c]["status"], "Unique");
    }
  }
  EXPECT_EQ(j["rank_cross_check"]["pass"], true);
}

TEST(CliCheck, OutputIsReproducible) {
  const std::vector<std::string> args{"check", spec_path("counterexample.spec"), "--format", "json", "--seed", "4"};
  EXPECT_EQ(invoke(args).out, invoke(args).out);
}

TEST(CliCheck, TooFewDrawsIsUsageError) {
  const auto res = invoke({"check", spec_path("recursive3.spec"), "--draws", "1"});
  EXPECT_EQ(res.code, kExitUsage);
  EXPECT_FALSE(res.err.empty());
}

TEST(CliErrors, MissingFileAndBadArguments) {
  EXPECT_EQ(invoke({"check", spec_path("does_not_exist.spec")}).code, kExitUsage);
  EXPECT_EQ(invoke({"check"}).code, kExitUsage);
  EXPECT_EQ(invoke({"frobnicate"}).code, kExitUsage);
  EXPECT_EQ(invoke({"check", spec_path("recursive3.spec"), "--format", "xml"}).code, kExitUsage);
  EXPECT_EQ(invoke({}).code, kExitUsage);
}

TEST(CliErrors, ParseErrorsCarryLocation) {
  TempFile bad("n = 2\np = 0\nblock A0\n x 7\n x x\n");
  const auto res = invoke({"check", bad.path()});
  EXPECT_EQ(res.code, kExitUsage);
  EXPECT_TRUE(contains(res.err, "line 4, column 4"));
}

TEST(CliDemo, ShowsTheRankDrop) {
  const auto res = invoke({"demo"});
  EXPECT_EQ(res.code, kExitOk);
  EXPECT_TRUE(contains(res.out, "p1 = (1, 0, 0)"));
  EXPECT_TRUE(contains(res.out, "rank(Qt_2) = 1 < 2"));
  EXPECT_TRUE(contains(res.out, "rank(M_2) = 2"));
  EXPECT_TRUE(contains(res.out, "verdict: NotIdentified_Redundancy"));
}

TEST(CliRotate, RecursiveAtIdentity) {
  TempFile sigma("1 0 0\n0 1 0\n0 0 1\n");
  const auto res = invoke({"rotate", spec_path("recursive3.spec"), "--sigma", sigma.path(), "--format", "json"});
  ASSERT_EQ(res.code, kExitOk) << res.err;
  const auto j = Json::parse(res.out);
  EXPECT_EQ(j["unique"], true);
  EXPECT_EQ(j["residual"], 0.0);
  EXPECT_FALSE(j.contains("warning"));
}

TEST(CliRotate, CounterexampleWarns) {
  const auto res = invoke({"rotate", spec_path("counterexample.spec")});
  EXPECT_EQ(res.code, kExitOk);
  EXPECT_TRUE(contains(res.out, "WARNING: P is NOT unique"));
}

TEST(CliRotate, BWithoutSigmaIsRejected) {
  TempFile b("0 0 0\n");
  EXPECT_EQ(invoke({"rotate", spec_path("recursive3.spec"), "--b", b.path()}).code, kExitUsage);
}

TEST(CliRotate, CountFailureIsNotIdentified) {
  EXPECT_EQ(invoke({"rotate", spec_path("count_failure.spec")}).code, kExitNotIdentified);
}

TEST(CliExplain, Verdicts) {
  const auto ce = invoke({"explain", spec_path("counterexample.spec")});
  EXPECT_EQ(ce.code, kExitOk);
  EXPECT_TRUE(contains(ce.out, "IR0(1,2) is implied by other restrictions: A0(2,1), A0(3,1)"));
  EXPECT_EQ(invoke({"explain", spec_path("recursive3.spec")}).code, kExitNotIdentified);
  EXPECT_EQ(invoke({"explain", spec_path("count_failure.spec")}).code, kExitNotIdentified);
}

TEST(CliExplain, Json) {
  const auto res = invoke({"explain", spec_path("counterexample.spec"), "--format", "json"});
  ASSERT_EQ(res.code, kExitOk);
  const auto j = Json::parse(res.out);
  EXPECT_EQ(j["redundancy"]["j"], 2);
  EXPECT_EQ(j["redundancy"]["implied"][0]["cell"], "IR0(1,2)");
}

TEST(MatrixIo, ParseAndFormatRoundTrip) {
  const Matrix m = parse_matrix("# comment\n1 2.5\n\n-3e-2 4 # trailing\n");
  Matrix expected(2, 2);
  expected << 1, 2.5, -0.03, 4;
  EXPECT_EQ(m, expected);
  Matrix odd(2, 3);
  odd << 0.1, 1.0 / 3.0, -2e-300, 1e10, 7, -0.0;
  EXPECT_EQ(parse_matrix(format_matrix(odd)), odd);
}

TEST(MatrixIo, Rejections) {
  EXPECT_THROW(parse_matrix("1 2\n3\n"), Error);
  EXPECT_THROW(parse_matrix("1 two\n"), Error);
  EXPECT_THROW(parse_matrix(""), Error);
  EXPECT_THROW(read_matrix_file("/nonexistent/svarid/matrix.txt"), Error);
}
