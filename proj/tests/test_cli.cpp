#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <regex>

#include "ramc/cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out, err;
};

Result run(std::vector<std::string> args) {
    std::ostringstream out, err;
    int code = ramc::cli::run(std::move(args), out, err);
    return {code, out.str(), err.str()};
}

fs::path shipped() { return RAMC_DEFAULT_FIXTURE_DIR; }

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("ramc-cli-" + std::to_string(::getpid()) + "-" + std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    static int& counter() {
        static int c = 0;
        return c;
    }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST(CliVerify, CaseOne) {
    auto r = run({"verify", "229", "37"});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("index=9 order=9 EQUAL"), std::string::npos) << r.out;
}

TEST(CliVerify, CaseEight) {
    auto r = run({"verify", "1129", "41077"});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("index=81 order=81 EQUAL"), std::string::npos);
    EXPECT_NE(r.out.find("[27,9,3]"), std::string::npos);
}

TEST(CliVerify, FlagsAndRecords) {
    auto r = run({"verify", "--f", "1129", "--q", "7", "--format", "records"});
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out, "case: 1129 7 3 3 EQUAL\n");
}

TEST(CliVerify, UsageErrors) {
    auto r = run({"verify", "229", "40"});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("usage error"), std::string::npos);
    EXPECT_EQ(run({"verify", "231", "37"}).code, 2);
    EXPECT_EQ(run({"verify", "229", "37", "--digits", "49"}).code, 2);
    EXPECT_EQ(run({"verify", "229", "37", "--p", "5"}).code, 2);
    EXPECT_EQ(run({"verify", "229"}).code, 2);
    EXPECT_EQ(run({"verify", "229", "37", "--mode", "online"}).code, 2);
    EXPECT_EQ(run({}).code, 2);
}

TEST(CliVerify, MissingFixtureIsInfrastructureFailure) {
    TempDir d;
    auto r = run({"verify", "229", "37", "--fixture-dir", d.path.string()});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("no fixture"), std::string::npos);
    auto s = run({"verify", "229", "37", "--fixture-dir", d.path.string(), "--mode", "subprocess", "--gp-path", "/nonexistent/gp"});
    EXPECT_EQ(s.code, 2);
}

TEST(CliVerify, UnequalVerdictExitsOne) {
    TempDir d;
    auto text = slurp(shipped() / "229_37.fixture");
    text = std::regex_replace(text, std::regex("class_group_K: 3, 3, 3"), "class_group_K: 9, 3, 3");
    std::ofstream(d.path / "229_37.fixture") << text;
    auto r = run({"verify", "229", "37", "--fixture-dir", d.path.string(), "--format", "records"});
    EXPECT_EQ(r.code, 1);
    EXPECT_EQ(r.out, "case: 229 37 9 27 UNEQUAL\n");
}

TEST(CliSurvey, ShippedFieldsRecordsAreLineStable) {
    auto a = run({"survey", "--f", "229", "--format", "records"});
    EXPECT_EQ(a.code, 0);
    EXPECT_EQ(a.out,
              "case: 229 37 9 9 EQUAL\n"
              "case: 229 1723 9 9 EQUAL\n"
              "case: 229 5743 27 27 EQUAL\n"
              "case: 229 6379 27 27 EQUAL\n"
              "survey: cases=4 equal=4 unequal=0 failed=0 below_threshold=0 no_data=606\n");
    auto b = run({"survey", "--f", "1129", "--q-range", "7:50000", "--format", "records", "--jobs", "2"});
    EXPECT_EQ(b.code, 0);
    EXPECT_NE(b.out.find("survey: cases=4 equal=4 unequal=0 failed=0"), std::string::npos) << b.out;
    EXPECT_EQ(run({"survey", "--f", "1129", "--q-range", "7:50000", "--format", "records"}).out, b.out);
}

TEST(CliSurvey, EmptyAdmissibleSet) {
    auto r = run({"survey", "--f-range", "230:232", "--format", "records"});
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out, "survey: cases=0 equal=0 unequal=0 failed=0 below_threshold=0 no_data=0\n");
    EXPECT_EQ(run({"survey", "--f-range", "5:1"}).code, 2);
}

TEST(CliSurvey, PartialFailuresAreRecorded) {
    TempDir d;
    fs::copy_file(shipped() / "229_37.fixture", d.path / "229_37.fixture");
    auto text = slurp(shipped() / "229_1723.fixture");
    text = std::regex_replace(text, std::regex("script_sha256: [0-9a-f]+"), "script_sha256: " + std::string(64, '0'));
    std::ofstream(d.path / "229_1723.fixture") << text;
    auto r = run({"survey", "--f", "229", "--format", "records", "--fixture-dir", d.path.string()});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.out.find("case: 229 37 9 9 EQUAL"), std::string::npos);
    EXPECT_NE(r.out.find("case: 229 1723 ERROR"), std::string::npos);
    EXPECT_NE(r.out.find("cases=1 equal=1 unequal=0 failed=1"), std::string::npos);
}

TEST(CliSurvey, ThresholdSkipsSmallClassGroups) {
    auto r = run({"survey", "--f", "1129", "--q-range", "7:100", "--threshold", "4", "--format", "records"});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("case: 1129 73"), std::string::npos);
    EXPECT_EQ(r.out.find("case: 1129 7 "), std::string::npos);
    EXPECT_NE(r.out.find("below_threshold=1"), std::string::npos);
}

TEST(CliCapitulation, Examples) {
    auto a = run({"capitulation", "229", "37", "109"});
    EXPECT_EQ(a.code, 0);
    EXPECT_NE(a.out.find("NotInjective (bound 729)"), std::string::npos);
    EXPECT_NE(a.out.find("#H^ar=9"), std::string::npos);
    EXPECT_NE(a.out.find("#H^alg in {27,81,243}"), std::string::npos);
    auto b = run({"capitulation", "1129", "7", "19"});
    EXPECT_EQ(b.code, 0);
    EXPECT_NE(b.out.find("stability"), std::string::npos);
    EXPECT_NE(b.out.find("#H^alg=9"), std::string::npos);
    EXPECT_NE(b.out.find("#H^ar=1"), std::string::npos);
}

TEST(CliCapitulation, AdmissibilityOfEll) {
    auto r = run({"capitulation", "229", "37", "7", "--n", "2"});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("not a prime congruent to 1 mod 2p^n"), std::string::npos);
    // admissible for n = 1, but no data on L is available
    EXPECT_EQ(run({"capitulation", "229", "37", "7"}).code, 2);
    EXPECT_EQ(run({"capitulation", "229", "37", "113"}).code, 2);
}

TEST(CliCapitulation, UserSuppliedData) {
    auto r = run({"capitulation", "229", "37", "109", "--n", "1", "--hL-order", "243"});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("NotInjective"), std::string::npos);
    auto s = run({"capitulation", "229", "37", "109", "--hK", "3,3,3", "--hL", "9,9,9,3"});
    EXPECT_EQ(s.code, 0);
    EXPECT_NE(s.out.find("Inconclusive"), std::string::npos);
    EXPECT_EQ(run({"capitulation", "229", "37", "109", "--hL-order", "10"}).code, 2);
}

TEST(CliFixture, ImportReproducesShippedFixture) {
    TempDir d;
    auto r = run({"fixture", "import", (shipped() / "cas-output" / "229_37.txt").string(), "--fixture-dir", d.path.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(slurp(d.path / "229_37.fixture"), slurp(shipped() / "229_37.fixture"));
    auto show = run({"fixture", "show", "229", "37", "--fixture-dir", d.path.string()});
    EXPECT_EQ(show.out, slurp(shipped() / "229_37.fixture"));
}

TEST(CliFixture, CheckShippedDirectories) {
    auto a = run({"fixture", "check"});
    EXPECT_EQ(a.code, 0) << a.out;
    EXPECT_NE(a.out.find("fixtures: 8 checked, 0 failed"), std::string::npos);
    auto b = run({"fixture", "check", "--fixture-dir", (shipped() / "digits300").string(), "--digits", "300"});
    EXPECT_EQ(b.code, 0) << b.out;
    EXPECT_NE(b.out.find("fixtures: 6 checked, 0 failed"), std::string::npos);
}

TEST(CliFixture, CheckReportsTampering) {
    TempDir d;
    auto text = slurp(shipped() / "229_37.fixture");
    text = std::regex_replace(text, std::regex("class_group_k: 3"), "class_group_k: 9");
    std::ofstream(d.path / "229_37.fixture") << text;
    auto r = run({"fixture", "check", "--fixture-dir", d.path.string()});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.out.find("FAIL 229_37.fixture"), std::string::npos);
}
