#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "wnn/cli.hpp"
#include "wnn/io.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out, err;
};

Result run(std::vector<std::string> args) {
    args.insert(args.begin(), "wnn");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = wnn::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("wnn_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::create_directories(dir_);
        std::ofstream(path("shallow.json")) << R"({"version":1,"input_dim":1,"units":[)"
                                               R"({"coef":1,"weights":[1],"bias":0},)"
                                               R"({"coef":-0.5,"weights":[-1],"bias":0.5},)"
                                               R"({"coef":0.25,"weights":[2],"bias":-1}]})";
        wnn::save_network(wnn::cli::motivating_rescaled(100.0), path("motivating.json"));
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    fs::path dir_;
};

}  // namespace

TEST_F(CliTest, DemoMotivatingDifferenceIsConstant) {
    const Result r = run({"demo", "motivating"});
    ASSERT_EQ(r.code, 0) << r.err;
    std::istringstream lines(r.out);
    std::string line;
    std::getline(lines, line);
    EXPECT_EQ(line, "x,f,f_prime,diff");
    int rows = 0;
    while (std::getline(lines, line)) {
        EXPECT_EQ(line.substr(line.rfind(',') + 1), "99") << line;
        ++rows;
    }
    EXPECT_EQ(rows, 201);
}

TEST_F(CliTest, BoundSpotValue) {
    const Result r = run({"bound", "--spec-json", R"({"p":1,"q":"inf","c":1,"c_out":1,"k":0,"dims":[1,1]})", "--n", "100"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find(",0.117741002252,"), std::string::npos) << r.out;
}

TEST_F(CliTest, BoundSweepRows) {
    const Result r = run({"bound", "--spec-json", R"({"p":2,"q":"2","c":1,"c_out":1,"k":1,"dims":[1,4,1]})", "--n",
                          "100", "--sweep", "k=1..7,2"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 5);
    EXPECT_EQ(run({"bound", "--spec-json", R"({"p":1,"q":"inf","c":1,"c_out":1,"k":0,"dims":[1,1]})", "--n", "100",
                   "--sweep", "k=5..1"})
                  .code,
              1);
}

TEST_F(CliTest, CanonicalizeThenCheckPasses) {
    const Result c = run({"canonicalize", "--net", path("motivating.json"), "--p", "2", "--q", "inf", "--c", "2",
                          "--c-out", "300", "--out", path("canon.json")});
    ASSERT_EQ(c.code, 0) << c.err;
    const Result k = run({"check", "--net", path("canon.json"), "--spec-json",
                          R"({"p":2,"q":"inf","c":2,"c_out":300,"k":1,"dims":[1,2,1]})"});
    EXPECT_EQ(k.code, 0) << k.out << k.err;
}

TEST_F(CliTest, CheckFailureAndBudgetViolationCodes) {
    const Result k = run({"check", "--net", path("motivating.json"), "--spec-json",
                          R"({"p":2,"q":"inf","c":2,"c_out":300,"k":1,"dims":[1,2,1]})"});
    EXPECT_EQ(k.code, 3);
    const Result c = run({"canonicalize", "--net", path("motivating.json"), "--p", "2", "--q", "inf", "--c", "2",
                          "--c-out", "3", "--out", path("canon.json")});
    EXPECT_EQ(c.code, 2);
    EXPECT_NE(c.err.find("layer"), std::string::npos) << c.err;
}

TEST_F(CliTest, CompileWithVerify) {
    const Result r = run({"compile", "--shallow", path("shallow.json"), "--k", "2", "--p", "1", "--q", "inf",
                          "--c-out", "3", "--out", path("deep.json"), "--verify", "1000", "--seed", "4"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto pos = r.out.find("max_deviation ");
    ASSERT_NE(pos, std::string::npos);
    EXPECT_LE(std::stod(r.out.substr(pos + 14)), 1e-9);
    EXPECT_EQ(wnn::load_network(path("deep.json")).depth(), 2u);
    EXPECT_EQ(run({"compile", "--shallow", path("shallow.json"), "--k", "2", "--p", "1", "--q", "inf", "--c-out", "1",
                   "--out", path("deep.json")})
                  .code,
              2);
}

TEST_F(CliTest, NormListsLayers) {
    const Result r = run({"norm", "--net", path("motivating.json"), "--p", "1", "--q", "inf"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out, "layer,norm\n1,0.02\n2,300\n");
}

TEST_F(CliTest, InputErrors) {
    EXPECT_EQ(run({"norm", "--net", path("missing.json"), "--p", "1", "--q", "inf"}).code, 1);
    EXPECT_EQ(run({"norm", "--net", path("motivating.json"), "--p", "1"}).code, 1);
    EXPECT_EQ(run({"norm", "--net", path("motivating.json"), "--p", "0.5", "--q", "inf"}).code, 1);
    EXPECT_EQ(run({"frobnicate"}).code, 1);
    EXPECT_EQ(run({}).code, 1);
    EXPECT_EQ(run({"--help"}).code, 0);
    std::ofstream(path("bad.json")) << "{not json";
    const Result r = run({"norm", "--net", path("bad.json"), "--p", "1", "--q", "inf"});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("--net"), std::string::npos);
}

TEST_F(CliTest, GenBoundAndApprox) {
    const Result g = run({"gen-bound", "--spec-json", R"({"p":1,"q":"inf","c":1,"c_out":1,"k":0,"dims":[1,1]})",
                          "--n", "100", "--delta", "0.5"});
    ASSERT_EQ(g.code, 0) << g.err;
    EXPECT_NE(g.out.find("0.715302941587"), std::string::npos) << g.out;
    EXPECT_EQ(run({"gen-bound", "--spec-json", R"({"p":1,"q":"inf","c":1,"c_out":1,"k":0,"dims":[1,1]})", "--n",
                   "100", "--delta", "1.5"})
                  .code,
              2);
    const Result a = run({"approx", "--m1", "1", "--L", "1", "--c-out", "2.718281828459045", "--k", "1", "--Cr", "1",
                          "--C", "1"});
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_NE(a.out.find("10"), std::string::npos);
    EXPECT_EQ(run({"approx", "--m1", "1", "--L", "1", "--c-out", "0.5", "--k", "1", "--Cr", "1"}).code, 2);
}

TEST_F(CliTest, EstimateIsReproducible) {
    std::ofstream(path("sample.json")) << R"({"version":1,"points":[[0.1],[-0.4],[0.9]]})";
    const std::vector<std::string> args{"estimate", "--spec-json",
                                        R"({"p":1,"q":"inf","c":1,"c_out":1,"k":1,"dims":[1,2,1]})", "--sample",
                                        path("sample.json"), "--seed", "3", "--restarts", "2", "--steps", "40",
                                        "--compare-bound"};
    const Result a = run(args);
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(run(args).out, a.out);
    EXPECT_NE(a.out.find("\"margin\""), std::string::npos);
    EXPECT_EQ(run({"estimate", "--spec-json", R"({"p":3,"q":"7","c":1,"c_out":1,"k":1,"dims":[1,2,1]})", "--sample",
                   path("sample.json")})
                  .code,
              2);
}

TEST_F(CliTest, Claim1Table) {
    const Result r = run({"demo", "claim1", "--gamma0", "1", "--n", "3", "--c0-list", "1,2"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out, "C0,witness,norm_product\n1,0.5,1\n2,1,1\n");
    EXPECT_EQ(run({"demo", "claim1", "--n", "40"}).code, 2);
}
