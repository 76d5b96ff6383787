#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "afreg/cli.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path kFixtures{AFREG_FIXTURE_DIR};

int invoke(std::vector<std::string> args) {
    args.insert(args.begin(), "afreg");
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    std::ostringstream sink;
    auto* old_out = std::cout.rdbuf(sink.rdbuf());
    auto* old_err = std::cerr.rdbuf(sink.rdbuf());
    const int code = afreg::cli::run(static_cast<int>(argv.size()), argv.data());
    std::cout.rdbuf(old_out);
    std::cerr.rdbuf(old_err);
    return code;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

std::vector<std::string> lines(const fs::path& p) {
    std::ifstream in(p);
    std::vector<std::string> out;
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() / ("afreg_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }
    std::vector<std::string> base() const {
        return {"--config", (kFixtures / "small_config.json").string(), "--out", dir_.string()};
    }
    fs::path dir_;
};

}  // namespace

TEST_F(Cli, ExitCodes) {
    EXPECT_EQ(invoke({"--help"}), 0);
    EXPECT_EQ(invoke({}), 2);
    EXPECT_EQ(invoke({"frobnicate"}), 2);
    EXPECT_EQ(invoke({"fit", "--mode", "weekly", "--data", "x.csv"}), 2);
    auto args = base();
    args.insert(args.end(), {"ingest", "--data", (dir_ / "missing.csv").string()});
    EXPECT_EQ(invoke(args), 1);

    std::ofstream(dir_ / "bad.json") << R"({"bogus": true})";
    EXPECT_EQ(invoke({"--config", (dir_ / "bad.json").string(), "--out", dir_.string(), "ingest", "--data",
                      (kFixtures / "small_panel.csv").string()}),
              1);
}

TEST_F(Cli, IngestRescalesPercentQuotes) {
    std::ofstream(dir_ / "pct.csv") << "date,1,2,5\n2020-01-02,1.5,2.0,2.5\n2020-01-03,1.25,2.25,3.0\n";
    auto args = base();
    args.insert(args.end(), {"--rates-in-percent", "ingest", "--data", (dir_ / "pct.csv").string()});
    ASSERT_EQ(invoke(args), 0);
    const auto out = lines(dir_ / "panel.csv");
    ASSERT_EQ(out.size(), 3u);
    EXPECT_EQ(out[0], "date,1,2,5");
    EXPECT_EQ(out[1], "2020-01-02,0.015,0.02,0.025");
    EXPECT_EQ(out[2], "2020-01-03,0.0125,0.0225,0.03");
}

TEST_F(Cli, FitMatchesGoldenModel) {
    auto args = base();
    args.insert(args.end(), {"fit", "--data", (kFixtures / "small_panel.csv").string()});
    ASSERT_EQ(invoke(args), 0);
    EXPECT_EQ(slurp(dir_ / "model.json"), slurp(kFixtures / "small_model.json"));
}

TEST_F(Cli, ClassifySweepsThresholdPresets) {
    const std::string data = (kFixtures / "small_panel.csv").string();
    for (std::vector<std::string> cmd : {std::vector<std::string>{"fit", "--data", data},
                                         std::vector<std::string>{"forecast", "--data", data},
                                         std::vector<std::string>{"classify"}}) {
        auto args = base();
        args.insert(args.end(), cmd.begin(), cmd.end());
        ASSERT_EQ(invoke(args), 0) << cmd.front();
    }
    const auto pi = lines(dir_ / "pi_table.csv");
    ASSERT_EQ(pi.size(), 1u + 3u * 8u);
    EXPECT_EQ(pi[0], "epsilon_bp,delta,maturity,n,pi_hat,stdev,wilson_lo,wilson_hi");
    EXPECT_EQ(pi[1].substr(0, 6), "0.1,0,");
    EXPECT_EQ(pi[9].substr(0, 6), "1,0.1,");
    EXPECT_EQ(pi[17].substr(0, 6), "2,0.8,");
    const auto labels = lines(dir_ / "labels.csv");
    EXPECT_EQ(labels[0], "date,maturity,label");
    EXPECT_TRUE(fs::exists(dir_ / "states.csv"));
}
