#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <gtest/gtest.h>
#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
    int status = -1;
    std::string out;
};

/// Runs the CLI with stderr folded into the captured output.
Result run(const std::string& args)
{
    const std::string cmd = std::string(GEE_CLI_PATH) + " " + args + " 2>&1";
    Result r;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe)
        return r;
    std::array<char, 4096> buf{};
    while (std::fgets(buf.data(), static_cast<int>(buf.size()), pipe))
        r.out += buf.data();
    const int raw = pclose(pipe);
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    return r;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override
    {
        dir_ = fs::temp_directory_path()
               / ("gee_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string d() const { return dir_.string(); }
    fs::path dir_;
};

const std::string kFixture = std::string(GEE_TEST_DATA) + "/two_cliques.txt";

}  // namespace

TEST_F(CliTest, HelpExitsZero)
{
    EXPECT_EQ(run("--help").status, 0);
    EXPECT_EQ(run("").status, 1);
    EXPECT_EQ(run("frobnicate").status, 1);
}

TEST_F(CliTest, SimulateIsByteIdenticalOnRerun)
{
    ASSERT_EQ(run("simulate --preset sim1 --seed 7 --n 500 --out-dir " + d() + "/a").status, 0);
    ASSERT_EQ(run("simulate --preset sim1 --seed 7 --n 500 --out-dir " + d() + "/b").status, 0);
    const std::string edges = slurp(dir_ / "a" / "sim1_edges.txt");
    EXPECT_FALSE(edges.empty());
    EXPECT_EQ(edges, slurp(dir_ / "b" / "sim1_edges.txt"));
    EXPECT_EQ(slurp(dir_ / "a" / "sim1_truth.csv"), slurp(dir_ / "b" / "sim1_truth.csv"));
    EXPECT_EQ(edges.rfind("# preset=sim1 n=500 seed=7", 0), 0u);

    std::ifstream truth(dir_ / "a" / "sim1_truth.csv");
    std::string line;
    int rows = 0;
    while (std::getline(truth, line))
        if (!line.empty() && line[0] != '#')
            ++rows;
    EXPECT_EQ(rows, 500);
}

TEST_F(CliTest, SimulateRejectsUnknownPreset)
{
    const Result r = run("simulate --preset sim9 --out-dir " + d());
    EXPECT_EQ(r.status, 1);
    EXPECT_NE(r.out.find("sim9"), std::string::npos);
}

TEST_F(CliTest, ClusterTwoCliquesOverARange)
{
    const Result r = run("cluster --input " + kFixture + " --k-range 2..6 --seed 3 --out-dir " + d());
    ASSERT_EQ(r.status, 0) << r.out;
    const json s = json::parse(slurp(dir_ / "summary.json"));
    EXPECT_EQ(s["n_vertices"], 10);
    EXPECT_EQ(s["n_edges"], 21);
    ASSERT_EQ(s["per_k"].size(), 5u);
    // Every k in 2..6 admits a labelling with MRI 0 on this graph, so the
    // larger-k tie rule selects the top of the range.
    EXPECT_EQ(s["mri"], 0.0);
    EXPECT_EQ(s["k_hat"], 6);
    int largest_zero = 0;
    for (const auto& pk : s["per_k"])
        if (pk["mri"] == 0.0)
            largest_zero = pk["k"];
    EXPECT_EQ(s["k_hat"], largest_zero);
    EXPECT_TRUE(fs::exists(dir_ / "labels.csv"));
    EXPECT_TRUE(fs::exists(dir_ / "embedding.csv"));
    EXPECT_EQ(json::parse(r.out)["k_hat"], s["k_hat"]);
}

TEST_F(CliTest, ClusterTwoCliquesFixedK)
{
    const Result r = run("cluster --input " + kFixture + " --k 2 --format json --out-dir " + d());
    ASSERT_EQ(r.status, 0) << r.out;
    const json s = json::parse(slurp(dir_ / "summary.json"));
    ASSERT_EQ(s["per_k"].size(), 1u);
    EXPECT_EQ(s["k_hat"], 2);
    EXPECT_EQ(s["mri"], 0.0);
    const json labels = json::parse(slurp(dir_ / "labels.json"));
    EXPECT_EQ(labels["index_base"], 1);
    ASSERT_EQ(labels["labels"].size(), 10u);
    // Each clique shares one label.
    const auto label = [&](std::size_t i) { return labels["labels"][i].get<int>(); };
    for (std::size_t i = 1; i < 5; ++i) {
        EXPECT_EQ(label(i), label(0));
        EXPECT_EQ(label(5 + i), label(5));
    }
    EXPECT_NE(label(0), label(5));
}

TEST_F(CliTest, ClusterDeterministicOutputFiles)
{
    ASSERT_EQ(run("cluster --input " + kFixture + " --k-range 2..4 --out-dir " + d() + "/a").status, 0);
    ASSERT_EQ(run("cluster --input " + kFixture + " --k-range 2..4 --out-dir " + d() + "/b").status, 0);
    EXPECT_EQ(slurp(dir_ / "a" / "labels.csv"), slurp(dir_ / "b" / "labels.csv"));
    EXPECT_EQ(slurp(dir_ / "a" / "embedding.csv"), slurp(dir_ / "b" / "embedding.csv"));
}

TEST_F(CliTest, ClusterMissingFileIsADataError)
{
    const std::string missing = d() + "/nope.txt";
    const Result r = run("cluster --input " + missing + " --out-dir " + d());
    EXPECT_EQ(r.status, 2);
    EXPECT_NE(r.out.find(missing), std::string::npos) << r.out;
}

TEST_F(CliTest, ClusterMalformedEdgeIsADataError)
{
    const fs::path bad = dir_ / "bad.txt";
    std::ofstream(bad) << "1 2\n2 x\n";
    const Result r = run("cluster --input " + bad.string() + " --out-dir " + d());
    EXPECT_EQ(r.status, 2);
    EXPECT_NE(r.out.find("line 2"), std::string::npos) << r.out;
}

TEST_F(CliTest, ClusterUsageErrors)
{
    EXPECT_EQ(run("cluster --out-dir " + d()).status, 1);
    EXPECT_EQ(run("cluster --input " + kFixture + " --k-range 5..2 --out-dir " + d()).status, 1);
    EXPECT_EQ(run("cluster --input " + kFixture + " --k 2 --k-range 2..3 --out-dir " + d()).status, 1);
    EXPECT_EQ(run("cluster --input " + kFixture + " --format xml --out-dir " + d()).status, 1);
}

TEST_F(CliTest, BenchEmptySweepIsAUsageError)
{
    EXPECT_EQ(run("bench --edges \"\"").status, 1);
    EXPECT_EQ(run("bench --edges 1e4,abc").status, 1);
}

TEST_F(CliTest, BenchSmallSweep)
{
    const Result r = run("bench --edges 2000 --k-range 2..4 -r 2 -o " + d() + "/bench.csv");
    ASSERT_EQ(r.status, 0) << r.out;
    const std::string csv = slurp(dir_ / "bench.csv");
    EXPECT_EQ(csv.rfind("#", 0), 0u);
    EXPECT_NE(csv.find("edges,vertices,wall_seconds,k_hat\n2000,200,"), std::string::npos) << csv;
}

TEST_F(CliTest, ExperimentUnknownName)
{
    EXPECT_EQ(run("experiment table9 --out-dir " + d()).status, 1);
}

TEST_F(CliTest, ExperimentSmallRunAndSummarize)
{
    const Result r = run("experiment table1 --mc-reps 2 -n 150 --sims sim1 -q --out-dir " + d());
    ASSERT_EQ(r.status, 0) << r.out;
    const fs::path csv = dir_ / "table1_replicates.csv";
    ASSERT_TRUE(fs::exists(csv));
    // Recomputing from the replicate table reproduces the written summary.
    const Result again = run("experiment --summarize " + csv.string());
    ASSERT_EQ(again.status, 0) << again.out;
    EXPECT_EQ(again.out, slurp(dir_ / "table1_summary.txt"));
    EXPECT_EQ(run("experiment --summarize " + d() + "/missing.csv").status, 2);
}

TEST_F(CliTest, ThreadEnvironmentOverride)
{
    const std::string cmd = "cluster --input " + kFixture + " --k-range 2..3 --out-dir " + d();
    const Result a = run(cmd);
    setenv("GEE_NUM_THREADS", "3", 1);
    const Result b = run(cmd + "/b");
    unsetenv("GEE_NUM_THREADS");
    ASSERT_EQ(a.status, 0);
    ASSERT_EQ(b.status, 0);
    EXPECT_EQ(slurp(dir_ / "labels.csv"), slurp(dir_ / "b" / "labels.csv"));
}
