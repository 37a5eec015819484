#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <json.hpp>

#include "cli.hpp"

namespace fs = std::filesystem;
using Json = nlohmann::json;

namespace {

struct Result {
    int code = 0;
    std::string out;
    std::string err;
};

Result run(const std::vector<std::string>& args) {
    std::ostringstream out;
    std::ostringstream err;
    const int code = weakrand::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

class TempDir {
public:
    TempDir() {
        path_ = fs::temp_directory_path() /
                ("weakrand_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "_" +
                 ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    fs::path operator/(const std::string& name) const { return path_ / name; }

private:
    fs::path path_;
};

std::vector<std::string> split_lines(const std::string& s) {
    std::vector<std::string> lines;
    std::istringstream in(s);
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    return lines;
}

double rate_of(const Result& r) { return Json::parse(r.out).at("result").at("rate").get<double>(); }

}  // namespace

TEST(CliRate, OneStepAtBasisDeviation) {
    const Result r = run({"rate", "--method", "one-step", "--qber", "0.02", "--eps0", "0", "--eps1", "0.1"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NEAR(rate_of(r), 0.0984, 5e-4);
    EXPECT_EQ(Json::parse(r.out).at("method"), "one-step");
}

TEST(CliRate, TrivialCases) {
    EXPECT_EQ(rate_of(run({"rate", "--method", "one-step", "--qber", "0", "--eps0", "0", "--eps1", "0"})), 1.0);
    EXPECT_EQ(rate_of(run({"rate", "--method", "strong", "--p", "1", "--s", "1", "--f", "1", "--e", "0"})), 1.0);
}

TEST(CliRate, TwoStep) {
    const Result r = run({"rate", "--method", "two-step", "--qber", "0.02", "--eps0", "0", "--eps1", "0.1", "--seed", "1"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NEAR(rate_of(r), 0.6642, 5e-3);
    const Json j = Json::parse(r.out);
    EXPECT_TRUE(j.at("optimization").contains("argmin"));
    EXPECT_TRUE(j.at("optimization").contains("solver_report"));
}

TEST(CliRate, TwoStepNeedsSeed) {
    const Result r = run({"rate", "--method", "two-step", "--qber", "0.02"});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("seed"), std::string::npos);
}

TEST(CliRate, ValidationErrors) {
    EXPECT_EQ(run({"rate", "--method", "one-step", "--qber", "0.7"}).code, 2);
    EXPECT_EQ(run({"rate", "--method", "bogus", "--qber", "0.1"}).code, 2);
    EXPECT_EQ(run({"rate", "--qber", "0.1"}).code, 2);
    EXPECT_EQ(run({"rate", "--method", "one-step", "--qber", "abc"}).code, 2);
    EXPECT_EQ(run({"nonsense"}).code, 2);
    EXPECT_EQ(run({"rate", "--help"}).code, 0);
}

TEST(CliRate, UnwritableOutput) {
    const Result r = run({"rate", "--method", "one-step", "--qber", "0.02", "--out", "/nonexistent/dir/x.json"});
    EXPECT_EQ(r.code, 4);
}

TEST(CliRate, JsonRoundTripIsByteIdentical) {
    const std::vector<std::vector<std::string>> cases = {
        {"rate", "--method", "one-step", "--qber", "0.02", "--eps0", "0.1", "--eps1", "0.05"},
        {"rate", "--method", "two-step", "--qber", "0.03", "--eps1", "0.1", "--seed", "3"},
        {"verify", "--target", "cross-basis", "--eps0", "0.1", "--grid", "7"},
        {"simulate", "--pulses", "2000", "--seed", "5", "--q10", "0.1", "--q00", "0.9"},
    };
    for (const auto& args : cases) {
        const Result r = run(args);
        ASSERT_EQ(r.code, 0) << args[0] << ": " << r.err;
        EXPECT_EQ(Json::parse(r.out).dump(2) + "\n", r.out) << args[0];
        EXPECT_EQ(r.out.find(" \n"), std::string::npos);
    }
}

TEST(CliSweep, RowCount) {
    const Result r = run({"sweep", "--qber", "0:0.12:0.005", "--dev", "0,0", "--method", "one-step"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto lines = split_lines(r.out);
    ASSERT_EQ(lines.size(), 25u);
    EXPECT_EQ(lines[0], "qber,eps0,eps1,method,rate,rate_clamped");
    EXPECT_EQ(lines[1].rfind("0,0,0,one-step,1,1", 0), 0u);
    EXPECT_EQ(r.out.find('\r'), std::string::npos);
}

TEST(CliSweep, FigureConfigurations) {
    const Result r = run({"sweep", "--qber", "0:0.125:0.005", "--dev", "0,0;0.1,0;0,0.1", "--method",
                          "one-step;two-step", "--seed", "1", "--format", "json"});
    ASSERT_EQ(r.code, 0) << r.err;
    const Json rows = Json::parse(r.out).at("rows");
    ASSERT_EQ(rows.size(), 25u * 3u * 2u);

    std::map<std::string, std::vector<double>> curves;
    for (const Json& row : rows) {
        std::ostringstream key;
        key << row.at("method").get<std::string>() << "@" << row.at("eps0").get<double>() << ","
            << row.at("eps1").get<double>();
        curves[key.str()].push_back(row.at("rate").get<double>());
    }
    for (const auto& [key, curve] : curves) {
        for (std::size_t i = 1; i < curve.size(); ++i) EXPECT_LE(curve[i], curve[i - 1] + 1e-9) << key << " at " << i;
    }
    const auto& one = curves.at("one-step@0,0.1");
    const auto& two = curves.at("two-step@0,0.1");
    for (std::size_t i = 0; i < one.size(); ++i) EXPECT_GE(two[i], one[i] - 1e-6) << "row " << i;
    // 0.03 and 0.04 sit at indices 6 and 8.
    EXPECT_GT(one[6], 0.0);
    EXPECT_LT(one[8], 0.0);
}

TEST(CliSweep, TwoStepNeedsSeed) {
    EXPECT_EQ(run({"sweep", "--qber", "0:0.1:0.05", "--method", "two-step"}).code, 2);
}

TEST(CliSweep, BadRanges) {
    EXPECT_EQ(run({"sweep", "--qber", "0.1:0.05:0.01"}).code, 2);
    EXPECT_EQ(run({"sweep", "--qber", "0:0.6:0.1"}).code, 2);
    EXPECT_EQ(run({"sweep", "--qber", "0:0.1:0"}).code, 2);
    EXPECT_EQ(run({"sweep", "--qber", "0:0.1"}).code, 2);
    EXPECT_EQ(run({"sweep", "--qber", "0:0.1:0.05", "--dev", "0.1"}).code, 2);
}

TEST(CliSweep, UnwritablePath) {
    EXPECT_EQ(run({"sweep", "--qber", "0:0.1:0.05", "--out", "/nonexistent/dir/s.csv"}).code, 4);
}

TEST(CliVerify, Examples) {
    const Result a = run({"verify", "--target", "one-step", "--eps0", "0", "--eps1", "0.1", "--grid", "21"});
    ASSERT_EQ(a.code, 0) << a.err;
    const Json ja = Json::parse(a.out);
    EXPECT_LE(ja.at("tightness_gap").get<double>(), 1e-6);
    EXPECT_TRUE(ja.at("passed").get<bool>());

    const Result b = run({"verify", "--target", "one-step", "--eps0", "0", "--eps1", "0", "--grid", "11"});
    ASSERT_EQ(b.code, 0);
    EXPECT_EQ(Json::parse(b.out).at("max_difference").get<double>(), 0.0);

    const Result c = run({"verify", "--target", "cross-basis", "--eps0", "0.1", "--grid", "21"});
    ASSERT_EQ(c.code, 0);
    EXPECT_NEAR(Json::parse(c.out).at("max_difference").get<double>(), 0.0101020514, 1e-10);
}

TEST(CliVerify, Validation) {
    EXPECT_EQ(run({"verify", "--target", "one-step", "--grid", "2"}).code, 2);
    EXPECT_EQ(run({"verify", "--target", "other"}).code, 2);
}

TEST(CliSimulate, IdentityChannel) {
    const Result r = run({"simulate", "--pulses", "10000", "--seed", "1"});
    ASSERT_EQ(r.code, 0) << r.err;
    const Json j = Json::parse(r.out);
    EXPECT_EQ(j.at("qber_estimate").at("value").get<double>(), 0.0);
    EXPECT_TRUE(j.at("derived_rates").contains("one_step"));
    EXPECT_TRUE(j.at("derived_rates").contains("two_step"));
}

TEST(CliSimulate, ConfigFixture) {
    const Result r = run({"simulate", "--config", WEAKRAND_FIXTURE_DIR "/q10.conf"});
    ASSERT_EQ(r.code, 0) << r.err;
    const Json j = Json::parse(r.out);
    const double n = j.at("qber_estimate").at("samples").get<double>();
    const double sigma = std::sqrt(0.025 * 0.975 / n);
    EXPECT_NEAR(j.at("qber_estimate").at("value").get<double>(), 0.025, 3 * sigma);
    EXPECT_EQ(j.at("qber_dia").at("value").get<double>(), 0.0);
    EXPECT_TRUE(j.at("derived_rates").empty());

    // Flags on the command line win over the file.
    const Result over = run({"simulate", "--config", WEAKRAND_FIXTURE_DIR "/q10.conf", "--pulses", "500"});
    ASSERT_EQ(over.code, 0) << over.err;
    EXPECT_EQ(Json::parse(over.out).at("n_pulses").get<int>(), 500);
}

TEST(CliSimulate, AttackerWithDeterministicBasis) {
    const Result r = run({"simulate", "--pulses", "20000", "--seed", "9", "--p-x1", "1,0", "--attacker",
                          "intercept_resend_with_hints", "--derive-rates", "false"});
    ASSERT_EQ(r.code, 0) << r.err;
    const Json j = Json::parse(r.out);
    EXPECT_EQ(j.at("qber_estimate").at("value").get<double>(), 0.0);
    EXPECT_EQ(j.at("eve_agreement").at("value").get<double>(), 1.0);
}

TEST(CliSimulate, Errors) {
    EXPECT_EQ(run({"simulate", "--pulses", "100"}).code, 2);  // no seed
    const Result bad = run({"simulate", "--pulses", "100", "--seed", "1", "--q00", "0.5"});
    EXPECT_EQ(bad.code, 2);
    EXPECT_NE(bad.err.find("q"), std::string::npos);
    EXPECT_EQ(run({"simulate", "--pulses", "100", "--seed", "1", "--p-x0", "0.5"}).code, 2);
    EXPECT_EQ(run({"simulate", "--config", "/nonexistent/file.conf"}).code, 4);
}

TEST(CliSimulate, DumpCsv) {
    TempDir dir;
    const fs::path dump = dir / "pulses.csv";
    const Result r = run({"simulate", "--pulses", "50", "--seed", "4", "--attacker", "intercept-resend",
                          "--derive-rates", "false", "--dump", dump.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto lines = split_lines(slurp(dump));
    ASSERT_EQ(lines.size(), 51u);
    EXPECT_EQ(lines[0], "lambda0,lambda1,x0,x1,y,bob_bit,sifted,eve_guess");
}

TEST(CliManifest, ReplayReproducesOutput) {
    TempDir dir;
    const fs::path out1 = dir / "a.json";
    const fs::path man = dir / "a.manifest.json";
    const Result first = run({"simulate", "--pulses", "3000", "--seed", "17", "--q01", "0.1", "--q00", "0.9",
                              "--p-x1", "0.6,0.45", "--out", out1.string(), "--manifest", man.string()});
    ASSERT_EQ(first.code, 0) << first.err;
    const Json m = Json::parse(slurp(man));
    EXPECT_EQ(m.at("command"), "simulate");
    EXPECT_EQ(m.at("seed").get<std::uint64_t>(), 17u);
    EXPECT_TRUE(m.contains("timestamp"));
    EXPECT_TRUE(m.contains("tool_version"));

    const fs::path out2 = dir / "b.json";
    const fs::path man2 = dir / "b.manifest.json";
    const Result replay = run({"simulate", "--config", man.string(), "--out", out2.string(), "--manifest", man2.string()});
    ASSERT_EQ(replay.code, 0) << replay.err;
    EXPECT_EQ(slurp(out1), slurp(out2));
    EXPECT_EQ(Json::parse(slurp(man2)).at("checksum_sha256"), m.at("checksum_sha256"));
    EXPECT_EQ(Json::parse(slurp(man2)).at("parameters"), m.at("parameters"));

    // A manifest recorded for another command is rejected.
    EXPECT_EQ(run({"rate", "--config", man.string()}).code, 2);
}

TEST(CliManifest, SweepReplay) {
    TempDir dir;
    const fs::path man = dir / "s.manifest.json";
    const Result first = run({"sweep", "--qber", "0:0.05:0.01", "--dev", "0,0.1;0.1,0", "--method", "one-step;two-step",
                              "--seed", "2", "--manifest", man.string(), "--out", (dir / "s1.csv").string()});
    ASSERT_EQ(first.code, 0) << first.err;
    const Result replay = run({"sweep", "--config", man.string(), "--out", (dir / "s2.csv").string()});
    ASSERT_EQ(replay.code, 0) << replay.err;
    EXPECT_EQ(slurp(dir / "s1.csv"), slurp(dir / "s2.csv"));
    EXPECT_EQ(split_lines(slurp(dir / "s1.csv")).size(), 1u + 5u * 2u * 2u);
}
