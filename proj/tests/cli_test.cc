// Copyright 2026 The starlab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <sys/wait.h>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

namespace {

struct RunResult {
    int code = -1;
    std::string out;
};

RunResult run(const std::string &args) {
    std::string cmd = std::string(STARLAB_BIN) + " " + args + " 2>/dev/null";
    RunResult r;
    FILE *f = popen(cmd.c_str(), "r");
    if (!f) {
        return r;
    }
    char buf[4096];
    size_t n;
    while ((n = fread(buf, 1, sizeof buf, f)) > 0) {
        r.out.append(buf, n);
    }
    int status = pclose(f);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string temp_file(const std::string &name, const std::string &content) {
    std::string path = ::testing::TempDir() + "/starlab_" + name;
    std::ofstream(path) << content;
    return path;
}

std::vector<std::string> lines(const std::string &s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    for (std::string l; std::getline(in, l);) {
        out.push_back(l);
    }
    return out;
}

/// Value of `column` in the first data row of a CSV report.
std::string csv_value(const std::string &report, const std::string &column) {
    auto ls = lines(report);
    if (ls.size() < 3) {
        return "";
    }
    std::vector<std::string> head, row;
    std::istringstream h(ls[1]), r(ls[2]);
    for (std::string c; std::getline(h, c, ',');) {
        head.push_back(c);
    }
    for (std::string c; std::getline(r, c, ',');) {
        row.push_back(c);
    }
    for (size_t i = 0; i < head.size() && i < row.size(); i++) {
        if (head[i] == column) {
            return row[i];
        }
    }
    return "";
}

const char *kPrep = "prep-sim --shots 3000 --p 2e-3 --theta 0.05";

}  // namespace

TEST(Cli, SameSeedGivesIdenticalBytes) {
    auto a = run(std::string(kPrep) + " --seed 9 --threads 1");
    auto b = run(std::string(kPrep) + " --seed 9 --threads 1");
    auto c = run(std::string(kPrep) + " --seed 9 --threads 3");
    ASSERT_EQ(a.code, 0);
    EXPECT_EQ(a.out, b.out);
    EXPECT_EQ(a.out, c.out);
    auto d = run(std::string(kPrep) + " --seed 10");
    EXPECT_NE(a.out, d.out);
}

TEST(Cli, OutputFileMatchesStdout) {
    std::string path = ::testing::TempDir() + "/starlab_out.csv";
    auto a = run(std::string(kPrep) + " --seed 4 -o " + path);
    ASSERT_EQ(a.code, 0);
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    EXPECT_EQ(ss.str(), run(std::string(kPrep) + " --seed 4").out);
}

TEST(Cli, CsvHeaderEchoesVersionAndConfig) {
    for (const char *cmd : {"prep-sim --shots 100", "rus-factor", "control-error --samples 5", "estimate --W 10", "angle-budget",
                            "hubbard-info"}) {
        auto r = run(std::string(cmd) + " --seed 3");
        ASSERT_EQ(r.code, 0) << cmd;
        auto ls = lines(r.out);
        ASSERT_GE(ls.size(), 3u) << cmd;
        std::string prefix = std::string("# starlab ") + STARLAB_VERSION + " ";
        EXPECT_EQ(ls[0].rfind(prefix, 0), 0u) << ls[0];
        auto echo = nlohmann::json::parse(ls[0].substr(ls[0].find('{')));
        EXPECT_EQ(echo["seed"], 3);
        EXPECT_TRUE(echo["config"].is_object());
    }
}

TEST(Cli, JsonFormat) {
    auto r = run("rus-factor --k 2,3 --theta 1e-3,1e-2 --format json");
    ASSERT_EQ(r.code, 0);
    auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j["command"], "rus-factor");
    EXPECT_EQ(j["version"], STARLAB_VERSION);
    ASSERT_EQ(j["rows"].size(), 4u);
    EXPECT_EQ(j["rows"][3]["k"], 3);
    auto e = nlohmann::json::parse(run("estimate --W 10 --format json").out);
    EXPECT_FALSE(e["rows"][0]["details"]["ledger"].empty());
}

TEST(Cli, ConfigFileAndFlagOverride) {
    auto cfg = temp_file("cfg.json", R"({"model": {"lx": 8, "ly": 8}, "device": {"p": 1e-4}, "target_d": 11})");
    auto r = run("estimate -c " + cfg);
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(csv_value(r.out, "physical_qubits"), "48642");
    EXPECT_EQ(csv_value(r.out, "d"), "11");
    auto o = run("estimate -c " + cfg + " --lx 6 --ly 6");
    EXPECT_EQ(csv_value(o.out, "physical_qubits"), "28314");
}

TEST(Cli, KnownValues) {
    auto h = run("hubbard-info --lx 8 --ly 8");
    EXPECT_EQ(csv_value(h.out, "L"), "576");
    EXPECT_EQ(csv_value(h.out, "lambda"), "320");
    auto a = run("angle-budget");
    EXPECT_NEAR(std::stod(csv_value(a.out, "max_evolution_time")), 19.05, 0.01);
    EXPECT_NEAR(std::stod(csv_value(a.out, "lambda_bound")), 222.2, 0.1);
    auto z = run("prep-sim --p 0 --shots 500");
    EXPECT_EQ(csv_value(z.out, "infidelity"), "0");
}

TEST(Cli, HamiltonianDumpRoundTrip) {
    std::string path = ::testing::TempDir() + "/starlab_h.jsonl";
    auto a = run("hubbard-info --lx 3 --ly 4 --dump " + path);
    auto b = run("hubbard-info --model file --hamiltonian " + path);
    ASSERT_EQ(a.code, 0);
    ASSERT_EQ(b.code, 0);
    for (const char *col : {"L", "lambda", "c_av", "n_qubits"}) {
        EXPECT_EQ(csv_value(a.out, col), csv_value(b.out, col)) << col;
    }
}

TEST(Cli, ConfigErrorsExitTwo) {
    EXPECT_EQ(run("").code, 2);
    EXPECT_EQ(run("prep-sim --bogus 1").code, 2);
    EXPECT_EQ(run("prep-sim --d 7").code, 2);
    EXPECT_EQ(run("prep-sim --p 1.5").code, 2);
    EXPECT_EQ(run("prep-sim --mode XX").code, 2);
    EXPECT_EQ(run("prep-sim --shots abc").code, 2);
    EXPECT_EQ(run("estimate").code, 2);
    EXPECT_EQ(run("estimate --W 1 --target-d 5").code, 2);
    EXPECT_EQ(run("hubbard-info --t 0 --U 0").code, 2);
    EXPECT_EQ(run("hubbard-info --model file --hamiltonian /nonexistent").code, 2);
    EXPECT_EQ(run("rus-factor --format xml").code, 2);
    EXPECT_EQ(run("estimate -c " + temp_file("bad.json", "{\"W\": 1, \"colour\": 2}")).code, 2);
    EXPECT_EQ(run("estimate -c " + temp_file("bad2.json", "{\"device\": {\"q\": 1}}")).code, 2);
    EXPECT_EQ(run("estimate -c " + temp_file("bad3.json", "{\"W\": \"ten\"}")).code, 2);
    EXPECT_EQ(run("estimate -c " + temp_file("bad4.json", "{not json")).code, 2);
}

TEST(Cli, NumericalFailureExitsThree) {
    EXPECT_EQ(run("estimate --W 1e300 --p 9e-3").code, 3);
}

TEST(Cli, VersionAndHelp) {
    auto v = run("--version");
    EXPECT_EQ(v.code, 0);
    EXPECT_NE(v.out.find(STARLAB_VERSION), std::string::npos);
    EXPECT_EQ(run("--help").code, 0);
}
