#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <json.hpp>

#include "wehnet/json_io.hpp"

namespace {

namespace fs = std::filesystem;

struct RunResult {
    int exit_code = -1;
    std::string output;
};

RunResult run(const std::string& args) {
    const std::string cmd = std::string(WEHSIM_BINARY) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    EXPECT_NE(pipe, nullptr);
    RunResult res;
    char buf[4096];
    std::size_t got;
    while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) res.output.append(buf, got);
    const int status = pclose(pipe);
    res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return res;
}

fs::path write_temp(const std::string& name, const std::string& text) {
    const fs::path p = fs::temp_directory_path() / name;
    std::ofstream out(p);
    out << text;
    return p;
}

std::string default_config_text() {
    return wehnet::config_to_json_text(wehnet::NetworkConfig::defaults());
}

TEST(CliAnalytic, ReportsCoherentJson) {
    const auto cfg = write_temp("wehnet_cli_cfg.json", default_config_text());
    const auto r = run("analytic --config " + cfg.string());
    ASSERT_EQ(r.exit_code, 0) << r.output;
    const auto j = nlohmann::json::parse(r.output);
    EXPECT_GE(j.at("p_cc").get<double>(), j.at("p_dc").get<double>());
    EXPECT_GT(j.at("p_dc").get<double>(), 0.0);
    EXPECT_LT(j.at("p_dc").get<double>(), 1.0);
}

TEST(CliAnalytic, RejectsAlphaTwo) {
    auto cfg = wehnet::NetworkConfig::defaults();
    cfg.alpha = 2.0;
    const auto p = write_temp("wehnet_cli_alpha2.json", wehnet::config_to_json_text(cfg));
    const auto r = run("analytic --config " + p.string());
    EXPECT_EQ(r.exit_code, 2);
    EXPECT_NE(r.output.find("alpha"), std::string::npos);
}

TEST(CliAnalytic, RejectsEmptySourceSet) {
    auto cfg = wehnet::NetworkConfig::defaults();
    cfg.lambda1 = 0.0;
    const auto p = write_temp("wehnet_cli_l1.json", wehnet::config_to_json_text(cfg));
    EXPECT_EQ(run("analytic --config " + p.string()).exit_code, 2);
}

TEST(CliAnalytic, RejectsMissingField) {
    const auto p = write_temp("wehnet_cli_missing.json", R"({"lambda1": 0.1})");
    const auto r = run("analytic --config " + p.string());
    EXPECT_EQ(r.exit_code, 2);
}

TEST(CliAnalytic, RejectsMissingFile) {
    EXPECT_EQ(run("analytic --config /nonexistent/cfg.json").exit_code, 2);
}

TEST(CliValidate, RejectsSmallN) {
    const auto cfg = write_temp("wehnet_cli_cfg2.json", default_config_text());
    const auto r = run("validate --config " + cfg.string() + " --n 10 --seed 1");
    EXPECT_EQ(r.exit_code, 2);
}

TEST(CliSweep, GammaSweepIsMonotone) {
    const auto cfg_json = nlohmann::json::parse(default_config_text());
    nlohmann::json sw = {{"variable", "gamma_star_db"},
                         {"grid", {-10.0, -5.0, 0.0, 5.0, 10.0}},
                         {"fixed", cfg_json}};
    const auto p = write_temp("wehnet_cli_sweep.json", sw.dump());
    const auto r = run("sweep --sweep " + p.string() + " --mode analytic");
    ASSERT_EQ(r.exit_code, 0) << r.output;

    std::istringstream lines(r.output);
    std::string header;
    std::getline(lines, header);
    EXPECT_EQ(header.rfind("gamma_star_db,p_dc1,", 0), 0u);
    EXPECT_NE(header.find(",lambda_opt,error"), std::string::npos);

    double prev = 2.0;
    std::string line;
    int rows = 0;
    while (std::getline(lines, line)) {
        std::istringstream cells(line);
        std::string cell;
        std::getline(cells, cell, ',');  // grid value
        std::getline(cells, cell, ',');  // p_dc1
        std::getline(cells, cell, ',');
        std::getline(cells, cell, ',');  // p_dc
        const double pdc = std::stod(cell);
        EXPECT_LT(pdc, prev);
        prev = pdc;
        EXPECT_EQ(line.back() == ',', true) << "error column should be empty: " << line;
        ++rows;
    }
    EXPECT_EQ(rows, 5);
}

TEST(CliSweep, RejectsNonIncreasingGrid) {
    const auto cfg_json = nlohmann::json::parse(default_config_text());
    nlohmann::json sw = {{"variable", "mu"}, {"grid", {1.0, 0.5}}, {"fixed", cfg_json}};
    const auto p = write_temp("wehnet_cli_sweep_bad.json", sw.dump());
    EXPECT_EQ(run("sweep --sweep " + p.string()).exit_code, 2);
}

TEST(CliSweep, PerPointErrorsAreRecorded) {
    const auto cfg_json = nlohmann::json::parse(default_config_text());
    nlohmann::json sw = {{"variable", "lambda1"}, {"grid", {0.0, 0.1}}, {"fixed", cfg_json}};
    const auto p = write_temp("wehnet_cli_sweep_err.json", sw.dump());
    const auto r = run("sweep --sweep " + p.string() + " --mode analytic");
    ASSERT_EQ(r.exit_code, 0) << r.output;
    std::istringstream lines(r.output);
    std::string header, row0, row1;
    std::getline(lines, header);
    std::getline(lines, row0);
    std::getline(lines, row1);
    EXPECT_NE(row0.find("lambda1"), std::string::npos);  // error text mentions the field
    EXPECT_EQ(row1.back(), ',');                         // clean point, empty error cell
}

TEST(CliSweep, TimeSeriesMode) {
    const auto cfg_json = nlohmann::json::parse(default_config_text());
    nlohmann::json sw = {{"variable", "time_cp"},
                         {"grid", {100.0, 3000.0, 10000.0}},
                         {"fixed", cfg_json}};
    const auto p = write_temp("wehnet_cli_sweep_ts.json", sw.dump());
    const auto r = run("sweep --sweep " + p.string() + " --mode timeseries");
    ASSERT_EQ(r.exit_code, 0) << r.output;
    std::istringstream lines(r.output);
    std::string header;
    std::getline(lines, header);
    EXPECT_EQ(header,
              "cp_index,cum_messages_dc,cum_messages_dc_eh,cum_messages_cc,"
              "cum_messages_cc_eh");
    double prev_dc = -1.0;
    std::string line;
    int rows = 0;
    while (std::getline(lines, line)) {
        std::istringstream cells(line);
        std::string cell;
        std::getline(cells, cell, ',');
        std::getline(cells, cell, ',');
        const double cum = std::stod(cell);
        EXPECT_GE(cum, prev_dc);
        prev_dc = cum;
        ++rows;
    }
    EXPECT_EQ(rows, 3);
}

TEST(CliOptimal, DefaultsLandInRange) {
    const auto cfg = write_temp("wehnet_cli_cfg3.json", default_config_text());
    const auto r = run("optimal --config " + cfg.string());
    ASSERT_EQ(r.exit_code, 0) << r.output;
    const auto j = nlohmann::json::parse(r.output);
    const double numeric = j.at("numeric").get<double>();
    EXPECT_GT(numeric, 0.3);
    EXPECT_LT(numeric, 0.7);
    EXPECT_TRUE(j.contains("closed_form"));
    EXPECT_TRUE(j.contains("warning"));
}

TEST(CliOptimal, MonotoneRectennaFailsToBracket) {
    auto cfg = wehnet::NetworkConfig::defaults();
    cfg.rectenna = {0.0, 0.0, 0.03, 0.3};
    const auto p = write_temp("wehnet_cli_mono.json", wehnet::config_to_json_text(cfg));
    EXPECT_EQ(run("optimal --config " + p.string()).exit_code, 3);
}

TEST(CliParsing, UnknownSubcommand) {
    EXPECT_EQ(run("fly --config x.json").exit_code, 2);
}

}  // namespace
