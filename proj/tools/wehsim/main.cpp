// wehsim: analytic evaluation, Monte-Carlo validation, parameter sweeps
// and figure-data export for dense-WSN information exchange with wireless
// energy harvesting.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "wehnet/analytic.hpp"
#include "wehnet/json_io.hpp"
#include "wehnet/simulation.hpp"

namespace {

constexpr int kExitValidationFailed = 1;
constexpr int kExitBadConfig = 2;
constexpr int kExitNumeric = 3;

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

void write_output(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw std::invalid_argument("cannot open output file: " + out_path);
    out << text;
}

wehnet::NetworkConfig load_config(const std::string& path) {
    auto cfg = wehnet::config_from_json_text(slurp(path));
    const auto violations = cfg.violations();
    if (!violations.empty())
        throw std::invalid_argument("invalid config: " + violations.front());
    return cfg;
}

struct SweepSpec {
    std::string variable;
    std::vector<double> grid;  // as given in the file (dB for *_db variables)
    wehnet::NetworkConfig fixed;
};

SweepSpec load_sweep(const std::string& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(slurp(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument(std::string("sweep: JSON parse error: ") + e.what());
    }
    SweepSpec sw;
    if (!j.contains("variable") || !j.at("variable").is_string())
        throw std::invalid_argument("sweep: missing string field 'variable'");
    sw.variable = j.at("variable").get<std::string>();
    static const std::vector<std::string> known = {"gamma_star_db", "lambda1", "lambda2",
                                                   "lambdaR", "psi_db", "mu", "time_cp"};
    if (std::find(known.begin(), known.end(), sw.variable) == known.end())
        throw std::invalid_argument("sweep: unknown variable '" + sw.variable + "'");
    if (!j.contains("grid") || !j.at("grid").is_array() || j.at("grid").empty())
        throw std::invalid_argument("sweep: 'grid' must be a nonempty array");
    for (const auto& v : j.at("grid")) {
        if (!v.is_number()) throw std::invalid_argument("sweep: grid values must be numbers");
        sw.grid.push_back(v.get<double>());
    }
    for (std::size_t i = 1; i < sw.grid.size(); ++i)
        if (!(sw.grid[i] > sw.grid[i - 1]))
            throw std::invalid_argument("sweep: grid must be strictly increasing");
    if (!j.contains("fixed"))
        throw std::invalid_argument("sweep: missing object field 'fixed'");
    sw.fixed = wehnet::config_from_json_text(j.at("fixed").dump());
    const auto violations = sw.fixed.violations();
    if (!violations.empty())
        throw std::invalid_argument("sweep: invalid fixed config: " + violations.front());
    return sw;
}

wehnet::NetworkConfig apply_variable(const wehnet::NetworkConfig& base,
                                     const std::string& variable, double value) {
    wehnet::NetworkConfig cfg = base;
    if (variable == "gamma_star_db")
        cfg.gamma_star = wehnet::db_to_linear(value);
    else if (variable == "psi_db")
        cfg.psi = wehnet::db_to_linear(value);
    else if (variable == "lambda1")
        cfg.lambda1 = value;
    else if (variable == "lambda2")
        cfg.lambda2 = value;
    else if (variable == "lambdaR")
        cfg.lambdaR = value;
    else if (variable == "mu")
        cfg.mu = value;
    return cfg;
}

const char* kReportColumns[] = {
    "p_dc1", "p_dc2", "p_dc", "p_cc_r1", "p_cc_r2", "p_cc",
    "pdps_d1", "pdps_d2", "pdps_c1", "pdps_c2", "pdps_cR",
    "peh_d1", "peh_d2", "peh_c1", "peh_c2", "peh_cR",
    "lifetime_dc", "lifetime_dc_eh", "lifetime_cc_source", "lifetime_cc_relay",
    "lifetime_cc_eh", "s_dc", "s_cc", "tme_dc", "tme_cc", "lambda_opt"};

std::vector<double> report_values(const wehnet::AnalyticReport& r) {
    return {r.p_dc1, r.p_dc2, r.p_dc, r.p_cc_r1, r.p_cc_r2, r.p_cc,
            r.pdps_d1, r.pdps_d2, r.pdps_c1, r.pdps_c2, r.pdps_cR,
            r.peh_d1, r.peh_d2, r.peh_c1, r.peh_c2, r.peh_cR,
            r.lifetime_dc, r.lifetime_dc_eh, r.lifetime_cc_source, r.lifetime_cc_relay,
            r.lifetime_cc_eh, r.s_dc, r.s_cc, r.tme_dc, r.tme_cc, r.lambda_opt};
}

struct McColumn {
    const char* name;
    const wehnet::McEstimate* est;
};

std::vector<McColumn> mc_columns(const wehnet::ValidationEstimates& e) {
    std::vector<McColumn> cols = {
        {"p_dc1", &e.p_dc1},   {"p_dc2", &e.p_dc2},   {"p_dc", &e.p_dc},
        {"pdps_d1", &e.pdps_d1}, {"pdps_d2", &e.pdps_d2},
        {"peh_d1", &e.peh_d1}, {"peh_d2", &e.peh_d2}};
    if (e.has_cc) {
        cols.push_back({"p_cc", &e.p_cc});
        cols.push_back({"pdps_c1", &e.pdps_c1});
        cols.push_back({"pdps_c2", &e.pdps_c2});
        cols.push_back({"pdps_cR", &e.pdps_cR});
        cols.push_back({"peh_c1", &e.peh_c1});
        cols.push_back({"peh_c2", &e.peh_c2});
        cols.push_back({"peh_cR", &e.peh_cR});
    }
    return cols;
}

int cmd_analytic(const std::string& config_path, const std::string& out_path) {
    const auto cfg = load_config(config_path);
    const auto report = wehnet::build_report(cfg);
    write_output(wehnet::report_to_json_text(report), out_path);
    return 0;
}

int cmd_validate(const std::string& config_path, int n, std::uint64_t seed, double side,
                 int threads, int max_rx, const std::string& dump_path,
                 const std::string& out_path) {
    if (n < 100) throw std::invalid_argument("validate: --n must be at least 100");
    const auto cfg = load_config(config_path);
    if (!(cfg.lambda1 > 0.0) || !(cfg.lambda2 > 0.0))
        throw std::invalid_argument("validate: requires lambda1 > 0 and lambda2 > 0");
    const auto report = wehnet::build_report(cfg);

    wehnet::SimOptions opt;
    opt.side = side;
    opt.n_realizations = n;
    opt.master_seed = seed;
    opt.threads = threads;
    opt.max_receivers_per_slot = max_rx;
    opt.dump_csv_path = dump_path;
    const auto est = wehnet::estimate_validation(cfg, opt);

    struct RowSpec {
        const char* name;
        double analytic;
        const wehnet::McEstimate* mc;
        double allowance;  // minimum denominator for the z-score
    };
    // The cooperative exchange probability treats the direct and relayed
    // paths as independent; the simulation keeps their shared-interferer
    // correlation, so its z-score carries the documented 0.03 absolute
    // allowance (|z|<=4 then means |mc-analytic| <= max(4 se, 0.03)).
    std::vector<RowSpec> rows = {{"p_dc1", report.p_dc1, &est.p_dc1, 0.0},
                                 {"p_dc2", report.p_dc2, &est.p_dc2, 0.0},
                                 {"p_dc", report.p_dc, &est.p_dc, 0.0}};
    if (est.has_cc) rows.push_back({"p_cc", report.p_cc, &est.p_cc, 0.03 / 4.0});
    rows.push_back({"pdps_d1", report.pdps_d1, &est.pdps_d1, 0.0});
    rows.push_back({"pdps_d2", report.pdps_d2, &est.pdps_d2, 0.0});
    if (est.has_cc) {
        rows.push_back({"pdps_c1", report.pdps_c1, &est.pdps_c1, 0.0});
        rows.push_back({"pdps_c2", report.pdps_c2, &est.pdps_c2, 0.0});
        rows.push_back({"pdps_cR", report.pdps_cR, &est.pdps_cR, 0.0});
    }
    rows.push_back({"peh_d1", report.peh_d1, &est.peh_d1, 0.0});
    rows.push_back({"peh_d2", report.peh_d2, &est.peh_d2, 0.0});
    if (est.has_cc) {
        rows.push_back({"peh_c1", report.peh_c1, &est.peh_c1, 0.0});
        rows.push_back({"peh_c2", report.peh_c2, &est.peh_c2, 0.0});
        rows.push_back({"peh_cR", report.peh_cR, &est.peh_cR, 0.0});
    }

    std::ostringstream csv;
    csv << "metric,analytic,mc_mean,mc_std_error,z_score\n";
    bool failed = false;
    for (const auto& row : rows) {
        const double denom = std::max(row.mc->std_error, row.allowance);
        double z = 0.0;
        if (denom > 0.0)
            z = (row.mc->mean - row.analytic) / denom;
        else if (row.mc->mean != row.analytic)
            z = std::numeric_limits<double>::infinity();
        if (std::abs(z) > 4.0) failed = true;
        csv << row.name << ',' << fmt(row.analytic) << ',' << fmt(row.mc->mean) << ','
            << fmt(row.mc->std_error) << ',' << fmt(z) << '\n';
    }
    write_output(csv.str(), out_path);
    return failed ? kExitValidationFailed : 0;
}

int cmd_sweep(const std::string& sweep_path, const std::string& mode, int n,
              std::uint64_t seed, double side, int threads, int max_rx,
              const std::string& out_path) {
    if (mode != "analytic" && mode != "simulate" && mode != "both" && mode != "timeseries")
        throw std::invalid_argument("sweep: --mode must be analytic|simulate|both|timeseries");
    const auto sw = load_sweep(sweep_path);

    std::ostringstream csv;

    if (mode == "timeseries" || sw.variable == "time_cp") {
        if (mode != "timeseries" || sw.variable != "time_cp")
            throw std::invalid_argument(
                "sweep: the time series output requires --mode timeseries and variable "
                "'time_cp'");
        // Cumulative successfully exchanged messages per unit area up to a
        // CP index, for both scenarios with and without harvesting.
        const auto& cfg = sw.fixed;
        const auto r = wehnet::build_report(cfg);
        const wehnet::Scenario dc = wehnet::Scenario::direct();
        const wehnet::Scenario cc = wehnet::Scenario::cooperative();
        const double per_cp_dc = (cfg.lambda1 + cfg.lambda2) * r.p_dc;
        const double per_cp_cc = (cfg.lambda1 + cfg.lambda2) * r.p_cc;
        const double life_dc = wehnet::network_lifetime_cps(dc, false, cfg);
        const double life_dc_eh = wehnet::network_lifetime_cps(dc, true, cfg);
        const double life_cc = wehnet::network_lifetime_cps(cc, false, cfg);
        const double life_cc_eh = wehnet::network_lifetime_cps(cc, true, cfg);
        csv << "cp_index,cum_messages_dc,cum_messages_dc_eh,cum_messages_cc,cum_messages_cc_"
               "eh\n";
        for (double wcp : sw.grid) {
            csv << fmt(wcp) << ',' << fmt(per_cp_dc * std::min(wcp, life_dc)) << ','
                << fmt(per_cp_dc * std::min(wcp, life_dc_eh)) << ','
                << fmt(per_cp_cc * std::min(wcp, life_cc)) << ','
                << fmt(per_cp_cc * std::min(wcp, life_cc_eh)) << '\n';
        }
        write_output(csv.str(), out_path);
        return 0;
    }

    const bool want_analytic = mode == "analytic" || mode == "both";
    const bool want_mc = mode == "simulate" || mode == "both";

    csv << sw.variable;
    if (want_analytic)
        for (const char* c : kReportColumns) csv << ',' << c;
    std::optional<wehnet::ValidationEstimates> probe_est;
    if (want_mc) {
        // header needs the metric list, which depends on lambdaR > 0
        const bool has_cc =
            sw.variable == "lambdaR" ? sw.grid.back() > 0.0 : sw.fixed.lambdaR > 0.0;
        wehnet::ValidationEstimates dummy;
        dummy.has_cc = has_cc;
        for (const auto& c : mc_columns(dummy))
            csv << ',' << c.name << "_mc," << c.name << "_se";
    }
    csv << ",error\n";

    for (double value : sw.grid) {
        csv << fmt(value);
        std::string error;
        try {
            const auto cfg = apply_variable(sw.fixed, sw.variable, value);
            const auto violations = cfg.violations();
            if (!violations.empty())
                throw std::invalid_argument("invalid config: " + violations.front());
            if (want_analytic) {
                const auto r = wehnet::build_report(cfg);
                for (double v : report_values(r)) csv << ',' << fmt(v);
            }
            if (want_mc) {
                wehnet::SimOptions opt;
                opt.side = side;
                opt.n_realizations = n;
                opt.master_seed = seed;
                opt.threads = threads;
                opt.max_receivers_per_slot = max_rx;
                const auto est = wehnet::estimate_validation(cfg, opt);
                for (const auto& c : mc_columns(est))
                    csv << ',' << fmt(c.est->mean) << ',' << fmt(c.est->std_error);
            }
        } catch (const std::exception& e) {
            error = e.what();
            for (char& ch : error)
                if (ch == ',' || ch == '\n') ch = ';';
        }
        csv << ',' << error << '\n';
    }
    write_output(csv.str(), out_path);
    return 0;
}

int cmd_optimal(const std::string& config_path, const std::string& out_path) {
    const auto cfg = load_config(config_path);
    const auto opt = wehnet::optimal_intensity(cfg);
    nlohmann::ordered_json j;
    j["numeric"] = opt.numeric;
    if (std::isnan(opt.closed_form)) {
        j["closed_form"] = nullptr;
        j["relative_gap"] = nullptr;
    } else {
        j["closed_form"] = opt.closed_form;
        j["relative_gap"] = opt.relative_gap;
    }
    j["warning"] = opt.warning;
    write_output(j.dump(2) + "\n", out_path);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Information-exchange and energy-harvesting model for dense random "
        "sensor deployments: closed-form metrics and Monte-Carlo validation"};
    app.require_subcommand(1);

    std::string config_path, sweep_path, out_path, mode = "analytic", dump_path;
    int n = 1000, threads = 0, max_rx = 256;
    std::uint64_t seed = 1;
    double side = 200.0;

    auto add_common = [&](CLI::App* sub, bool with_sim) {
        sub->add_option("--out", out_path, "Output path (default: stdout)");
        if (with_sim) {
            sub->add_option("--n", n, "Number of Monte-Carlo realizations");
            sub->add_option("--seed", seed, "Master seed (uint64)");
            sub->add_option("--side", side, "Window side in meters");
            sub->add_option("--threads", threads, "Worker threads (0 = hardware)");
            sub->add_option("--max-receivers", max_rx,
                            "Receiver probes per slot and realization (0 = all)");
        }
    };

    auto* analytic = app.add_subcommand("analytic", "Evaluate the closed-form report");
    analytic->add_option("--config", config_path, "Config JSON path")->required();
    add_common(analytic, false);

    auto* validate =
        app.add_subcommand("validate", "Compare closed forms against simulation");
    validate->add_option("--config", config_path, "Config JSON path")->required();
    validate->add_option("--dump", dump_path, "Per-realization record CSV path");
    add_common(validate, true);

    auto* sweep = app.add_subcommand("sweep", "Evaluate a parameter sweep to CSV");
    sweep->add_option("--sweep", sweep_path, "Sweep spec JSON path")->required();
    sweep->add_option("--mode", mode, "analytic | simulate | both | timeseries");
    add_common(sweep, true);

    auto* optimal =
        app.add_subcommand("optimal", "Transmitter intensity maximizing harvested power");
    optimal->add_option("--config", config_path, "Config JSON path")->required();
    add_common(optimal, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) ? kExitBadConfig : 0;
    }

    try {
        if (app.got_subcommand(analytic)) return cmd_analytic(config_path, out_path);
        if (app.got_subcommand(validate))
            return cmd_validate(config_path, n, seed, side, threads, max_rx, dump_path,
                                out_path);
        if (app.got_subcommand(sweep))
            return cmd_sweep(sweep_path, mode, n, seed, side, threads, max_rx, out_path);
        if (app.got_subcommand(optimal)) return cmd_optimal(config_path, out_path);
    } catch (const wehnet::QuadratureError& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const wehnet::OptimizationError& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumeric;
    }
    return 0;
}
