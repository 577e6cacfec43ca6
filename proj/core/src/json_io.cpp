#include "wehnet/json_io.hpp"

#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace wehnet {

namespace {

using ordered_json = nlohmann::ordered_json;

double require_number(const nlohmann::json& j, const std::string& key) {
    if (!j.contains(key))
        throw std::invalid_argument("config: missing field '" + key + "'");
    const auto& v = j.at(key);
    if (!v.is_number())
        throw std::invalid_argument("config: field '" + key + "' must be a number");
    return v.get<double>();
}

void emit(ordered_json& j, const char* key, double v) {
    if (std::isnan(v))
        j[key] = nullptr;
    else if (std::isinf(v))
        j[key] = v > 0 ? "inf" : "-inf";
    else
        j[key] = v;
}

}  // namespace

NetworkConfig config_from_json_text(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument(std::string("config: JSON parse error: ") + e.what());
    }
    if (!j.is_object()) throw std::invalid_argument("config: expected a JSON object");

    NetworkConfig cfg;
    cfg.lambda1 = require_number(j, "lambda1");
    cfg.lambda2 = require_number(j, "lambda2");
    cfg.lambdaR = require_number(j, "lambdaR");
    cfg.pt = require_number(j, "pt");
    cfg.pr = require_number(j, "pr");
    cfg.alpha = require_number(j, "alpha");
    cfg.mu = require_number(j, "mu");
    cfg.noise = require_number(j, "noise");
    cfg.gamma_star = require_number(j, "gamma_star");
    cfg.psi = require_number(j, "psi");
    cfg.slot_seconds = require_number(j, "slot_seconds");
    cfg.battery_joules = require_number(j, "battery_joules");
    if (!j.contains("rectenna") || !j.at("rectenna").is_object())
        throw std::invalid_argument("config: missing object field 'rectenna'");
    const auto& r = j.at("rectenna");
    cfg.rectenna.a3 = require_number(r, "a3");
    cfg.rectenna.a2 = require_number(r, "a2");
    cfg.rectenna.a1 = require_number(r, "a1");
    cfg.rectenna.a0 = require_number(r, "a0");
    return cfg;
}

std::string config_to_json_text(const NetworkConfig& cfg) {
    ordered_json j;
    j["lambda1"] = cfg.lambda1;
    j["lambda2"] = cfg.lambda2;
    j["lambdaR"] = cfg.lambdaR;
    j["pt"] = cfg.pt;
    j["pr"] = cfg.pr;
    j["alpha"] = cfg.alpha;
    j["mu"] = cfg.mu;
    j["noise"] = cfg.noise;
    j["gamma_star"] = cfg.gamma_star;
    j["psi"] = cfg.psi;
    j["slot_seconds"] = cfg.slot_seconds;
    j["battery_joules"] = cfg.battery_joules;
    j["rectenna"] = {{"a3", cfg.rectenna.a3},
                     {"a2", cfg.rectenna.a2},
                     {"a1", cfg.rectenna.a1},
                     {"a0", cfg.rectenna.a0}};
    return j.dump(2) + "\n";
}

std::string report_to_json_text(const AnalyticReport& r) {
    ordered_json j;
    emit(j, "p_dc1", r.p_dc1);
    emit(j, "p_dc2", r.p_dc2);
    emit(j, "p_dc", r.p_dc);
    emit(j, "p_cc_r1", r.p_cc_r1);
    emit(j, "p_cc_r2", r.p_cc_r2);
    emit(j, "p_cc", r.p_cc);
    emit(j, "pdps_d1", r.pdps_d1);
    emit(j, "pdps_d2", r.pdps_d2);
    emit(j, "pdps_c1", r.pdps_c1);
    emit(j, "pdps_c2", r.pdps_c2);
    emit(j, "pdps_cR", r.pdps_cR);
    emit(j, "peh_d1", r.peh_d1);
    emit(j, "peh_d2", r.peh_d2);
    emit(j, "peh_c1", r.peh_c1);
    emit(j, "peh_c2", r.peh_c2);
    emit(j, "peh_cR", r.peh_cR);
    emit(j, "lifetime_dc", r.lifetime_dc);
    emit(j, "lifetime_dc_eh", r.lifetime_dc_eh);
    emit(j, "lifetime_cc_source", r.lifetime_cc_source);
    emit(j, "lifetime_cc_relay", r.lifetime_cc_relay);
    emit(j, "lifetime_cc_eh", r.lifetime_cc_eh);
    emit(j, "s_dc", r.s_dc);
    emit(j, "s_cc", r.s_cc);
    emit(j, "tme_dc", r.tme_dc);
    emit(j, "tme_cc", r.tme_cc);
    emit(j, "lambda_opt", r.lambda_opt);
    return j.dump(2) + "\n";
}

}  // namespace wehnet
