#include "wehnet/network_config.hpp"

#include <cmath>

namespace wehnet {

std::vector<std::string> NetworkConfig::violations() const {
    std::vector<std::string> v;
    auto bad = [&](bool cond, const char* msg) {
        if (cond) v.emplace_back(msg);
    };
    bad(!(lambda1 >= 0.0) || !std::isfinite(lambda1), "lambda1 must be >= 0");
    bad(!(lambda2 >= 0.0) || !std::isfinite(lambda2), "lambda2 must be >= 0");
    bad(!(lambdaR >= 0.0) || !std::isfinite(lambdaR), "lambdaR must be >= 0");
    bad(!(lambda1 > 0.0) && !(lambda2 > 0.0),
        "at least one of lambda1, lambda2 must be > 0");
    bad(!(alpha > 2.0), "alpha must be > 2");
    bad(!(pt > 0.0), "pt must be > 0");
    bad(!(pr >= 0.0), "pr must be >= 0");
    bad(!(mu > 0.0), "mu must be > 0");
    bad(!(psi > 0.0), "psi must be > 0");
    bad(!(gamma_star > 0.0), "gamma_star must be > 0");
    bad(!(noise >= 0.0), "noise must be >= 0");
    bad(!(slot_seconds > 0.0), "slot_seconds must be > 0");
    bad(!(battery_joules > 0.0), "battery_joules must be > 0");
    return v;
}

void NetworkConfig::validate() const {
    const auto v = violations();
    if (!v.empty()) throw std::invalid_argument("invalid config: " + v.front());
}

}  // namespace wehnet
