#pragma once

#include <string>

#include "wehnet/analytic.hpp"
#include "wehnet/network_config.hpp"

namespace wehnet {

/// Parses the flat config schema (lambda1, lambda2, lambdaR, pt, pr,
/// alpha, mu, noise, gamma_star, psi, slot_seconds, battery_joules,
/// rectenna:{a3,a2,a1,a0}); every field is required. Throws
/// std::invalid_argument on missing or non-numeric fields. Does not
/// validate physical invariants; call cfg.validate() for that.
NetworkConfig config_from_json_text(const std::string& text);

std::string config_to_json_text(const NetworkConfig& cfg);

/// Stable-key-order report serialization. Infinite lifetimes are emitted
/// as the string "inf", undefined values as null.
std::string report_to_json_text(const AnalyticReport& r);

}  // namespace wehnet
