#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace wehnet {

/// Cubic fit of the rectenna RF-to-DC conversion efficiency. The polynomial
/// is evaluated on input power expressed in dBm and the result is clamped
/// to [0,1].
struct RectennaModel {
    double a3 = -4.6e-5;
    double a2 = -7.8e-4;
    double a1 = 0.03;
    double a0 = 0.62;
};

enum class ScenarioKind { DirectCommunication, CooperativeCommunication };

/// A communication period is 2 slots for direct exchange and 4 when relays
/// retransmit.
struct Scenario {
    ScenarioKind kind = ScenarioKind::DirectCommunication;

    int slots_per_cp() const {
        return kind == ScenarioKind::DirectCommunication ? 2 : 4;
    }
    static Scenario direct() { return {ScenarioKind::DirectCommunication}; }
    static Scenario cooperative() { return {ScenarioKind::CooperativeCommunication}; }
};

/// All physical and protocol parameters. Powers in watts, intensities in
/// nodes/m^2, gamma_star and psi are linear ratios (dB conversion happens
/// at the CLI boundary).
struct NetworkConfig {
    double lambda1 = 0.1;    // intensity of the first source set
    double lambda2 = 0.5;    // intensity of the second source set
    double lambdaR = 0.25;   // relay intensity
    double pt = 0.075;       // transmit power [W]
    double pr = 0.1;         // reception-mode power draw [W]
    double alpha = 4.0;      // path-loss exponent, > 2
    double mu = 1.0;         // rate of the exponential power fading
    double noise = 3.9810717055349694e-16;  // additive noise power [W] (-124 dBm)
    double gamma_star = 1.0; // decoding SINR threshold, linear
    double psi = 0.1;        // power-splitting parameter, linear
    double slot_seconds = 1.0;
    double battery_joules = 1000.0;
    RectennaModel rectenna;

    /// Reference parameter set used throughout the docs and tests.
    static NetworkConfig defaults() { return NetworkConfig{}; }

    /// Returns the list of violated invariants (empty when valid).
    std::vector<std::string> violations() const;

    /// Throws std::invalid_argument naming the first violated invariant.
    void validate() const;
};

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }
inline double watts_to_dbm(double w) { return 10.0 * std::log10(w * 1e3); }

}  // namespace wehnet
