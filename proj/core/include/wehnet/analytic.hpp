#pragma once

#include <stdexcept>

#include "wehnet/network_config.hpp"
#include "wehnet/quadrature.hpp"

namespace wehnet {

enum class NodeRole { Source1, Source2, Relay };

/// Closed-form metrics for one configuration. Probabilities are
/// dimensionless, harvested powers in watts, lifetimes in communication
/// periods (+inf when harvesting covers consumption), throughput in
/// messages/s/m^2.
struct AnalyticReport {
    double p_dc1 = 0, p_dc2 = 0, p_dc = 0;
    double p_cc_r1 = 0, p_cc_r2 = 0, p_cc = 0;
    double pdps_d1 = 0, pdps_d2 = 0, pdps_c1 = 0, pdps_c2 = 0, pdps_cR = 0;
    double peh_d1 = 0, peh_d2 = 0, peh_c1 = 0, peh_c2 = 0, peh_cR = 0;
    double lifetime_dc = 0, lifetime_dc_eh = 0;
    double lifetime_cc_source = 0, lifetime_cc_relay = 0, lifetime_cc_eh = 0;
    double s_dc = 0, s_cc = 0;
    double tme_dc = 0, tme_cc = 0;
    double lambda_opt = 0;
};

/// Interference shape constant 1 + g^{2/a} int_{g^{-2/a}}^inf du/(1+u^{a/2}).
/// The reciprocal is the interference-limited slot success probability.
double interference_shape(double gamma_star, double alpha);

/// Probability that a receiver decodes its nearest transmitter (intensity
/// lambda_tx) in one slot, under power splitting. Two conditional branches:
/// the poor-fade branch integrates the coverage kernel, the good-fade
/// branch integrates the interference Laplace transform expressed through
/// the Gauss hypergeometric function. Valid for any alpha > 2.
double slot_success_probability(double lambda_tx, const NetworkConfig& cfg);

/// Specialized alpha = 4 route: the poor-fade branch collapses to a scaled
/// complementary error function and the hypergeometric kernel to arctan.
/// Requires cfg.alpha == 4. Matches slot_success_probability to ~1e-9.
double slot_success_probability_alpha4(double lambda_tx, const NetworkConfig& cfg);

/// Both source sets decode in their slot: product of the two slot
/// probabilities.
double exchange_probability_direct(const NetworkConfig& cfg);

/// Relay path success for messages originating at the given source set:
/// relay decodes the source, destination decodes the relay.
double relay_path_probability(double lambda_src, const NetworkConfig& cfg);

/// Direct-or-relayed exchange for both sets within one 4-slot period.
double exchange_probability_cooperative(const NetworkConfig& cfg);

/// E{min(1, r^-alpha)} over the distance r to the nearest point of a PPP
/// with the given intensity. Closed forms for alpha in {3,4,5}, quadrature
/// otherwise.
double mean_nearest_pathloss(double lambda, double alpha);

/// Quadrature evaluation of the same expectation, kept as an independent
/// cross-check of the closed forms.
double mean_nearest_pathloss_quadrature(double lambda, double alpha);

/// Mean RF power harvested per receive slot (before RF-to-DC conversion)
/// by a node listening to a transmitter set of the given intensity, under
/// the power-splitting rule and bounded path loss.
double mean_harvested_rf_power(double lambda_tx, const NetworkConfig& cfg);

/// Applies the rectenna cubic (on dBm) to a pre-conversion power.
double converted_harvested_power(double pdps_watts, const RectennaModel& m);

/// Cooperative pre-conversion harvested power: sum of the two receive
/// slots (other source set + relays for a source; both source sets for a
/// relay).
double mean_harvested_rf_power_cc(NodeRole role, const NetworkConfig& cfg);

/// Cooperative post-conversion harvested power. The rectenna cubic is
/// applied per receive slot and the two converted powers are summed: the
/// converter sees each slot's input power separately.
double converted_harvested_power_cc(NodeRole role, const NetworkConfig& cfg);

/// Mean per-CP battery drain [W * slot] for a role, excluding harvesting.
double cp_consumption(Scenario sc, NodeRole role, const NetworkConfig& cfg);

/// Mean converted harvested power credited per CP for a role.
double cp_harvest(Scenario sc, NodeRole role, const NetworkConfig& cfg);

/// Node lifetime in communication periods; +inf when the harvested power
/// covers the consumption.
double lifetime_cps(Scenario sc, bool with_harvesting, NodeRole role,
                    const NetworkConfig& cfg);

/// First-depleted-role lifetime (sources for DC; sources and relays for CC).
double network_lifetime_cps(Scenario sc, bool with_harvesting, const NetworkConfig& cfg);

/// Successfully exchanged messages per second per unit area.
double spatial_throughput(Scenario sc, const NetworkConfig& cfg);

/// Messages exchanged per unit area over the (harvesting-assisted) network
/// lifetime: spatial throughput x lifetime in CPs x slots per CP.
double total_messages_exchanged(Scenario sc, const NetworkConfig& cfg);

/// Thrown when a bracketed maximization cannot find an interior maximum.
class OptimizationError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct OptimalIntensity {
    double numeric = 0;      // bracketed maximizer of the converted power
    double closed_form = 0;  // cubic-root expression, for cross-checking
    double relative_gap = 0;
    bool warning = false;    // gap above 5%
};

/// Transmitter intensity that maximizes the post-conversion harvested
/// power of the listening set. The numeric maximizer is authoritative; the
/// closed form is reported for comparison.
OptimalIntensity optimal_intensity(const NetworkConfig& cfg);

/// Evaluates every report field for one configuration.
AnalyticReport build_report(const NetworkConfig& cfg);

}  // namespace wehnet
