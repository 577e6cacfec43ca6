#include "wehnet/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "wehnet/radio.hpp"
#include "wehnet/special_functions.hpp"

namespace wehnet {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Interference integral behind the good-fade branch:
//   J(r) = int_r^inf u / (1 + beta u^alpha) du,
// with beta = 1/(g r^alpha) - phi and phi = N/(Pt psi). Expressed through
// 2F1(1, 1-2/a; 2-2/a; -1/(beta r^alpha)); the argument runs over (-inf, 0).
double interference_tail(double r, double gamma_star, double alpha, double phi) {
    const double beta_ralpha = 1.0 / gamma_star - phi * std::pow(r, alpha);
    if (beta_ralpha <= 1e-250) return kInf;  // past the noise cutoff radius
    const double z = -1.0 / beta_ralpha;
    const double f = hyp2f1(1.0, 1.0 - 2.0 / alpha, 2.0 - 2.0 / alpha, z);
    return r * r / (beta_ralpha * (alpha - 2.0)) * f;
}

double clamp01(double p) { return std::clamp(p, 0.0, 1.0); }

// Upper integration radius: beyond max(cutoff, where exp(-pi l r^2) is
// dead) the integrand contributes nothing.
double integration_radius(double lambda, double r_cutoff) {
    const double r_gauss = 32.0 / std::sqrt(kPi * lambda);
    return std::min(r_cutoff, r_gauss);
}

}  // namespace

double interference_shape(double gamma_star, double alpha) {
    if (alpha == 4.0) {
        const double s = std::sqrt(gamma_star);
        return 1.0 + s * std::atan(s);
    }
    const double lo = std::pow(gamma_star, -2.0 / alpha);
    const double rho = std::pow(gamma_star, 2.0 / alpha) *
                       integrate_semi_infinite(
                           [&](double u) { return 1.0 / (1.0 + std::pow(u, alpha / 2.0)); }, lo);
    return 1.0 + rho;
}

double slot_success_probability(double lambda_tx, const NetworkConfig& cfg) {
    if (!(lambda_tx > 0.0))
        throw std::domain_error("slot_success_probability: lambda_tx must be > 0");
    const double g = cfg.gamma_star;
    const double a = cfg.alpha;
    const double shape = interference_shape(g, a);
    const double pl = kPi * lambda_tx;
    const double split_lo = 1.0 - std::exp(-cfg.mu * cfg.psi);
    const double split_hi = std::exp(-cfg.mu * cfg.psi);

    // Poor-fade branch (decoder gets the whole signal): coverage kernel in
    // the squared-distance variable with noise exponent mu g N / Pt.
    const double omega = cfg.mu * g * cfg.noise / cfg.pt;
    double term1;
    if (omega == 0.0) {
        term1 = split_lo / shape;
    } else {
        term1 = split_lo * pl *
                integrate_semi_infinite(
                    [&](double v) {
                        return std::exp(-pl * shape * v - omega * std::pow(v, a / 2.0));
                    },
                    0.0);
    }

    // Good-fade branch: Laplace transform of the interference evaluated at
    // the fade threshold, averaged over the nearest-transmitter distance.
    const double phi = cfg.noise / (cfg.pt * cfg.psi);
    const double r_cut = phi > 0.0 ? std::pow(1.0 / (g * phi), 1.0 / a) : kInf;
    const double r_hi = integration_radius(lambda_tx, r_cut);
    const double term2 =
        split_hi * 2.0 * pl *
        integrate(
            [&](double r) {
                if (r <= 0.0) return 0.0;
                const double tail = interference_tail(r, g, a, phi);
                if (!std::isfinite(tail)) return 0.0;
                return r * std::exp(-pl * r * r - 2.0 * pl * tail);
            },
            0.0, r_hi);

    return clamp01(term1 + term2);
}

double slot_success_probability_alpha4(double lambda_tx, const NetworkConfig& cfg) {
    if (cfg.alpha != 4.0)
        throw std::domain_error("slot_success_probability_alpha4: requires alpha == 4");
    if (!(lambda_tx > 0.0))
        throw std::domain_error("slot_success_probability_alpha4: lambda_tx must be > 0");
    const double g = cfg.gamma_star;
    const double sg = std::sqrt(g);
    const double pl = kPi * lambda_tx;
    const double chi = pl * (1.0 + sg * std::atan(sg));
    const double omega = cfg.mu * g * cfg.noise / cfg.pt;
    const double split_lo = 1.0 - std::exp(-cfg.mu * cfg.psi);
    const double split_hi = std::exp(-cfg.mu * cfg.psi);

    double term1;
    if (omega == 0.0) {
        term1 = split_lo * pl / chi;
    } else {
        // int_0^inf exp(-chi v - omega v^2) dv via the scaled erfc.
        const double so = std::sqrt(omega);
        term1 = split_lo * pl * std::sqrt(kPi) / (2.0 * so) * erfcx(chi / (2.0 * so));
    }

    const double phi = cfg.noise / (cfg.pt * cfg.psi);
    const double r_cut = phi > 0.0 ? std::pow(1.0 / (g * phi), 0.25) : kInf;
    const double r_hi = integration_radius(lambda_tx, r_cut);
    const double term2 =
        split_hi * 2.0 * pl *
        integrate(
            [&](double r) {
                if (r <= 0.0) return 0.0;
                const double denom = 1.0 - phi * g * std::pow(r, 4.0);
                if (denom <= 0.0) return 0.0;
                const double zeta = std::sqrt(g / denom);
                return r * std::exp(-pl * r * r * (1.0 + zeta * std::atan(zeta)));
            },
            0.0, r_hi);

    return clamp01(term1 + term2);
}

double exchange_probability_direct(const NetworkConfig& cfg) {
    return slot_success_probability(cfg.lambda1, cfg) *
           slot_success_probability(cfg.lambda2, cfg);
}

double relay_path_probability(double lambda_src, const NetworkConfig& cfg) {
    if (!(cfg.lambdaR > 0.0)) return 0.0;
    return slot_success_probability(lambda_src, cfg) *
           slot_success_probability(cfg.lambdaR, cfg);
}

double exchange_probability_cooperative(const NetworkConfig& cfg) {
    const double p1 = slot_success_probability(cfg.lambda1, cfg);
    const double p2 = slot_success_probability(cfg.lambda2, cfg);
    const double pr1 = relay_path_probability(cfg.lambda1, cfg);
    const double pr2 = relay_path_probability(cfg.lambda2, cfg);
    return (p1 + pr1 * (1.0 - p1)) * (p2 + pr2 * (1.0 - p2));
}

double mean_nearest_pathloss_quadrature(double lambda, double alpha) {
    if (!(alpha > 2.0)) throw std::domain_error("mean_nearest_pathloss: alpha must be > 2");
    if (lambda == 0.0) return 0.0;
    const double a = kPi * lambda;
    const double tail = integrate_semi_infinite(
        [&](double r) { return std::pow(r, 1.0 - alpha) * 2.0 * a * std::exp(-a * r * r); },
        1.0);
    return 1.0 - std::exp(-a) + tail;
}

double mean_nearest_pathloss(double lambda, double alpha) {
    if (!(alpha > 2.0)) throw std::domain_error("mean_nearest_pathloss: alpha must be > 2");
    if (lambda == 0.0) return 0.0;
    const double a = kPi * lambda;
    const double ea = std::exp(-a);
    if (alpha == 3.0)
        return 1.0 - ea + 2.0 * a * (ea - kPi * std::sqrt(lambda) * erfc_c(std::sqrt(a)));
    if (alpha == 4.0)
        return 1.0 - ea + a * (ea + a * expint_ei(-a));
    if (alpha == 5.0)
        return 1.0 - ea +
               2.0 / 3.0 * a *
                   ((1.0 - 2.0 * a) * ea +
                    2.0 * kPi * kPi * std::pow(lambda, 1.5) * erfc_c(std::sqrt(a)));
    return mean_nearest_pathloss_quadrature(lambda, alpha);
}

double mean_harvested_rf_power(double lambda_tx, const NetworkConfig& cfg) {
    if (lambda_tx == 0.0) return 0.0;
    if (!(lambda_tx > 0.0))
        throw std::domain_error("mean_harvested_rf_power: lambda_tx must be >= 0");
    const double mp = cfg.mu * cfg.psi;
    const double campbell = kPi * cfg.alpha * lambda_tx / (cfg.alpha - 2.0);
    const double nearest = mean_nearest_pathloss(lambda_tx, cfg.alpha);
    // E{1/h | h > psi} = -mu e^{mu psi} Ei(-mu psi) supplies the e^{+mu psi}
    // factor on the give-back term.
    const double giveback =
        cfg.psi * std::exp(mp) * expint_ei(-mp) * (campbell - nearest);
    return cfg.pt * std::exp(-mp) * (campbell / cfg.mu + giveback);
}

double converted_harvested_power(double pdps_watts, const RectennaModel& m) {
    if (pdps_watts <= 0.0) return 0.0;
    return pdps_watts * conversion_efficiency(pdps_watts, m);
}

namespace {

// The two transmitter intensities a role listens to in the cooperative
// scenario, one per receive slot.
std::pair<double, double> cc_rx_intensities(NodeRole role, const NetworkConfig& cfg) {
    switch (role) {
        case NodeRole::Source1: return {cfg.lambda2, cfg.lambdaR};
        case NodeRole::Source2: return {cfg.lambda1, cfg.lambdaR};
        case NodeRole::Relay: return {cfg.lambda1, cfg.lambda2};
    }
    throw std::logic_error("unreachable");
}

}  // namespace

double mean_harvested_rf_power_cc(NodeRole role, const NetworkConfig& cfg) {
    const auto [la, lb] = cc_rx_intensities(role, cfg);
    return mean_harvested_rf_power(la, cfg) + mean_harvested_rf_power(lb, cfg);
}

double converted_harvested_power_cc(NodeRole role, const NetworkConfig& cfg) {
    const auto [la, lb] = cc_rx_intensities(role, cfg);
    return converted_harvested_power(mean_harvested_rf_power(la, cfg), cfg.rectenna) +
           converted_harvested_power(mean_harvested_rf_power(lb, cfg), cfg.rectenna);
}

double cp_consumption(Scenario sc, NodeRole role, const NetworkConfig& cfg) {
    if (sc.kind == ScenarioKind::DirectCommunication) {
        if (role == NodeRole::Relay)
            throw std::domain_error("cp_consumption: no relay role in the direct scenario");
        return cfg.slot_seconds * (cfg.pr + cfg.pt);
    }
    const double relay_tx = role == NodeRole::Relay ? 1.0 : 0.0;
    return cfg.slot_seconds * (2.0 * cfg.pr + cfg.pt * (1.0 + relay_tx));
}

double cp_harvest(Scenario sc, NodeRole role, const NetworkConfig& cfg) {
    if (sc.kind == ScenarioKind::DirectCommunication) {
        const double other = role == NodeRole::Source1 ? cfg.lambda2 : cfg.lambda1;
        return converted_harvested_power(mean_harvested_rf_power(other, cfg), cfg.rectenna);
    }
    return converted_harvested_power_cc(role, cfg);
}

double lifetime_cps(Scenario sc, bool with_harvesting, NodeRole role,
                    const NetworkConfig& cfg) {
    const double drain = cp_consumption(sc, role, cfg) -
                         (with_harvesting ? cfg.slot_seconds * cp_harvest(sc, role, cfg) : 0.0);
    if (drain <= 0.0) return kInf;
    return cfg.battery_joules / drain;
}

double network_lifetime_cps(Scenario sc, bool with_harvesting, const NetworkConfig& cfg) {
    double life = std::min(lifetime_cps(sc, with_harvesting, NodeRole::Source1, cfg),
                           lifetime_cps(sc, with_harvesting, NodeRole::Source2, cfg));
    if (sc.kind == ScenarioKind::CooperativeCommunication)
        life = std::min(life, lifetime_cps(sc, with_harvesting, NodeRole::Relay, cfg));
    return life;
}

double spatial_throughput(Scenario sc, const NetworkConfig& cfg) {
    const double p = sc.kind == ScenarioKind::DirectCommunication
                         ? exchange_probability_direct(cfg)
                         : exchange_probability_cooperative(cfg);
    return (cfg.lambda1 + cfg.lambda2) * p / (sc.slots_per_cp() * cfg.slot_seconds);
}

double total_messages_exchanged(Scenario sc, const NetworkConfig& cfg) {
    const double s = spatial_throughput(sc, cfg);
    if (s == 0.0) return 0.0;
    return s * network_lifetime_cps(sc, true, cfg) * sc.slots_per_cp();
}

namespace {

double lambda_opt_closed_form(const NetworkConfig& cfg) {
    const auto& m = cfg.rectenna;
    if (!(m.a3 < 0.0)) return std::numeric_limits<double>::quiet_NaN();
    const double l10 = std::log(10.0);
    const double q = l10 * l10 * (m.a2 * m.a2 - 3.0 * m.a1 * m.a3) + 900.0 * m.a3 * m.a3;
    const double rho = l10 * l10 * l10 *
                           (27.0 * m.a0 * m.a3 * m.a3 - 9.0 * m.a1 * m.a2 * m.a3 +
                            2.0 * m.a2 * m.a2 * m.a2) +
                       54000.0 * m.a3 * m.a3 * m.a3;
    const double disc = rho * rho - 4.0 * q * q * q;
    if (disc < 0.0) return std::numeric_limits<double>::quiet_NaN();
    const double f = std::cbrt(-rho + std::sqrt(disc));
    const double pre = cfg.mu * (cfg.alpha - 2.0) * std::pow(10.0, -m.a2 / (30.0 * m.a3)) /
                       (1e3 * cfg.pt * kPi * cfg.alpha * std::exp(-cfg.mu * cfg.psi + 1.0));
    const double expo = std::cbrt(4.0) * f / (60.0 * m.a3) +
                        q / (std::pow(2.0, -4.0 / 3.0) * 60.0 * m.a3 * f);
    return pre * std::exp(expo);
}

}  // namespace

OptimalIntensity optimal_intensity(const NetworkConfig& cfg) {
    auto objective = [&](double lambda) {
        return converted_harvested_power(mean_harvested_rf_power(lambda, cfg), cfg.rectenna);
    };

    // Log-spaced scan to bracket the maximum, then golden-section.
    const double lo = 1e-3, hi = 1.0;
    const int n = 121;
    int best = 0;
    double best_val = -kInf;
    std::vector<double> grid(n), val(n);
    for (int i = 0; i < n; ++i) {
        grid[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
        val[i] = objective(grid[i]);
        if (val[i] > best_val) {
            best_val = val[i];
            best = i;
        }
    }
    if (best == 0 || best == n - 1)
        throw OptimizationError(
            "optimal_intensity: converted power is monotone on the search range");

    double a = grid[best - 1], b = grid[best + 1];
    const double gr = 0.61803398874989484820;
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = objective(x1), f2 = objective(x2);
    while (b - a > 1e-7 * b) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = objective(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = objective(x1);
        }
    }

    OptimalIntensity out;
    out.numeric = 0.5 * (a + b);
    out.closed_form = lambda_opt_closed_form(cfg);
    out.relative_gap = std::isfinite(out.closed_form)
                           ? std::abs(out.closed_form - out.numeric) / out.numeric
                           : std::numeric_limits<double>::quiet_NaN();
    out.warning = !(out.relative_gap <= 0.05);
    return out;
}

AnalyticReport build_report(const NetworkConfig& cfg) {
    cfg.validate();
    if (!(cfg.lambda1 > 0.0) || !(cfg.lambda2 > 0.0))
        throw std::invalid_argument(
            "invalid config: report requires lambda1 > 0 and lambda2 > 0");

    AnalyticReport r;
    r.p_dc1 = slot_success_probability(cfg.lambda1, cfg);
    r.p_dc2 = slot_success_probability(cfg.lambda2, cfg);
    r.p_dc = r.p_dc1 * r.p_dc2;
    const double p_r = cfg.lambdaR > 0.0 ? slot_success_probability(cfg.lambdaR, cfg) : 0.0;
    r.p_cc_r1 = r.p_dc1 * p_r;
    r.p_cc_r2 = r.p_dc2 * p_r;
    r.p_cc = (r.p_dc1 + r.p_cc_r1 * (1.0 - r.p_dc1)) *
             (r.p_dc2 + r.p_cc_r2 * (1.0 - r.p_dc2));

    r.pdps_d1 = mean_harvested_rf_power(cfg.lambda2, cfg);
    r.pdps_d2 = mean_harvested_rf_power(cfg.lambda1, cfg);
    r.peh_d1 = converted_harvested_power(r.pdps_d1, cfg.rectenna);
    r.peh_d2 = converted_harvested_power(r.pdps_d2, cfg.rectenna);
    r.pdps_c1 = mean_harvested_rf_power_cc(NodeRole::Source1, cfg);
    r.pdps_c2 = mean_harvested_rf_power_cc(NodeRole::Source2, cfg);
    r.pdps_cR = mean_harvested_rf_power_cc(NodeRole::Relay, cfg);
    r.peh_c1 = converted_harvested_power_cc(NodeRole::Source1, cfg);
    r.peh_c2 = converted_harvested_power_cc(NodeRole::Source2, cfg);
    r.peh_cR = converted_harvested_power_cc(NodeRole::Relay, cfg);

    const Scenario dc = Scenario::direct(), cc = Scenario::cooperative();
    r.lifetime_dc = lifetime_cps(dc, false, NodeRole::Source1, cfg);
    r.lifetime_dc_eh = network_lifetime_cps(dc, true, cfg);
    r.lifetime_cc_source = lifetime_cps(cc, false, NodeRole::Source1, cfg);
    r.lifetime_cc_relay = lifetime_cps(cc, false, NodeRole::Relay, cfg);
    r.lifetime_cc_eh = network_lifetime_cps(cc, true, cfg);

    r.s_dc = spatial_throughput(dc, cfg);
    r.s_cc = spatial_throughput(cc, cfg);
    r.tme_dc = total_messages_exchanged(dc, cfg);
    r.tme_cc = total_messages_exchanged(cc, cfg);

    try {
        r.lambda_opt = optimal_intensity(cfg).numeric;
    } catch (const OptimizationError&) {
        r.lambda_opt = std::numeric_limits<double>::quiet_NaN();
    }
    return r;
}

}  // namespace wehnet
