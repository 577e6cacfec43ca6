#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "wehnet/network_config.hpp"

namespace wehnet {

/// Dynamic power-splitting rule: the information decoder gets the whole
/// signal when the nearest-link fade is poor (h < psi) and the fraction
/// psi/h otherwise; (1 - v) goes to the energy harvester.
inline double dps_fraction(double h, double psi) {
    if (!(h > 0.0) || !(psi > 0.0))
        throw std::domain_error("dps_fraction: h and psi must be > 0");
    return h < psi ? 1.0 : psi / h;
}

enum class PathLoss { Unbounded, Bounded };

/// d^-alpha power-law gain. The bounded variant caps the gain at 1 inside
/// the unit disk; decoding math uses the unbounded law, energy accounting
/// the bounded one (keeps the mean aggregate received power finite).
inline double pathloss_gain(double distance, double alpha, PathLoss mode) {
    if (!(distance > 0.0))
        throw std::domain_error("pathloss_gain: distance must be > 0");
    const double g = std::pow(distance, -alpha);
    return mode == PathLoss::Bounded ? std::min(1.0, g) : g;
}

/// SINR at a receiver whose nearest transmitter is at distance d with fade
/// h; the split fraction v multiplies both the signal and the aggregated
/// interference.
inline double sinr(double h, double d, double interference, const NetworkConfig& cfg) {
    const double v = dps_fraction(h, cfg.psi);
    const double signal = v * cfg.pt * h * pathloss_gain(d, cfg.alpha, PathLoss::Unbounded);
    return signal / (v * interference + cfg.noise);
}

/// RF-to-DC conversion efficiency: cubic evaluated on the input power in
/// dBm, clamped to [0,1] (the fit goes negative outside its range).
inline double conversion_efficiency(double p_in_watts, const RectennaModel& m) {
    if (!(p_in_watts > 0.0))
        throw std::domain_error("conversion_efficiency: input power must be > 0");
    const double x = watts_to_dbm(p_in_watts);
    const double eps = ((m.a3 * x + m.a2) * x + m.a1) * x + m.a0;
    return std::clamp(eps, 0.0, 1.0);
}

}  // namespace wehnet
