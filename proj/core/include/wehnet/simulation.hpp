#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "wehnet/network_config.hpp"

namespace wehnet {

struct Point {
    double x = 0, y = 0;
};

/// Square observation window with wrap-around (toroidal) distance, which
/// removes edge bias so finite-window estimates converge to the
/// infinite-plane expressions.
struct Window {
    double side = 500.0;
};

struct SeedPath {
    std::uint64_t master = 0;
    std::uint64_t index = 0;
};

/// Deterministic per-realization random stream: the state depends only on
/// (master seed, realization index), never on thread scheduling.
class RngStream {
  public:
    RngStream(std::uint64_t master, std::uint64_t index);

    double uniform();                  // [0,1)
    double exponential(double rate);   // mean 1/rate
    int poisson(double mean);
    std::mt19937_64& engine() { return eng_; }

  private:
    std::mt19937_64 eng_;
};

/// One sampled deployment of the three point processes.
struct Realization {
    std::vector<Point> s1, s2, relays;
    Window window;
    SeedPath seed_path;
};

std::vector<Point> sample_ppp(double lambda, const Window& w, RngStream& rng);

Realization sample_realization(const NetworkConfig& cfg, const Window& w,
                               std::uint64_t master, std::uint64_t index);

/// Squared wrap-around distance.
double torus_distance2(const Point& a, const Point& b, double side);

struct NearestResult {
    std::size_t index = 0;
    double distance = 0;
};

/// Nearest point of `pts` to `p` under the toroidal metric, ties broken by
/// the lowest index. Grid-bucketed; throws std::invalid_argument on an
/// empty set.
NearestResult nearest(const Point& p, const std::vector<Point>& pts, const Window& w);

/// Per-receiver outcome of one slot at the configured threshold.
struct SlotOutcome {
    bool decoded = false;
    double harvested_energy = 0;  // joules, pre-conversion
    std::size_t nearest_tx = 0;
};

/// All transmitters send simultaneously; each receiver draws i.i.d. fades
/// to every transmitter, decodes its nearest one against the aggregate
/// interference, and harvests the split-off share of the total received
/// power (bounded path loss) when its nearest-link fade clears psi.
std::vector<SlotOutcome> run_slot(const std::vector<Point>& tx,
                                  const std::vector<Point>& rx,
                                  const NetworkConfig& cfg, const Window& w,
                                  RngStream& rng);

/// Per-node results of one communication period.
struct CpOutcome {
    std::vector<std::uint8_t> s1_success, s2_success;  // exchange success
    std::vector<double> s1_energy, s2_energy, relay_energy;  // joules per CP
};

/// Runs one CP on the full point sets. Direct: two slots, success =
/// decoding the nearest opposite-set node. Cooperative: four slots;
/// success = direct decode OR (the node's nearest relay decoded the
/// opposite-set message AND the node decodes that relay in its relay
/// slot). Relays that failed to decode still transmit, contributing energy
/// and interference only. Fades are redrawn every slot.
CpOutcome run_cp(Scenario sc, const Realization& rz, const NetworkConfig& cfg,
                 RngStream& rng);

struct McEstimate {
    double mean = 0;
    double std_error = 0;
    int n = 0;

    static McEstimate from_values(const std::vector<double>& values);
};

struct SimOptions {
    double side = 500.0;
    int n_realizations = 1000;
    std::uint64_t master_seed = 1;
    int max_receivers_per_slot = 256;  // probe subsample per set; 0 = all
    int threads = 0;                   // 0 = hardware concurrency
    bool per_realization_conversion = false;  // sensitivity mode for peh
    std::string dump_csv_path;  // per-realization records, empty = off
};

/// Everything the validation table needs, estimated in one pass.
/// p_dc multiplies the two per-slot decode fractions; p_cc counts realized
/// pair exchanges (a node and its nearest opposite-set partner both
/// succeed, either directly or via their nearest relays). Harvested powers
/// are means per receive slot; cooperative roles carry the sum of their
/// two receive slots. Converted (peh) values apply the rectenna cubic to
/// the ensemble-mean power of each receive slot, with delta-method
/// standard errors.
struct ValidationEstimates {
    McEstimate p_dc1, p_dc2, p_dc;
    McEstimate p_cc;
    McEstimate pdps_d1, pdps_d2;
    McEstimate pdps_c1, pdps_c2, pdps_cR;
    McEstimate peh_d1, peh_d2;
    McEstimate peh_c1, peh_c2, peh_cR;
    bool has_cc = false;
};

ValidationEstimates estimate_validation(const NetworkConfig& cfg, const SimOptions& opt);

/// Decode fraction for one slot (transmitter intensity lambda_tx) at each
/// threshold of the grid, sharing one set of channel draws per
/// realization.
std::vector<McEstimate> estimate_slot_success_grid(double lambda_tx,
                                                   const NetworkConfig& cfg,
                                                   const std::vector<double>& gamma_grid,
                                                   const SimOptions& opt);

struct ExchangeGridEstimates {
    std::vector<McEstimate> p_dc, p_cc;
};

/// Direct and cooperative exchange fractions across a threshold grid.
ExchangeGridEstimates estimate_exchange_grid(const NetworkConfig& cfg,
                                             const std::vector<double>& gamma_grid,
                                             const SimOptions& opt);

/// Harvest-side observables for one receive slot: mean pre-conversion
/// DPS-harvested power, the fade-gate probability, the conditional mean
/// fade of the nearest transmitter, and the mean aggregate bounded-loss
/// received power per unit transmit power (Campbell check).
struct HarvestSlotEstimates {
    McEstimate pdps;
    McEstimate pr_fade_above_psi;
    McEstimate mean_fade_given_above;
    McEstimate campbell_sum;
};

HarvestSlotEstimates estimate_slot_harvest(double lambda_tx, const NetworkConfig& cfg,
                                           const SimOptions& opt);

struct LifetimeSimResult {
    McEstimate cps;             // battery-trajectory communication periods
    double closed_form_cps = 0; // B / net-drain at the same simulated harvest
};

/// Mean-trajectory lifetime: per-CP consumption per role minus the
/// simulated per-CP harvested energy (converted through the rectenna
/// pipeline); the network dies when the first role's battery empties.
/// +inf mean when harvesting covers consumption.
LifetimeSimResult simulate_lifetime(Scenario sc, bool with_harvesting,
                                    const NetworkConfig& cfg, const SimOptions& opt);

}  // namespace wehnet
