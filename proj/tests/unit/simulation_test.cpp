#include "wehnet/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "wehnet/analytic.hpp"
#include "wehnet/special_functions.hpp"

namespace {

using namespace wehnet;

constexpr double kPi = 3.14159265358979323846;

TEST(SamplePpp, ZeroIntensityIsEmpty) {
    Window w{100.0};
    RngStream rng(1, 0);
    EXPECT_TRUE(sample_ppp(0.0, w, rng).empty());
}

TEST(SamplePpp, PoissonMeanCount) {
    Window w{100.0};
    const int n = 200;
    double total = 0;
    for (int i = 0; i < n; ++i) {
        RngStream rng(2, i);
        total += sample_ppp(0.1, w, rng).size();
    }
    const double mean = total / n;
    const double se = std::sqrt(1000.0 / n);
    EXPECT_NEAR(mean, 1000.0, 3.0 * se + 1.0);
}

TEST(SamplePpp, DeterministicPerSeedPath) {
    Window w{120.0};
    RngStream a(42, 7), b(42, 7), c(42, 8);
    const auto pa = sample_ppp(0.05, w, a);
    const auto pb = sample_ppp(0.05, w, b);
    const auto pc = sample_ppp(0.05, w, c);
    ASSERT_EQ(pa.size(), pb.size());
    for (std::size_t i = 0; i < pa.size(); ++i) {
        EXPECT_EQ(pa[i].x, pb[i].x);
        EXPECT_EQ(pa[i].y, pb[i].y);
    }
    EXPECT_NE(pa.size() == pc.size() &&
                  std::equal(pa.begin(), pa.end(), pc.begin(),
                             [](const Point& u, const Point& v) {
                                 return u.x == v.x && u.y == v.y;
                             }),
              true);
}

TEST(Torus, WrapAroundDistance) {
    EXPECT_NEAR(std::sqrt(torus_distance2({0, 0}, {499, 499}, 500.0)), std::sqrt(2.0),
                1e-12);
    EXPECT_NEAR(torus_distance2({10, 10}, {20, 10}, 500.0), 100.0, 1e-12);
}

TEST(Nearest, SingleCandidateAndWrap) {
    Window w{500.0};
    const std::vector<Point> pts = {{499, 499}};
    const auto nr = nearest({0, 0}, pts, w);
    EXPECT_EQ(nr.index, 0u);
    EXPECT_NEAR(nr.distance, std::sqrt(2.0), 1e-12);
    EXPECT_THROW(nearest({0, 0}, {}, w), std::invalid_argument);
}

TEST(Nearest, TieBreaksOnLowestIndex) {
    Window w{100.0};
    const std::vector<Point> pts = {{1, 0}, {0, 1}};
    EXPECT_EQ(nearest({0, 0}, pts, w).index, 0u);
}

TEST(Nearest, DistanceDistributionMatchesRayleighLaw) {
    // One probe per deployment keeps the samples i.i.d.; the CDF is
    // 1 - exp(-pi lambda r^2). Kolmogorov-Smirnov at the 1% level.
    Window w{150.0};
    const double lambda = 0.1;
    const int n = 1500;
    std::vector<double> u(n);
    for (int i = 0; i < n; ++i) {
        RngStream rng(5150, i);
        const auto pts = sample_ppp(lambda, w, rng);
        const Point probe{rng.uniform() * w.side, rng.uniform() * w.side};
        const double d = nearest(probe, pts, w).distance;
        u[i] = 1.0 - std::exp(-kPi * lambda * d * d);
    }
    std::sort(u.begin(), u.end());
    double dks = 0.0;
    for (int i = 0; i < n; ++i) {
        dks = std::max(dks, std::abs(u[i] - (i + 1.0) / n));
        dks = std::max(dks, std::abs(u[i] - static_cast<double>(i) / n));
    }
    EXPECT_LT(dks * std::sqrt(static_cast<double>(n)), 1.63);  // p > 0.01
}

TEST(RunSlot, LargePsiSuppressesHarvest) {
    NetworkConfig cfg = NetworkConfig::defaults();
    cfg.psi = 50.0;
    Window w{60.0};
    RngStream rng(9, 0);
    const auto tx = sample_ppp(0.1, w, rng);
    const auto rx = sample_ppp(0.02, w, rng);
    RngStream slot_rng(9, 1);
    for (const auto& o : run_slot(tx, rx, cfg, w, slot_rng))
        EXPECT_EQ(o.harvested_energy, 0.0);
}

TEST(RunSlot, SingleTransmitterNoNoiseAlwaysDecodes) {
    NetworkConfig cfg = NetworkConfig::defaults();
    cfg.noise = 0.0;
    Window w{50.0};
    const std::vector<Point> tx = {{25, 25}};
    const std::vector<Point> rx = {{1, 1}, {10, 40}, {30, 30}, {49, 5}};
    RngStream rng(11, 0);
    for (const auto& o : run_slot(tx, rx, cfg, w, rng)) {
        EXPECT_TRUE(o.decoded);
        EXPECT_EQ(o.nearest_tx, 0u);
        EXPECT_GE(o.harvested_energy, 0.0);
    }
}

TEST(RunSlot, RequiresNonemptySets) {
    NetworkConfig cfg = NetworkConfig::defaults();
    Window w{50.0};
    RngStream rng(1, 0);
    EXPECT_THROW(run_slot({}, {{1, 1}}, cfg, w, rng), std::invalid_argument);
    EXPECT_THROW(run_slot({{1, 1}}, {}, cfg, w, rng), std::invalid_argument);
}

TEST(RunCp, ShapesAndNonnegativeEnergy) {
    NetworkConfig cfg = NetworkConfig::defaults();
    Window w{60.0};
    const auto rz = sample_realization(cfg, w, 21, 3);
    RngStream rng(22, 3);
    const auto cp = run_cp(Scenario::cooperative(), rz, cfg, rng);
    EXPECT_EQ(cp.s1_success.size(), rz.s1.size());
    EXPECT_EQ(cp.s2_success.size(), rz.s2.size());
    EXPECT_EQ(cp.relay_energy.size(), rz.relays.size());
    for (double e : cp.s1_energy) EXPECT_GE(e, 0.0);
    for (double e : cp.s2_energy) EXPECT_GE(e, 0.0);
    for (double e : cp.relay_energy) EXPECT_GE(e, 0.0);
}

TEST(RunCp, PairMutualSuccessTracksSlotProduct) {
    // Node pairs with mutual success in the direct scenario occur at about
    // the product of the two slot probabilities.
    NetworkConfig cfg = NetworkConfig::defaults();
    Window w{80.0};
    const int n = 15;
    double pair = 0, prod = 0;
    for (int i = 0; i < n; ++i) {
        const auto rz = sample_realization(cfg, w, 31, i);
        RngStream rng(32, i);
        const auto cp = run_cp(Scenario::direct(), rz, cfg, rng);
        double c1 = 0, c2 = 0, mutual = 0;
        for (auto v : cp.s1_success) c1 += v;
        for (auto v : cp.s2_success) c2 += v;
        for (std::size_t j = 0; j < rz.s2.size(); ++j) {
            const auto partner = nearest(rz.s2[j], rz.s1, w);
            mutual += cp.s2_success[j] && cp.s1_success[partner.index];
        }
        pair += mutual / rz.s2.size();
        prod += (c1 / rz.s1.size()) * (c2 / rz.s2.size());
    }
    EXPECT_NEAR(pair / n, prod / n, 0.03);
}

TEST(McEstimateT, Basics) {
    const auto same = McEstimate::from_values({0.7, 0.7});
    EXPECT_DOUBLE_EQ(same.mean, 0.7);
    EXPECT_DOUBLE_EQ(same.std_error, 0.0);
    EXPECT_EQ(same.n, 2);

    const auto e = McEstimate::from_values({1.0, 2.0, 3.0});
    EXPECT_DOUBLE_EQ(e.mean, 2.0);
    EXPECT_NEAR(e.std_error, 1.0 / std::sqrt(3.0), 1e-12);
}

TEST(Estimates, BitIdenticalAcrossThreadCounts) {
    NetworkConfig cfg = NetworkConfig::defaults();
    SimOptions a;
    a.side = 60.0;
    a.n_realizations = 24;
    a.master_seed = 17;
    a.max_receivers_per_slot = 32;
    a.threads = 1;
    SimOptions b = a;
    b.threads = 2;
    const auto ea = estimate_validation(cfg, a);
    const auto eb = estimate_validation(cfg, b);
    EXPECT_EQ(ea.p_dc.mean, eb.p_dc.mean);
    EXPECT_EQ(ea.p_cc.mean, eb.p_cc.mean);
    EXPECT_EQ(ea.pdps_cR.mean, eb.pdps_cR.mean);
    EXPECT_EQ(ea.peh_c1.mean, eb.peh_c1.mean);
    EXPECT_EQ(ea.p_cc.std_error, eb.p_cc.std_error);
}

TEST(Estimates, StandardErrorShrinksWithRealizations) {
    NetworkConfig cfg = NetworkConfig::defaults();
    SimOptions a;
    a.side = 60.0;
    a.master_seed = 5;
    a.max_receivers_per_slot = 32;
    a.n_realizations = 40;
    SimOptions b = a;
    b.n_realizations = 160;
    const auto ga = estimate_slot_success_grid(0.1, cfg, {1.0}, a);
    const auto gb = estimate_slot_success_grid(0.1, cfg, {1.0}, b);
    const double ratio = ga[0].std_error / gb[0].std_error;
    EXPECT_GT(ratio, 1.3);
    EXPECT_LT(ratio, 3.2);
}

TEST(Estimates, FadeGateAndCampbell) {
    NetworkConfig cfg = NetworkConfig::defaults();
    SimOptions opt;
    opt.side = 100.0;
    opt.n_realizations = 120;
    opt.master_seed = 1234;
    opt.max_receivers_per_slot = 96;
    const auto h = estimate_slot_harvest(0.25, cfg, opt);

    const double pr_want = std::exp(-cfg.mu * cfg.psi);
    EXPECT_NEAR(h.pr_fade_above_psi.mean, pr_want, 3.0 * h.pr_fade_above_psi.std_error);

    const double cond_want = (1.0 + cfg.psi * cfg.mu) / cfg.mu;
    EXPECT_NEAR(h.mean_fade_given_above.mean, cond_want,
                3.0 * h.mean_fade_given_above.std_error);

    // The near-field tail is heavy; allow the larger of the relative
    // tolerance and a 4-sigma band.
    const double campbell_want = kPi * cfg.alpha * 0.25 / (cfg.mu * (cfg.alpha - 2.0));
    EXPECT_NEAR(h.campbell_sum.mean, campbell_want,
                std::max(0.03 * campbell_want, 4.0 * h.campbell_sum.std_error));

    const double pdps_want = mean_harvested_rf_power(0.25, cfg);
    EXPECT_NEAR(h.pdps.mean, pdps_want,
                std::max(0.03 * pdps_want, 4.0 * h.pdps.std_error));
}

TEST(Estimates, InverseFadeConditionalMean) {
    // E{1/h | h > psi} = -mu e^{mu psi} Ei(-mu psi)
    NetworkConfig cfg = NetworkConfig::defaults();
    RngStream rng(77, 0);
    double sum = 0;
    int count = 0;
    for (int i = 0; i < 2000000; ++i) {
        const double h = rng.exponential(cfg.mu);
        if (h > cfg.psi) {
            sum += 1.0 / h;
            ++count;
        }
    }
    const double want = -cfg.mu * std::exp(cfg.mu * cfg.psi) *
                        wehnet::expint_ei(-cfg.mu * cfg.psi);
    EXPECT_NEAR(sum / count, want, 0.01 * want);
}

TEST(SimulateLifetime, DirectWithoutHarvesting) {
    NetworkConfig cfg = NetworkConfig::defaults();
    SimOptions opt;
    opt.n_realizations = 10;
    const auto r = simulate_lifetime(Scenario::direct(), false, cfg, opt);
    EXPECT_DOUBLE_EQ(r.cps.mean, 5714.0);
    EXPECT_DOUBLE_EQ(r.cps.std_error, 0.0);
    EXPECT_NEAR(r.closed_form_cps, 1000.0 / 0.175, 1e-9);
}

TEST(SimulateLifetime, PerpetualOperation) {
    NetworkConfig cfg = NetworkConfig::defaults();
    cfg.pr = 0.0;
    cfg.lambda1 = 0.5;  // both sets harvest from a dense opposite set
    cfg.rectenna = {0.0, 0.0, 0.0, 1.0};
    SimOptions opt;
    opt.side = 60.0;
    opt.n_realizations = 20;
    opt.max_receivers_per_slot = 32;
    const auto r = simulate_lifetime(Scenario::direct(), true, cfg, opt);
    EXPECT_TRUE(std::isinf(r.cps.mean));
}

TEST(SimulateLifetime, TrajectoryMatchesClosedForm) {
    NetworkConfig cfg = NetworkConfig::defaults();
    SimOptions opt;
    opt.side = 80.0;
    opt.n_realizations = 60;
    opt.master_seed = 404;
    opt.max_receivers_per_slot = 48;
    for (Scenario sc : {Scenario::direct(), Scenario::cooperative()}) {
        const auto r = simulate_lifetime(sc, true, cfg, opt);
        EXPECT_LE(std::abs(r.cps.mean - r.closed_form_cps), 1.0);
        EXPECT_GT(r.cps.std_error, 0.0);
    }
}

TEST(Dump, PerRealizationRecordsAreStable) {
    NetworkConfig cfg = NetworkConfig::defaults();
    const auto dir = std::filesystem::temp_directory_path();
    const auto p1 = dir / "wehnet_dump_a.csv";
    const auto p2 = dir / "wehnet_dump_b.csv";
    SimOptions opt;
    opt.side = 60.0;
    opt.n_realizations = 8;
    opt.master_seed = 3;
    opt.max_receivers_per_slot = 16;
    opt.dump_csv_path = p1.string();
    estimate_validation(cfg, opt);
    opt.dump_csv_path = p2.string();
    estimate_validation(cfg, opt);

    auto slurp = [](const std::filesystem::path& p) {
        std::ifstream in(p);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    const std::string a = slurp(p1), b = slurp(p2);
    EXPECT_FALSE(a.empty());
    EXPECT_EQ(a, b);
    EXPECT_NE(a.find("realization_index,metric,value\n"), std::string::npos);
    EXPECT_EQ(std::count(a.begin(), a.end(), '\n'), 1 + 8 * 9);
    std::filesystem::remove(p1);
    std::filesystem::remove(p2);
}

}  // namespace
