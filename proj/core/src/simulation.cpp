#include "wehnet/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <stdexcept>
#include <thread>

#include "wehnet/analytic.hpp"
#include "wehnet/radio.hpp"

namespace wehnet {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

}  // namespace

RngStream::RngStream(std::uint64_t master, std::uint64_t index)
    : eng_(splitmix64(splitmix64(master) ^ splitmix64(index + 0x51AB1EDULL))) {}

double RngStream::uniform() {
    // 53-bit mantissa in [0,1)
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
}

double RngStream::exponential(double rate) {
    double u;
    do {
        u = uniform();
    } while (u <= 0.0);
    return -std::log(u) / rate;
}

int RngStream::poisson(double mean) {
    std::poisson_distribution<int> dist(mean);
    return dist(eng_);
}

std::vector<Point> sample_ppp(double lambda, const Window& w, RngStream& rng) {
    if (lambda < 0.0) throw std::invalid_argument("sample_ppp: lambda must be >= 0");
    std::vector<Point> pts;
    if (lambda == 0.0) return pts;
    const int n = rng.poisson(lambda * w.side * w.side);
    pts.reserve(n);
    for (int i = 0; i < n; ++i) {
        const double x = rng.uniform() * w.side;
        const double y = rng.uniform() * w.side;
        pts.push_back({x, y});
    }
    return pts;
}

Realization sample_realization(const NetworkConfig& cfg, const Window& w,
                               std::uint64_t master, std::uint64_t index) {
    RngStream rng(master, index);
    Realization rz;
    rz.window = w;
    rz.seed_path = {master, index};
    rz.s1 = sample_ppp(cfg.lambda1, w, rng);
    rz.s2 = sample_ppp(cfg.lambda2, w, rng);
    rz.relays = sample_ppp(cfg.lambdaR, w, rng);
    return rz;
}

double torus_distance2(const Point& a, const Point& b, double side) {
    double dx = std::abs(a.x - b.x);
    double dy = std::abs(a.y - b.y);
    if (dx > 0.5 * side) dx = side - dx;
    if (dy > 0.5 * side) dy = side - dy;
    return dx * dx + dy * dy;
}

namespace {

// Uniform-grid spatial index for nearest-neighbor queries on the torus.
class PointGrid {
  public:
    PointGrid(const std::vector<Point>& pts, double side)
        : pts_(pts), side_(side) {
        const std::size_t n = pts.size();
        ncell_ = std::clamp(static_cast<int>(std::sqrt(static_cast<double>(n))), 1, 1024);
        cell_ = side_ / ncell_;
        std::vector<int> count(ncell_ * ncell_ + 1, 0);
        cell_of_.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            cell_of_[i] = cell_index(pts[i]);
            ++count[cell_of_[i] + 1];
        }
        for (std::size_t c = 1; c < count.size(); ++c) count[c] += count[c - 1];
        start_ = count;
        items_.resize(n);
        std::vector<int> cursor(start_.begin(), start_.end() - 1);
        for (std::size_t i = 0; i < n; ++i) items_[cursor[cell_of_[i]]++] = static_cast<int>(i);
    }

    NearestResult query(const Point& p) const {
        if (pts_.empty()) throw std::invalid_argument("nearest: empty point set");
        const int cx = coord_cell(p.x);
        const int cy = coord_cell(p.y);
        double best_d2 = kInf;
        int best_idx = -1;
        const int max_ring = ncell_;  // enough to cover the whole torus
        for (int ring = 0; ring <= max_ring; ++ring) {
            if (best_idx >= 0) {
                const double reach = (ring - 1) * cell_;
                if (reach > 0.0 && best_d2 <= reach * reach) break;
            }
            scan_ring(p, cx, cy, ring, best_d2, best_idx);
            if (2 * ring + 1 >= ncell_ && best_idx >= 0) break;  // saw everything
        }
        return {static_cast<std::size_t>(best_idx), std::sqrt(best_d2)};
    }

  private:
    int coord_cell(double v) const {
        int c = static_cast<int>(v / cell_);
        if (c >= ncell_) c = ncell_ - 1;
        if (c < 0) c = 0;
        return c;
    }
    int cell_index(const Point& p) const { return coord_cell(p.y) * ncell_ + coord_cell(p.x); }

    void scan_cell(const Point& p, int gx, int gy, double& best_d2, int& best_idx) const {
        gx = ((gx % ncell_) + ncell_) % ncell_;
        gy = ((gy % ncell_) + ncell_) % ncell_;
        const int c = gy * ncell_ + gx;
        for (int k = start_[c]; k < start_[c + 1]; ++k) {
            const int i = items_[k];
            const double d2 = torus_distance2(p, pts_[i], side_);
            if (d2 < best_d2 || (d2 == best_d2 && i < best_idx)) {
                best_d2 = d2;
                best_idx = i;
            }
        }
    }

    void scan_ring(const Point& p, int cx, int cy, int ring, double& best_d2,
                   int& best_idx) const {
        if (ring == 0) {
            scan_cell(p, cx, cy, best_d2, best_idx);
            return;
        }
        for (int dx = -ring; dx <= ring; ++dx) {
            scan_cell(p, cx + dx, cy - ring, best_d2, best_idx);
            scan_cell(p, cx + dx, cy + ring, best_d2, best_idx);
        }
        for (int dy = -ring + 1; dy <= ring - 1; ++dy) {
            scan_cell(p, cx - ring, cy + dy, best_d2, best_idx);
            scan_cell(p, cx + ring, cy + dy, best_d2, best_idx);
        }
    }

    const std::vector<Point>& pts_;
    double side_;
    int ncell_;
    double cell_;
    std::vector<int> start_, items_, cell_of_;
};

// One receiver against all transmitters: fades, nearest link, aggregate
// interference (unbounded law) and total bounded-loss received power.
struct RxScan {
    double gamma = 0;        // SINR of the nearest link
    double harvest_w = 0;    // DPS-harvested RF power, watts
    double bounded_sum = 0;  // sum h_i min(1, d_i^-alpha), per unit tx power
    double h_c = 0;          // nearest-link fade
    std::size_t nearest = 0;
};

RxScan scan_receiver(const Point& rx, const std::vector<Point>& tx,
                     const NetworkConfig& cfg, double side, RngStream& rng) {
    const bool alpha4 = cfg.alpha == 4.0;
    const double half = 0.5 * side;
    double total_unb = 0.0, total_bounded = 0.0;
    double best_d2 = kInf;
    double best_h = 0.0, best_g = 0.0;
    std::size_t best_i = 0;

    for (std::size_t i = 0; i < tx.size(); ++i) {
        double dx = std::abs(rx.x - tx[i].x);
        double dy = std::abs(rx.y - tx[i].y);
        if (dx > half) dx = side - dx;
        if (dy > half) dy = side - dy;
        double d2 = dx * dx + dy * dy;
        if (d2 < 1e-24) d2 = 1e-24;
        const double h = rng.exponential(cfg.mu);
        const double g = alpha4 ? 1.0 / (d2 * d2) : std::pow(d2, -0.5 * cfg.alpha);
        total_unb += h * g;
        total_bounded += h * std::min(1.0, g);
        if (d2 < best_d2) {
            best_d2 = d2;
            best_h = h;
            best_g = g;
            best_i = i;
        }
    }

    RxScan out;
    out.h_c = best_h;
    out.nearest = best_i;
    out.bounded_sum = total_bounded;
    const double v = dps_fraction(best_h, cfg.psi);
    const double signal = cfg.pt * best_h * best_g;
    const double interference = cfg.pt * (total_unb - best_h * best_g);
    out.gamma = v * signal / (v * interference + cfg.noise);
    out.harvest_w =
        best_h >= cfg.psi ? (1.0 - cfg.psi / best_h) * cfg.pt * total_bounded : 0.0;
    return out;
}

int clamp_probes(int max_rx, std::size_t n) {
    if (max_rx <= 0) return static_cast<int>(n);
    return static_cast<int>(std::min<std::size_t>(max_rx, n));
}

void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
    int t = threads > 0 ? threads
                        : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    t = std::min(t, n > 0 ? n : 1);
    if (t <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(t);
    for (int k = 0; k < t; ++k)
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
        });
    for (auto& th : pool) th.join();
}

}  // namespace

NearestResult nearest(const Point& p, const std::vector<Point>& pts, const Window& w) {
    if (pts.empty()) throw std::invalid_argument("nearest: empty point set");
    PointGrid grid(pts, w.side);
    return grid.query(p);
}

std::vector<SlotOutcome> run_slot(const std::vector<Point>& tx,
                                  const std::vector<Point>& rx,
                                  const NetworkConfig& cfg, const Window& w,
                                  RngStream& rng) {
    if (tx.empty() || rx.empty())
        throw std::invalid_argument("run_slot: transmitter and receiver sets must be nonempty");
    std::vector<SlotOutcome> out(rx.size());
    for (std::size_t j = 0; j < rx.size(); ++j) {
        const RxScan s = scan_receiver(rx[j], tx, cfg, w.side, rng);
        out[j] = {s.gamma >= cfg.gamma_star, s.harvest_w * cfg.slot_seconds, s.nearest};
    }
    return out;
}

CpOutcome run_cp(Scenario sc, const Realization& rz, const NetworkConfig& cfg,
                 RngStream& rng) {
    CpOutcome cp;
    if (rz.s1.empty() || rz.s2.empty())
        throw std::invalid_argument("run_cp: both source sets must be nonempty");
    const Window& w = rz.window;

    if (sc.kind == ScenarioKind::DirectCommunication) {
        const auto o1 = run_slot(rz.s1, rz.s2, cfg, w, rng);
        const auto o2 = run_slot(rz.s2, rz.s1, cfg, w, rng);
        cp.s2_success.resize(o1.size());
        cp.s2_energy.resize(o1.size());
        for (std::size_t j = 0; j < o1.size(); ++j) {
            cp.s2_success[j] = o1[j].decoded;
            cp.s2_energy[j] = o1[j].harvested_energy;
        }
        cp.s1_success.resize(o2.size());
        cp.s1_energy.resize(o2.size());
        for (std::size_t i = 0; i < o2.size(); ++i) {
            cp.s1_success[i] = o2[i].decoded;
            cp.s1_energy[i] = o2[i].harvested_energy;
        }
        return cp;
    }

    if (rz.relays.empty())
        throw std::invalid_argument("run_cp: cooperative scenario requires relays");
    const auto o1 = run_slot(rz.s1, rz.s2, cfg, w, rng);       // slot 1
    const auto r1 = run_slot(rz.s1, rz.relays, cfg, w, rng);   // relays listen too
    const auto o2 = run_slot(rz.s2, rz.s1, cfg, w, rng);       // slot 2
    const auto r2 = run_slot(rz.s2, rz.relays, cfg, w, rng);
    const auto o3 = run_slot(rz.relays, rz.s1, cfg, w, rng);   // slot 3
    const auto o4 = run_slot(rz.relays, rz.s2, cfg, w, rng);   // slot 4

    cp.s1_success.resize(rz.s1.size());
    cp.s1_energy.resize(rz.s1.size());
    for (std::size_t i = 0; i < rz.s1.size(); ++i) {
        const bool relay_path = r2[o3[i].nearest_tx].decoded && o3[i].decoded;
        cp.s1_success[i] = o2[i].decoded || relay_path;
        cp.s1_energy[i] = o2[i].harvested_energy + o3[i].harvested_energy;
    }
    cp.s2_success.resize(rz.s2.size());
    cp.s2_energy.resize(rz.s2.size());
    for (std::size_t j = 0; j < rz.s2.size(); ++j) {
        const bool relay_path = r1[o4[j].nearest_tx].decoded && o4[j].decoded;
        cp.s2_success[j] = o1[j].decoded || relay_path;
        cp.s2_energy[j] = o1[j].harvested_energy + o4[j].harvested_energy;
    }
    cp.relay_energy.resize(rz.relays.size());
    for (std::size_t k = 0; k < rz.relays.size(); ++k)
        cp.relay_energy[k] = r1[k].harvested_energy + r2[k].harvested_energy;
    return cp;
}

McEstimate McEstimate::from_values(const std::vector<double>& values) {
    McEstimate e;
    e.n = static_cast<int>(values.size());
    if (e.n == 0) return e;
    double sum = 0;
    for (double v : values) sum += v;
    e.mean = sum / e.n;
    if (e.n >= 2) {
        double ss = 0;
        for (double v : values) ss += (v - e.mean) * (v - e.mean);
        e.std_error = std::sqrt(ss / (e.n - 1)) / std::sqrt(static_cast<double>(e.n));
    }
    return e;
}

namespace {

// Per-realization record for the fused validation pass. Fractions are per
// threshold of the gamma grid; harvest components are slot means in watts.
struct RealizationStats {
    std::vector<double> p1, p2, p_dc, p_cc;
    double h_d1 = 0, h_d2 = 0;              // source receive slot from the other set
    double h_s1_r = 0, h_s2_r = 0;          // source receive slot from the relays
    double h_r_s1 = 0, h_r_s2 = 0;          // relay receive slots
};

// Sorted unique values plus a dense reverse map (-1 = absent).
struct IndexRows {
    std::vector<int> rows;
    std::vector<int> row_of;

    IndexRows(std::vector<int> idx, std::size_t universe) {
        std::sort(idx.begin(), idx.end());
        idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
        rows = std::move(idx);
        row_of.assign(universe, -1);
        for (std::size_t r = 0; r < rows.size(); ++r) row_of[rows[r]] = static_cast<int>(r);
    }
};

RealizationStats run_realization(const NetworkConfig& cfg, const Window& w,
                                 std::uint64_t master, int index,
                                 const std::vector<double>& gammas, bool with_cc,
                                 int max_rx) {
    RngStream rng(master, static_cast<std::uint64_t>(index));
    Realization rz;
    rz.window = w;
    rz.s1 = sample_ppp(cfg.lambda1, w, rng);
    rz.s2 = sample_ppp(cfg.lambda2, w, rng);
    rz.relays = sample_ppp(cfg.lambdaR, w, rng);

    const std::size_t g = gammas.size();
    RealizationStats st;
    st.p1.assign(g, 0.0);
    st.p2.assign(g, 0.0);
    st.p_dc.assign(g, 0.0);
    st.p_cc.assign(g, 0.0);

    const int n2 = clamp_probes(max_rx, rz.s2.size());
    const int n1 = clamp_probes(max_rx, rz.s1.size());
    if (n1 == 0 || n2 == 0) return st;

    // Slots 1 and 2: each source set listens to the other.
    std::vector<RxScan> slot1(n2), slot2(n1);
    for (int j = 0; j < n2; ++j) slot1[j] = scan_receiver(rz.s2[j], rz.s1, cfg, w.side, rng);
    for (int i = 0; i < n1; ++i) slot2[i] = scan_receiver(rz.s1[i], rz.s2, cfg, w.side, rng);

    double sum1 = 0, sum2 = 0;
    for (int j = 0; j < n2; ++j) sum1 += slot1[j].harvest_w;
    for (int i = 0; i < n1; ++i) sum2 += slot2[i].harvest_w;
    st.h_d2 = sum1 / n2;
    st.h_d1 = sum2 / n1;

    const bool cc = with_cc && !rz.relays.empty();
    if (!cc) {
        for (std::size_t t = 0; t < g; ++t) {
            int d1 = 0, d2 = 0;
            for (int j = 0; j < n2; ++j) d1 += slot1[j].gamma >= gammas[t];
            for (int i = 0; i < n1; ++i) d2 += slot2[i].gamma >= gammas[t];
            st.p1[t] = static_cast<double>(d1) / n2;
            st.p2[t] = static_cast<double>(d2) / n1;
            st.p_dc[t] = st.p1[t] * st.p2[t];
            st.p_cc[t] = st.p_dc[t];
        }
        return st;
    }

    // Slots 3 and 4: every relay retransmits; sources listen to their
    // nearest relay.
    std::vector<RxScan> slot3(n1), slot4(n2);
    for (int i = 0; i < n1; ++i) slot3[i] = scan_receiver(rz.s1[i], rz.relays, cfg, w.side, rng);
    for (int j = 0; j < n2; ++j) slot4[j] = scan_receiver(rz.s2[j], rz.relays, cfg, w.side, rng);

    double hs1r = 0, hs2r = 0;
    for (int i = 0; i < n1; ++i) hs1r += slot3[i].harvest_w;
    for (int j = 0; j < n2; ++j) hs2r += slot4[j].harvest_w;
    st.h_s1_r = hs1r / n1;
    st.h_s2_r = hs2r / n2;

    // Exchange is counted over node pairs: a probe succeeds together with
    // its partner, the nearest node of the other set. Pairs are anchored
    // at the denser source set so the anchoring perturbs the partner's own
    // nearest-neighbor distance as little as possible (the anchor sits at
    // the sparse set's spacing, farther than the partner's service
    // distance); anchoring at the sparse set would size-bias the partner.
    const bool anchor_s2 = cfg.lambda2 >= cfg.lambda1;
    const int n_anchor = anchor_s2 ? n2 : n1;
    const std::vector<RxScan>& anchor_direct = anchor_s2 ? slot1 : slot2;
    const std::vector<Point>& partner_set = anchor_s2 ? rz.s1 : rz.s2;
    const std::vector<Point>& partner_tx = anchor_s2 ? rz.s2 : rz.s1;

    std::vector<int> partner_idx(n_anchor);
    for (int k = 0; k < n_anchor; ++k)
        partner_idx[k] = static_cast<int>(anchor_direct[k].nearest);
    IndexRows partners(partner_idx, partner_set.size());

    std::vector<RxScan> partner_direct(partners.rows.size()),
        partner_relay(partners.rows.size());
    for (std::size_t r = 0; r < partners.rows.size(); ++r) {
        const Point& p = partner_set[partners.rows[r]];
        partner_direct[r] = scan_receiver(p, partner_tx, cfg, w.side, rng);
        partner_relay[r] = scan_receiver(p, rz.relays, cfg, w.side, rng);
    }

    // Relay rows: the first K relays (harvest metrics) plus every relay
    // that is nearest to a probe or partner (decode flags).
    const int n_relay_probes = clamp_probes(max_rx, rz.relays.size());
    std::vector<int> relay_idx;
    relay_idx.reserve(n_relay_probes + n1 + n2 + partners.rows.size());
    for (int k = 0; k < n_relay_probes; ++k) relay_idx.push_back(k);
    for (int i = 0; i < n1; ++i) relay_idx.push_back(static_cast<int>(slot3[i].nearest));
    for (int j = 0; j < n2; ++j) relay_idx.push_back(static_cast<int>(slot4[j].nearest));
    for (const auto& s : partner_relay) relay_idx.push_back(static_cast<int>(s.nearest));
    IndexRows relays_used(relay_idx, rz.relays.size());

    std::vector<std::vector<std::uint8_t>> relay_dec1(relays_used.rows.size()),
        relay_dec2(relays_used.rows.size());  // [row][gamma]
    double hr1 = 0, hr2 = 0;
    for (std::size_t r = 0; r < relays_used.rows.size(); ++r) {
        const Point& rp = rz.relays[relays_used.rows[r]];
        const RxScan a = scan_receiver(rp, rz.s1, cfg, w.side, rng);
        const RxScan b = scan_receiver(rp, rz.s2, cfg, w.side, rng);
        relay_dec1[r].resize(g);
        relay_dec2[r].resize(g);
        for (std::size_t t = 0; t < g; ++t) {
            relay_dec1[r][t] = a.gamma >= gammas[t];
            relay_dec2[r][t] = b.gamma >= gammas[t];
        }
        if (relays_used.rows[r] < n_relay_probes) {
            hr1 += a.harvest_w;
            hr2 += b.harvest_w;
        }
    }
    if (n_relay_probes > 0) {
        st.h_r_s1 = hr1 / n_relay_probes;
        st.h_r_s2 = hr2 / n_relay_probes;
    }

    // Success of an s1-side receiver: direct decode, or its nearest relay
    // decoded the opposite-set message and the receiver decodes that relay.
    auto s1_side_success = [&](const RxScan& direct, const RxScan& via_relay,
                               std::size_t t) {
        const int row = relays_used.row_of[via_relay.nearest];
        return direct.gamma >= gammas[t] ||
               (relay_dec2[row][t] && via_relay.gamma >= gammas[t]);
    };
    auto s2_side_success = [&](const RxScan& direct, const RxScan& via_relay,
                               std::size_t t) {
        const int row = relays_used.row_of[via_relay.nearest];
        return direct.gamma >= gammas[t] ||
               (relay_dec1[row][t] && via_relay.gamma >= gammas[t]);
    };

    for (std::size_t t = 0; t < g; ++t) {
        int d1 = 0, d2 = 0, pairs = 0;
        for (int j = 0; j < n2; ++j) d1 += slot1[j].gamma >= gammas[t];
        for (int i = 0; i < n1; ++i) d2 += slot2[i].gamma >= gammas[t];
        for (int k = 0; k < n_anchor; ++k) {
            const bool own = anchor_s2 ? s2_side_success(slot1[k], slot4[k], t)
                                       : s1_side_success(slot2[k], slot3[k], t);
            const int pr = partners.row_of[partner_idx[k]];
            const bool partner =
                anchor_s2 ? s1_side_success(partner_direct[pr], partner_relay[pr], t)
                          : s2_side_success(partner_direct[pr], partner_relay[pr], t);
            pairs += own && partner;
        }
        st.p1[t] = static_cast<double>(d1) / n2;
        st.p2[t] = static_cast<double>(d2) / n1;
        st.p_dc[t] = st.p1[t] * st.p2[t];
        st.p_cc[t] = static_cast<double>(pairs) / n_anchor;
    }
    return st;
}

// Ensemble conversion pipeline: the cubic acts on the mean slot power; the
// standard error follows by the delta method.
McEstimate convert_ensemble(const std::vector<McEstimate>& slots, const RectennaModel& m) {
    McEstimate out;
    out.n = slots.empty() ? 0 : slots.front().n;
    double var = 0;
    for (const auto& s : slots) {
        out.mean += converted_harvested_power(s.mean, m);
        const double d = std::max(1e-9 * std::max(s.mean, 1e-6), 1e-12);
        const double der = (converted_harvested_power(s.mean + d, m) -
                            converted_harvested_power(std::max(s.mean - d, 0.0), m)) /
                           (2.0 * d);
        var += der * der * s.std_error * s.std_error;
    }
    out.std_error = std::sqrt(var);
    return out;
}

McEstimate convert_per_realization(const std::vector<const std::vector<double>*>& comps,
                                   const RectennaModel& m) {
    const std::size_t n = comps.front()->size();
    std::vector<double> v(n, 0.0);
    for (const auto* c : comps)
        for (std::size_t i = 0; i < n; ++i) v[i] += converted_harvested_power((*c)[i], m);
    return McEstimate::from_values(v);
}

}  // namespace

ValidationEstimates estimate_validation(const NetworkConfig& cfg, const SimOptions& opt) {
    if (opt.n_realizations < 2)
        throw std::invalid_argument("estimate_validation: need at least 2 realizations");
    const Window w{opt.side};
    const bool with_cc = cfg.lambdaR > 0.0;
    const std::vector<double> gammas = {cfg.gamma_star};
    const int n = opt.n_realizations;

    std::vector<RealizationStats> stats(n);
    parallel_for(n, opt.threads, [&](int i) {
        stats[i] = run_realization(cfg, w, opt.master_seed, i, gammas, with_cc,
                                   opt.max_receivers_per_slot);
    });

    auto collect = [&](auto getter) {
        std::vector<double> v(n);
        for (int i = 0; i < n; ++i) v[i] = getter(stats[i]);
        return v;
    };

    const auto v_p1 = collect([](const RealizationStats& s) { return s.p1[0]; });
    const auto v_p2 = collect([](const RealizationStats& s) { return s.p2[0]; });
    const auto v_pdc = collect([](const RealizationStats& s) { return s.p_dc[0]; });
    const auto v_pcc = collect([](const RealizationStats& s) { return s.p_cc[0]; });
    const auto v_hd1 = collect([](const RealizationStats& s) { return s.h_d1; });
    const auto v_hd2 = collect([](const RealizationStats& s) { return s.h_d2; });
    const auto v_hs1r = collect([](const RealizationStats& s) { return s.h_s1_r; });
    const auto v_hs2r = collect([](const RealizationStats& s) { return s.h_s2_r; });
    const auto v_hrs1 = collect([](const RealizationStats& s) { return s.h_r_s1; });
    const auto v_hrs2 = collect([](const RealizationStats& s) { return s.h_r_s2; });

    auto vsum = [&](const std::vector<double>& a, const std::vector<double>& b) {
        std::vector<double> v(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) v[i] = a[i] + b[i];
        return v;
    };

    ValidationEstimates est;
    est.has_cc = with_cc;
    est.p_dc1 = McEstimate::from_values(v_p1);
    est.p_dc2 = McEstimate::from_values(v_p2);
    est.p_dc = McEstimate::from_values(v_pdc);
    est.p_cc = McEstimate::from_values(v_pcc);
    est.pdps_d1 = McEstimate::from_values(v_hd1);
    est.pdps_d2 = McEstimate::from_values(v_hd2);
    est.pdps_c1 = McEstimate::from_values(vsum(v_hd1, v_hs1r));
    est.pdps_c2 = McEstimate::from_values(vsum(v_hd2, v_hs2r));
    est.pdps_cR = McEstimate::from_values(vsum(v_hrs1, v_hrs2));

    if (opt.per_realization_conversion) {
        est.peh_d1 = convert_per_realization({&v_hd1}, cfg.rectenna);
        est.peh_d2 = convert_per_realization({&v_hd2}, cfg.rectenna);
        est.peh_c1 = convert_per_realization({&v_hd1, &v_hs1r}, cfg.rectenna);
        est.peh_c2 = convert_per_realization({&v_hd2, &v_hs2r}, cfg.rectenna);
        est.peh_cR = convert_per_realization({&v_hrs1, &v_hrs2}, cfg.rectenna);
    } else {
        est.peh_d1 = convert_ensemble({est.pdps_d1}, cfg.rectenna);
        est.peh_d2 = convert_ensemble({est.pdps_d2}, cfg.rectenna);
        est.peh_c1 = convert_ensemble(
            {McEstimate::from_values(v_hd1), McEstimate::from_values(v_hs1r)}, cfg.rectenna);
        est.peh_c2 = convert_ensemble(
            {McEstimate::from_values(v_hd2), McEstimate::from_values(v_hs2r)}, cfg.rectenna);
        est.peh_cR = convert_ensemble(
            {McEstimate::from_values(v_hrs1), McEstimate::from_values(v_hrs2)}, cfg.rectenna);
    }

    if (!opt.dump_csv_path.empty()) {
        std::ofstream out(opt.dump_csv_path);
        out << "realization_index,metric,value\n";
        char buf[64];
        auto row = [&](int i, const char* name, double v) {
            std::snprintf(buf, sizeof buf, "%.17g", v);
            out << i << ',' << name << ',' << buf << '\n';
        };
        for (int i = 0; i < n; ++i) {
            row(i, "p_dc1", v_p1[i]);
            row(i, "p_dc2", v_p2[i]);
            row(i, "p_dc", v_pdc[i]);
            if (with_cc) row(i, "p_cc", v_pcc[i]);
            row(i, "pdps_d1", v_hd1[i]);
            row(i, "pdps_d2", v_hd2[i]);
            if (with_cc) {
                row(i, "pdps_c1", v_hd1[i] + v_hs1r[i]);
                row(i, "pdps_c2", v_hd2[i] + v_hs2r[i]);
                row(i, "pdps_cR", v_hrs1[i] + v_hrs2[i]);
            }
        }
    }
    return est;
}

std::vector<McEstimate> estimate_slot_success_grid(double lambda_tx,
                                                   const NetworkConfig& cfg,
                                                   const std::vector<double>& gamma_grid,
                                                   const SimOptions& opt) {
    const Window w{opt.side};
    const int n = opt.n_realizations;
    const std::size_t g = gamma_grid.size();
    std::vector<std::vector<double>> fractions(n);

    parallel_for(n, opt.threads, [&](int i) {
        RngStream rng(opt.master_seed, static_cast<std::uint64_t>(i));
        const auto tx = sample_ppp(lambda_tx, w, rng);
        const int probes = opt.max_receivers_per_slot > 0 ? opt.max_receivers_per_slot : 256;
        std::vector<double>& fr = fractions[i];
        fr.assign(g, 0.0);
        if (tx.empty()) return;
        for (int p = 0; p < probes; ++p) {
            const Point rx{rng.uniform() * w.side, rng.uniform() * w.side};
            const RxScan s = scan_receiver(rx, tx, cfg, w.side, rng);
            for (std::size_t t = 0; t < g; ++t) fr[t] += s.gamma >= gamma_grid[t];
        }
        for (std::size_t t = 0; t < g; ++t) fr[t] /= probes;
    });

    std::vector<McEstimate> out(g);
    std::vector<double> col(n);
    for (std::size_t t = 0; t < g; ++t) {
        for (int i = 0; i < n; ++i) col[i] = fractions[i][t];
        out[t] = McEstimate::from_values(col);
    }
    return out;
}

ExchangeGridEstimates estimate_exchange_grid(const NetworkConfig& cfg,
                                             const std::vector<double>& gamma_grid,
                                             const SimOptions& opt) {
    const Window w{opt.side};
    const int n = opt.n_realizations;
    const std::size_t g = gamma_grid.size();
    std::vector<RealizationStats> stats(n);
    parallel_for(n, opt.threads, [&](int i) {
        stats[i] = run_realization(cfg, w, opt.master_seed, i, gamma_grid,
                                   cfg.lambdaR > 0.0, opt.max_receivers_per_slot);
    });

    ExchangeGridEstimates out;
    out.p_dc.resize(g);
    out.p_cc.resize(g);
    std::vector<double> col(n);
    for (std::size_t t = 0; t < g; ++t) {
        for (int i = 0; i < n; ++i) col[i] = stats[i].p_dc[t];
        out.p_dc[t] = McEstimate::from_values(col);
        for (int i = 0; i < n; ++i) col[i] = stats[i].p_cc[t];
        out.p_cc[t] = McEstimate::from_values(col);
    }
    return out;
}

HarvestSlotEstimates estimate_slot_harvest(double lambda_tx, const NetworkConfig& cfg,
                                           const SimOptions& opt) {
    const Window w{opt.side};
    const int n = opt.n_realizations;
    struct Row {
        double pdps = 0, pr = 0, cond = 0, campbell = 0;
        bool has_cond = false;
    };
    std::vector<Row> rows(n);

    parallel_for(n, opt.threads, [&](int i) {
        RngStream rng(opt.master_seed, static_cast<std::uint64_t>(i));
        const auto tx = sample_ppp(lambda_tx, w, rng);
        const int probes = opt.max_receivers_per_slot > 0 ? opt.max_receivers_per_slot : 128;
        if (tx.empty()) return;
        double pdps = 0, pr = 0, cond = 0, camp = 0;
        int n_above = 0;
        for (int p = 0; p < probes; ++p) {
            const Point rx{rng.uniform() * w.side, rng.uniform() * w.side};
            const RxScan s = scan_receiver(rx, tx, cfg, w.side, rng);
            pdps += s.harvest_w;
            camp += s.bounded_sum;
            if (s.h_c >= cfg.psi) {
                pr += 1.0;
                cond += s.h_c;
                ++n_above;
            }
        }
        Row& r = rows[i];
        r.pdps = pdps / probes;
        r.pr = pr / probes;
        if (n_above > 0) {
            r.cond = cond / n_above;
            r.has_cond = true;
        }
        r.campbell = camp / probes;
    });

    std::vector<double> v1(n), v2(n), v4(n);
    std::vector<double> v3;
    v3.reserve(n);
    for (int i = 0; i < n; ++i) {
        v1[i] = rows[i].pdps;
        v2[i] = rows[i].pr;
        v4[i] = rows[i].campbell;
        if (rows[i].has_cond) v3.push_back(rows[i].cond);
    }
    HarvestSlotEstimates out;
    out.pdps = McEstimate::from_values(v1);
    out.pr_fade_above_psi = McEstimate::from_values(v2);
    out.mean_fade_given_above = McEstimate::from_values(v3);
    out.campbell_sum = McEstimate::from_values(v4);
    return out;
}

LifetimeSimResult simulate_lifetime(Scenario sc, bool with_harvesting,
                                    const NetworkConfig& cfg, const SimOptions& opt) {
    struct RoleDrain {
        double cons = 0;
        double peh = 0, peh_se = 0;
    };
    std::vector<RoleDrain> roles;

    if (!with_harvesting) {
        roles.push_back({cp_consumption(sc, NodeRole::Source1, cfg), 0, 0});
        roles.push_back({cp_consumption(sc, NodeRole::Source2, cfg), 0, 0});
        if (sc.kind == ScenarioKind::CooperativeCommunication)
            roles.push_back({cp_consumption(sc, NodeRole::Relay, cfg), 0, 0});
    } else {
        NetworkConfig sim_cfg = cfg;
        if (sc.kind == ScenarioKind::DirectCommunication)
            sim_cfg.lambdaR = 0.0;  // relay field does not affect DC harvesting
        const ValidationEstimates est = estimate_validation(sim_cfg, opt);
        if (sc.kind == ScenarioKind::DirectCommunication) {
            roles.push_back({cp_consumption(sc, NodeRole::Source1, cfg), est.peh_d1.mean,
                             est.peh_d1.std_error});
            roles.push_back({cp_consumption(sc, NodeRole::Source2, cfg), est.peh_d2.mean,
                             est.peh_d2.std_error});
        } else {
            roles.push_back({cp_consumption(sc, NodeRole::Source1, cfg), est.peh_c1.mean,
                             est.peh_c1.std_error});
            roles.push_back({cp_consumption(sc, NodeRole::Source2, cfg), est.peh_c2.mean,
                             est.peh_c2.std_error});
            roles.push_back({cp_consumption(sc, NodeRole::Relay, cfg), est.peh_cR.mean,
                             est.peh_cR.std_error});
        }
    }

    double best_cps = kInf, best_closed = kInf, best_se = 0;
    for (const auto& r : roles) {
        const double drain = r.cons - cfg.slot_seconds * r.peh;
        if (drain <= 0.0) continue;  // this role never depletes
        // Mean battery trajectory: completed CPs until the level would go
        // negative; equals floor(B / drain).
        const double cps = std::floor(cfg.battery_joules / drain);
        if (cps < best_cps) {
            best_cps = cps;
            best_closed = cfg.battery_joules / drain;
            best_se = cfg.battery_joules / (drain * drain) * cfg.slot_seconds * r.peh_se;
        }
    }

    LifetimeSimResult out;
    out.cps = McEstimate{best_cps, best_se, opt.n_realizations};
    out.closed_form_cps = best_closed;
    return out;
}

}  // namespace wehnet
