#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "relaystab/optimizer.hpp"
#include "relaystab/simulator.hpp"

using namespace relaystab;

namespace {
const PhyParams kPhy{10.0, 1.0};

LinkProbabilities links2(double s1d, double s2d, double s1r, double s2r, double rd) {
    ChannelVariances v;
    v.source_dest = {s1d, s2d};
    v.source_relay = {s1r, s2r};
    v.relay_dest = rd;
    return build_links(kPhy, v);
}

LinkProbabilities perfect1() {
    LinkProbabilities L;
    L.M = 1;
    L.f_sd = {1.0};
    L.f_sr = {0.5};
    L.f_rd = 0.5;
    L.sd_r = {{0.9, 0.0, 0.0}};
    L.rd_s = {{0.4, 0.0, 0.0}};
    return L;
}

SimConfig cfg2(Scheme s, std::vector<double> w, std::vector<std::vector<double>> a,
               std::vector<double> lam, std::int64_t horizon, std::uint64_t seed) {
    SimConfig c;
    c.policy.scheme = s;
    c.policy.w = std::move(w);
    c.policy.action = std::move(a);
    c.demand.lambda = std::move(lam);
    c.horizon = horizon;
    c.warmup = horizon / 10;
    c.seed = seed;
    return c;
}
}  // namespace

TEST_CASE("no traffic, no departures") {
    auto c = cfg2(Scheme::SBC, {0.5, 0.5}, {{0.2, 0.1}, {0.0, 0.3}}, {0.0, 0.0}, 20000, 3);
    const auto L = links2(0.3, 0.5, 0.6, 0.7, 0.4);
    const auto st = simulate(c, L);
    CHECK(st.departure_rate[0] == 0.0);
    CHECK(st.departure_rate[1] == 0.0);
    CHECK(st.mean_source_queue[0] == 0.0);
    CHECK(st.arrivals_total[0] == 0);
}

TEST_CASE("perfect direct channel delivers in one slot") {
    SimConfig c;
    c.policy = Policy::zeros(Scheme::SBC, {1.0});
    c.demand.lambda = {0.5};
    c.horizon = 1'000'000;
    c.warmup = 10'000;
    c.seed = 9;
    const auto st = simulate(c, perfect1());
    CHECK(std::abs(st.mean_delay[0] - 1.0) < 0.01);
    CHECK(st.delay_histogram[0].size() == 1);  // every delivery takes exactly one slot
}

TEST_CASE("identical seeds give identical statistics") {
    const auto L = links2(0.3, 0.5, 0.6, 0.7, 0.4);
    auto c = cfg2(Scheme::DBC, {0.4, 0.6}, {{0.2, 0.1}, {0.1, 0.3}}, {0.1, 0.15}, 50000, 77);
    const auto a = simulate(c, L);
    const auto b = simulate(c, L);
    CHECK(a.departure_rate == b.departure_rate);
    CHECK(a.mean_delay == b.mean_delay);
    CHECK(a.mean_source_queue == b.mean_source_queue);
    CHECK(a.delay_histogram == b.delay_histogram);
}

TEST_CASE("packet conservation is exact") {
    const auto L = links2(0.3, 0.5, 0.6, 0.7, 0.4);
    for (Scheme s : {Scheme::SBC, Scheme::DBC, Scheme::CCMA, Scheme::CM_DBC}) {
        auto a = s == Scheme::CCMA ? std::vector<std::vector<double>>{{0, 0}, {0, 0}}
                                   : std::vector<std::vector<double>>{{0.2, 0.1}, {0.1, 0.3}};
        auto c = cfg2(s, {0.4, 0.6}, a, {0.2, 0.25}, 80000, 31);
        const auto st = simulate(c, L);
        for (int j = 0; j < 2; ++j)
            CHECK(st.arrivals_total[j] == st.delivered_total[j] + st.queued_at_end[j]);
        CHECK(st.half_duplex_violations == 0);
    }
}

TEST_CASE("dominant mode reproduces the analytic service rate") {
    const auto L = links2(0.8, 0.08, 0.85, 0.9, 0.97);
    SimConfig c = cfg2(Scheme::SBC, {0.45, 0.55}, {{0.3, 0.2}, {0.1, 0.4}}, {0.0, 0.0},
                       1'000'000, 13);
    c.dominant_mode = true;
    c.saturated = {0, 1};
    const auto st = simulate(c, L);
    const auto ev = evaluate_rates(c.policy, L, c.demand);
    for (int j = 0; j < 2; ++j) {
        CHECK(std::abs(st.departure_rate[j] - ev.mu[j]) / ev.mu[j] < 0.01);
    }
}

TEST_CASE("relay action frequencies track the policy") {
    const auto L = links2(0.8, 0.08, 0.85, 0.9, 0.97);
    SimConfig c = cfg2(Scheme::DBC, {0.5, 0.5}, {{0.25, 0.15}, {0.1, 0.2}}, {0.0, 0.0},
                       400'000, 19);
    c.dominant_mode = true;
    c.saturated = {0, 1};
    const auto st = simulate(c, L);
    // every slot is busy, the relay transmits with row-sum probability
    const double p_tx = 0.5 * (0.25 + 0.15) + 0.5 * (0.1 + 0.2);
    const double n = static_cast<double>(c.horizon);
    const double se = std::sqrt(p_tx * (1 - p_tx) / n);
    CHECK(std::abs(st.slots_interfering / n - p_tx) < 3 * se);
    CHECK(st.slots_transmit_idle == 0);
}

TEST_CASE("two seeds agree within the batch-means error") {
    const auto L = links2(0.8, 0.08, 0.85, 0.9, 0.97);
    auto c = cfg2(Scheme::DBC, {0.4, 0.6}, {{0.12, 0.0}, {0.0, 0.6}}, {0.1, 0.1}, 400'000, 101);
    const auto a = simulate(c, L);
    c.seed = 202;
    const auto b = simulate(c, L);
    for (int j = 0; j < 2; ++j) {
        const double se = std::hypot(a.delay_std_error[j], b.delay_std_error[j]);
        CHECK(std::abs(a.mean_delay[j] - b.mean_delay[j]) < 2.5 * se);
    }
}

TEST_CASE("real system sustains the dominant-system throughput on diagonal policies") {
    // the per-source dominant chain is distribution-identical to the real one
    // when the action matrix is diagonal, so the real system must hold the
    // analytic rate up to simulation noise
    const auto L = links2(0.8, 0.08, 0.85, 0.9, 0.97);
    auto c = cfg2(Scheme::SBC, {0.4, 0.6}, {{0.12, 0.0}, {0.0, 0.42}}, {0.0, 0.0}, 600'000, 55);
    const auto ev = evaluate_rates(c.policy, L, {{0.0, 0.0}});
    for (double frac : {0.5, 0.8, 0.95}) {
        auto cc = c;
        cc.demand.lambda = {frac * ev.lam_s[0], frac * ev.lam_s[1]};
        const auto st = simulate(cc, L);
        for (int j = 0; j < 2; ++j) {
            const double lam = cc.demand.lambda[j];
            CHECK(st.delivery_rate[j] > lam - 0.01);  // all offered traffic is carried
        }
    }
}

TEST_CASE("stability probe verdicts straddle the boundary") {
    const auto L = links2(0.8, 0.08, 0.85, 0.9, 0.97);
    SimConfig c = cfg2(Scheme::SBC, {0.4, 0.6}, {{0.12, 0.0}, {0.0, 0.42}}, {0.0, 0.0},
                       400'000, 71);
    c.warmup = 40'000;
    // probe source 2 in its dominant configuration
    c.dominant_mode = true;
    c.saturated = {0};
    const auto ev = evaluate_rates(c.policy, L,
                                   {{0.999999, 0.0}});  // saturated busy for the bound
    const double bound = ev.lam_s[1];
    c.demand.lambda = {0.0, bound};
    const auto res = stability_probe(c, L, {0.9, 1.1});
    REQUIRE(res.size() == 2);
    CHECK(res[0].all_bounded);
    CHECK(res[1].any_growing);
    // saturated source is not judged
    CHECK(res[0].source_queue[0] == QueueVerdict::Inconclusive);
}

TEST_CASE("delay measurement marks unstable grid points") {
    const auto L = links2(0.8, 0.08, 0.85, 0.9, 0.97);
    SimConfig c = cfg2(Scheme::DBC, {0.4, 0.6}, {{0.12, 0.0}, {0.0, 0.6}}, {0.0, 0.0},
                       200'000, 5);
    const auto ev = evaluate_rates(c.policy, L, {{0.0, 0.0}});
    std::vector<DemandVector> grid;
    grid.push_back({{0.3 * ev.lam_s[0], 0.1}});
    grid.push_back({{1.2 * ev.lam_s[0], 0.1}});
    const auto curve = delay_measurement(c, L, grid);
    REQUIRE(curve.size() == 2);
    CHECK(curve[0].stable);
    CHECK(curve[0].mean_delay[0] > 1.0);
    CHECK_FALSE(curve[1].stable);
}
