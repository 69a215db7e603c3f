#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "relaystab/optimizer.hpp"

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

LinkProbabilities links1(double s1d, double s1r, double rd) {
    ChannelVariances v;
    v.source_dest = {s1d};
    v.source_relay = {s1r};
    v.relay_dest = rd;
    return build_links(kPhy, v);
}
}  // namespace

TEST_CASE("single-user solver recovers the closed-form action") {
    // strong relay-destination geometry where the optimum is analytic
    const auto L = links1(0.3, 0.8, 0.8);
    const auto su = single_user_sbc_optimum(L);
    REQUIRE(su.condition_holds);
    ScaOptions opts;
    opts.polish = false;
    const auto r = fpp_sca(Scheme::SBC, L, {1.0}, {1.0}, opts);
    REQUIRE(r.success);
    CHECK(std::abs(r.action[0][0] - su.optimal_action) < 1e-3);
    CHECK(r.objective == doctest::Approx(su.max_stable_throughput).epsilon(1e-4));
}

TEST_CASE("solver meets the grid oracle on a two-source case") {
    const auto L = links2(0.8, 0.08, 0.85, 0.9, 0.97);
    for (const auto& x : {std::vector<double>{1.0, 1.0}, std::vector<double>{1.0, 0.0}}) {
        const auto orc = grid_oracle(Scheme::SBC, L, {0.5, 0.5}, x);
        ScaOptions opts;
        opts.polish = false;
        const auto r = fpp_sca(Scheme::SBC, L, {0.5, 0.5}, x, opts);
        REQUIRE(r.success);
        CHECK(r.objective >= 0.99 * orc.objective);
        CHECK(r.final_slack <= 1e-8);
        CHECK(r.max_residual <= 1e-9);
    }
}

TEST_CASE("slack norms and late objectives are monotone") {
    const auto L = links2(0.02, 0.84, 0.97, 0.93, 0.03);
    ScaOptions opts;
    opts.polish = false;
    const auto r = fpp_sca(Scheme::DBC, L, {0.4, 0.6}, {1.0, 1.0}, opts);
    REQUIRE(r.success);
    REQUIRE(r.slack_history.size() >= 2);
    for (std::size_t k = 1; k < r.slack_history.size(); ++k)
        CHECK(r.slack_history[k] <= r.slack_history[k - 1] + 1e-9);
    // once the slacks vanish the restriction makes each iterate feasible for
    // the next subproblem, so the minimized objective cannot increase
    std::size_t first_clean = r.slack_history.size();
    for (std::size_t k = 0; k < r.slack_history.size(); ++k)
        if (r.slack_history[k] <= 1e-10) {
            first_clean = k;
            break;
        }
    for (std::size_t k = first_clean + 1; k < r.objective_history.size(); ++k)
        CHECK(r.objective_history[k] <= r.objective_history[k - 1] + 1e-7);
}

TEST_CASE("solver runs are deterministic") {
    const auto L = links2(0.75, 0.8, 0.63, 0.73, 0.85);
    const auto a = fpp_sca(Scheme::SBC, L, {0.3, 0.7}, {1.0, 0.5});
    const auto b = fpp_sca(Scheme::SBC, L, {0.3, 0.7}, {1.0, 0.5});
    REQUIRE(a.success);
    CHECK(a.objective == b.objective);
    CHECK(a.action == b.action);
    CHECK(a.iterations == b.iterations);
}

TEST_CASE("grid oracle refuses what it cannot certify") {
    const auto L = links2(0.3, 0.5, 0.6, 0.7, 0.4);
    CHECK_THROWS_AS(grid_oracle(Scheme::SBC, L, {0.5, 0.5}, {1.0, 1.0}, 0.05),
                    std::invalid_argument);
    ChannelVariances v3;
    v3.source_dest = {0.3, 0.4, 0.5};
    v3.source_relay = {0.3, 0.4, 0.5};
    v3.relay_dest = 0.5;
    const auto L3 = build_links(kPhy, v3);
    CHECK_THROWS_AS(grid_oracle(Scheme::SBC, L3, {0.3, 0.3, 0.4}, {1, 1, 1}),
                    std::invalid_argument);
}

TEST_CASE("grid oracle matches the single-user scan") {
    const auto L = links1(0.3, 0.8, 0.8);
    const auto orc = grid_oracle(Scheme::SBC, L, {1.0}, {1.0});
    const auto su = single_user_sbc_optimum(L);
    CHECK(std::abs(orc.action[0][0] - su.optimal_action) <= 0.02 + 1e-12);
    CHECK(orc.objective >= su.max_stable_throughput - 0.02);
}

TEST_CASE("all-zero grid point reproduces the CCMA support value") {
    const auto L = links2(0.75, 0.8, 0.63, 0.73, 0.85);
    // both sources helped here, so CCMA equals the zero-action SBC policy
    const auto ccma = ccma_throughput(L, {0.5, 0.5});
    Policy z = Policy::zeros(Scheme::SBC, {0.5, 0.5});
    const auto ev = evaluate_rates(z, L, {{0.0, 0.0}});
    CHECK(ev.lam_s[0] == doctest::Approx(ccma[0]).epsilon(1e-14));
    CHECK(ev.lam_s[1] == doctest::Approx(ccma[1]).epsilon(1e-14));
}

TEST_CASE("degenerate time share pins the idle source") {
    const auto L = links2(0.75, 0.8, 0.63, 0.73, 0.85);
    const auto r = fpp_sca(Scheme::SBC, L, {1.0, 0.0}, {1.0, 1.0});
    REQUIRE(r.success);
    CHECK(r.lam_s[1] == 0.0);
    CHECK(r.lam_s[0] > 0.3);
    const auto orc = grid_oracle(Scheme::SBC, L, {1.0, 0.0}, {1.0, 1.0});
    CHECK(r.objective >= 0.99 * orc.objective);
}

TEST_CASE("region sweep hull contains every swept point") {
    const auto L = links2(0.8, 0.08, 0.85, 0.9, 0.97);
    RegionSweepConfig cfg;
    cfg.w1_grid = {0.0, 0.25, 0.5, 0.75, 1.0};
    cfg.weight_grid = {{1.0, 0.0}, {1.0, 1.0}, {0.3, 1.0}, {0.0, 1.0}};
    const auto sweep = region_sweep(Scheme::SBC, L, cfg);
    REQUIRE(sweep.points.size() == cfg.w1_grid.size() * cfg.weight_grid.size());
    for (const auto& p : sweep.points) {
        CHECK(hull_contains(sweep.hull, {p.lam_s[0], p.lam_s[1]}, 1e-9));
        if (p.w[0] == 1.0) CHECK(p.lam_s[1] == 0.0);
    }
}

TEST_CASE("constrained maximum respects feasibility") {
    const auto L = links2(0.8, 0.08, 0.85, 0.9, 0.97);
    // case-2 geometry: lam_s^1 up to ~0.97, so 0.5 is sustainable
    const auto cm = constrained_max_throughput(Scheme::SBC, L, 0, 0.5, 1);
    REQUIRE(cm.has_value());
    CHECK(cm->value > 0.1);
    // but 1.2 packets/slot is beyond any policy
    CHECK_FALSE(constrained_max_throughput(Scheme::SBC, L, 0, 1.2, 1).has_value());
}

TEST_CASE("min-delay search marks infeasible demand points") {
    const auto L = links2(0.8, 0.08, 0.85, 0.9, 0.97);
    const auto curve = min_delay_search(Scheme::SBC, L, 0, 0.3, 1, {0.05, 0.2, 0.95});
    REQUIRE(curve.size() == 3);
    CHECK(curve[0].feasible);
    CHECK(curve[1].feasible);
    CHECK_FALSE(curve[2].feasible);  // beyond the region
    CHECK(curve[0].delay <= curve[1].delay);
}
