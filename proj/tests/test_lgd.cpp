#include <catch2/catch_amalgamated.hpp>

#include <chrono>
#include <cmath>

#include "afesim/lgd.hpp"
#include "oracles.hpp"

using namespace afesim;

namespace {
const lgd::LandauParams kAfe{1.0, -1.8, 1.0, 1.0, 1.0};
const lgd::LandauParams kFe{-1.0, 1.0, 1e-6, 1.0, 1.0};
} // namespace

TEST_CASE("free energy basics") {
    SECTION("vanishes at p = 0 for any field") {
        for (double e : {-2.0, 0.0, 0.4, 11.0})
            CHECK(lgd::free_energy(kAfe, 0.0, e) == 0.0);
    }
    SECTION("even in p at zero field") {
        for (double p : {0.1, 0.7, 1.3, 2.9})
            CHECK(lgd::free_energy(kAfe, p, 0.0) ==
                  Catch::Approx(lgd::free_energy(kAfe, -p, 0.0)).epsilon(1e-14));
    }
    SECTION("matches an independent polynomial evaluation") {
        const double g = lgd::free_energy(kAfe, 1.0, 0.0);
        CHECK(g == Catch::Approx(0.5 - 0.45 + 1.0 / 6.0).epsilon(1e-14));
        CHECK(g == Catch::Approx(oracle::energy_direct(1.0, -1.8, 1.0, 1.0, 0.0)).epsilon(1e-14));
        CHECK(lgd::free_energy(kAfe, 0.73, 0.21) ==
              Catch::Approx(oracle::energy_direct(1.0, -1.8, 1.0, 0.73, 0.21)).epsilon(1e-13));
    }
}

TEST_CASE("equilibria: reference landscapes") {
    SECTION("AFE at zero field has exactly one stable root, p = 0") {
        const auto eq = lgd::equilibria(kAfe, 0.0);
        int stable = 0;
        for (const auto& q : eq)
            if (q.stable) {
                ++stable;
                CHECK(std::abs(q.p) < 1e-12);
            }
        CHECK(stable == 1);
        // oracle: dense-grid minimization finds the same single minimum
        const auto minima = oracle::grid_minima(kAfe, 0.0);
        REQUIRE(minima.size() == 1);
        CHECK(std::abs(minima[0]) < 2e-4);
    }
    SECTION("FE double well at zero field") {
        const auto eq = lgd::equilibria(kFe, 0.0);
        REQUIRE(eq.size() == 3);
        CHECK(eq[0].stable);
        CHECK(eq[0].p == Catch::Approx(-1.0).margin(1e-5));
        CHECK_FALSE(eq[1].stable);
        CHECK(std::abs(eq[1].p) < 1e-9);
        CHECK(eq[2].stable);
        CHECK(eq[2].p == Catch::Approx(1.0).margin(1e-5));
    }
    SECTION("field inside the hysteresis window: two stable, one unstable") {
        const auto eq = lgd::equilibria(kAfe, 0.25);
        int stable = 0, unstable = 0;
        for (const auto& q : eq) (q.stable ? stable : unstable)++;
        CHECK(stable == 2);
        CHECK(unstable == 1);
    }
    SECTION("root residuals stay below 1e-9") {
        for (double e : {-0.4, -0.2, 0.0, 0.19, 0.25, 0.3, 0.35}) {
            for (const auto& q : lgd::equilibria(kAfe, e))
                CHECK(std::abs(lgd::field_residual(kAfe, q.p, e)) < 1e-9);
        }
    }
}

TEST_CASE("equilibria agree with grid minimization on random landscapes") {
    oracle::Rng rng(0x5eed0001);
    const auto t0 = std::chrono::steady_clock::now();
    for (int trial = 0; trial < 100; ++trial) {
        lgd::LandauParams lp;
        lp.alpha = rng.uniform(0.2, 2.0); // AFE regime
        lp.beta = rng.uniform(-2.4, 1.0);
        lp.xi = rng.uniform(0.5, 2.0);
        const double e = rng.uniform(-1.0, 1.0);

        const auto eq = lgd::equilibria(lp, e);
        const auto minima = oracle::grid_minima(lp, e);

        for (const auto& q : eq) {
            CHECK(std::abs(lgd::field_residual(lp, q.p, e)) < 1e-9);
            if (!q.stable) continue;
            double best = 1e9;
            for (double m : minima) best = std::min(best, std::abs(m - q.p));
            INFO("stable root " << q.p << " at e=" << e);
            CHECK(best < 1e-3);
        }
        for (double m : minima) {
            double best = 1e9;
            for (const auto& q : eq)
                if (q.stable) best = std::min(best, std::abs(m - q.p));
            INFO("grid minimum " << m << " at e=" << e);
            CHECK(best < 1e-3);
        }
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    CHECK(secs < 10.0);
}

TEST_CASE("quasi-static stepping") {
    SECTION("identity step leaves the state alone") {
        lgd::BranchState st{0.0, 0.0};
        const auto r = lgd::step_quasistatic(st, kAfe, 0.0);
        CHECK(r.state.p == Catch::Approx(0.0).margin(1e-12));
        CHECK_FALSE(r.switched);
    }

    const auto folds = oracle::fold_fields(1.0, -1.8, 1.0); // ~0.3065 / ~0.1774

    SECTION("up-ramp switches where the low branch vanishes") {
        lgd::BranchState st{0.0, 0.0};
        double e_switch = -1.0;
        for (double e = 0.005; e <= 0.35 + 1e-12; e += 0.005) {
            const auto r = lgd::step_quasistatic(st, kAfe, e);
            if (r.switched && e_switch < 0.0) e_switch = e;
            st = r.state;
        }
        REQUIRE(e_switch > 0.0);
        CHECK(e_switch == Catch::Approx(folds.e_up).margin(0.0055));
        CHECK(st.p > 1.0); // high branch at e = 0.35
    }

    SECTION("down-ramp switches back and lands at p = 0") {
        // start on the high branch at e = 0.35
        auto eq = lgd::equilibria(kAfe, 0.35);
        lgd::BranchState st{eq.back().p, 0.35};
        double e_switch = -1.0;
        for (double e = 0.345; e >= -1e-12; e -= 0.005) {
            const auto r = lgd::step_quasistatic(st, kAfe, e);
            if (r.switched && e_switch < 0.0) e_switch = e;
            st = r.state;
        }
        REQUIRE(e_switch > 0.0);
        CHECK(e_switch == Catch::Approx(folds.e_down).margin(0.0055));
        CHECK(std::abs(st.p) < 1e-9); // volatility: back to zero at zero field
    }

    SECTION("refined switching fields match the closed-form folds to 1e-4") {
        const double up = lgd::switching_field(kAfe, {0.0, 0.0}, 0.4);
        CHECK(up == Catch::Approx(folds.e_up).margin(1e-4));
        auto eq = lgd::equilibria(kAfe, 0.35);
        const double down = lgd::switching_field(kAfe, {eq.back().p, 0.35}, 0.0);
        CHECK(down == Catch::Approx(folds.e_down).margin(1e-4));
    }
}

TEST_CASE("P-E loops") {
    SECTION("AFE loop is pinched: p = 0 at e = 0 on both passes") {
        const auto wave = lgd::triangle_wave(0.5, 0.0025);
        const auto loop = lgd::trace_pe_loop(kAfe, wave, {0.0, 0.0});
        bool saw_switch = false;
        for (const auto& pt : loop) {
            if (pt.switched) saw_switch = true;
            if (pt.e == 0.0) CHECK(std::abs(pt.p) < 1e-9);
        }
        CHECK(saw_switch);
    }
    SECTION("FE loop keeps a remnant polarization at e = 0") {
        const auto wave = lgd::triangle_wave(1.5, 0.005);
        lgd::BranchState init{1.0, 0.0};
        const auto loop = lgd::trace_pe_loop(kFe, wave, init);
        double max_abs_p_at_zero = 0.0;
        for (const auto& pt : loop)
            if (pt.e == 0.0) max_abs_p_at_zero = std::max(max_abs_p_at_zero, std::abs(pt.p));
        CHECK(max_abs_p_at_zero > 0.5);
    }
    SECTION("sub-window amplitude never switches") {
        const auto wave = lgd::triangle_wave(0.15, 0.0025);
        const auto loop = lgd::trace_pe_loop(kAfe, wave, {0.0, 0.0});
        for (const auto& pt : loop) {
            CHECK_FALSE(pt.switched);
            CHECK(lgd::equilibria(kAfe, pt.e).size() == 1);
        }
    }
    SECTION("second cycle of a periodic waveform reproduces the first exactly") {
        const auto wave = lgd::triangle_wave(0.5, 0.005, 2);
        const auto loop = lgd::trace_pe_loop(kAfe, wave, {0.0, 0.0});
        const std::size_t half = loop.size() / 2;
        REQUIRE(loop.size() == 2 * half);
        for (std::size_t i = 0; i < half; ++i) {
            CHECK(loop[i].e == loop[half + i].e);
            CHECK(loop[i].p == Catch::Approx(loop[half + i].p).margin(1e-12));
            CHECK(loop[i].switched == loop[half + i].switched);
        }
    }
}

TEST_CASE("branch continuity under step refinement") {
    // no-switch segment of the low branch; halving the field step should
    // halve the max |dp| to within a factor of 4
    auto max_dp = [](double step) {
        lgd::BranchState st{0.0, 0.0};
        double worst = 0.0;
        for (double e = step; e <= 0.15 + 1e-12; e += step) {
            const auto r = lgd::step_quasistatic(st, kAfe, e);
            REQUIRE_FALSE(r.switched);
            worst = std::max(worst, std::abs(r.state.p - st.p));
            st = r.state;
        }
        return worst;
    };
    const double d1 = max_dp(0.01);
    const double d2 = max_dp(0.005);
    CHECK(d2 < d1);
    CHECK(d1 / d2 > 1.0);
    CHECK(d1 / d2 < 4.0);
}

TEST_CASE("energy descends across a switching event") {
    oracle::Rng rng(0x5eed0002);
    for (int trial = 0; trial < 20; ++trial) {
        lgd::LandauParams lp;
        lp.alpha = rng.uniform(0.4, 1.5);
        lp.beta = rng.uniform(-2.2, -1.4);
        lp.xi = 1.0;
        const auto folds = oracle::fold_fields(lp.alpha, lp.beta, lp.xi);
        lgd::BranchState st{0.0, 0.0};
        const double step = 0.004;
        for (double e = step; e < folds.e_up + 0.1; e += step) {
            const auto r = lgd::step_quasistatic(st, lp, e);
            if (r.switched) {
                const double g_old = lgd::free_energy(lp, st.p, e);
                const double g_new = lgd::free_energy(lp, r.state.p, e);
                CHECK(g_new < g_old);
                break;
            }
            st = r.state;
        }
    }
}

TEST_CASE("branch state invariant holds after every step") {
    lgd::BranchState st{0.0, 0.0};
    const auto wave = lgd::triangle_wave(0.45, 0.005);
    for (double e : wave) {
        st = lgd::step_quasistatic(st, kAfe, e).state;
        CHECK(lgd::curvature(kAfe, st.p) > 0.0);
        CHECK(std::abs(lgd::field_residual(kAfe, st.p, e)) < 1e-9);
    }
}
