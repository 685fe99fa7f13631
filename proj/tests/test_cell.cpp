#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "afesim/calibration.hpp"
#include "afesim/cell.hpp"
#include "oracles.hpp"

using namespace afesim;
using Catch::Approx;

namespace {
const cell::CellContext& ctx() {
    static const cell::CellContext c = cell::make_cell_context(
        calibration::reference_device(), cell::OperatingVoltages{},
        calibration::bipolar_drift());
    return c;
}

bool same_film(const device::FilmState& a, const device::FilmState& b) {
    if (a.grains.size() != b.grains.size()) return false;
    for (std::size_t i = 0; i < a.grains.size(); ++i)
        if (a.grains[i].p != b.grains[i].p) return false;
    return true;
}
} // namespace

TEST_CASE("write then read returns the written bit") {
    auto c = cell::fresh_cell(ctx());
    c = cell::write(ctx(), std::move(c), 1);
    auto r = cell::read(ctx(), std::move(c));
    CHECK(r.bit == 1);
    c = cell::erase(ctx(), std::move(r.cell));
    r = cell::read(ctx(), std::move(c));
    CHECK(r.bit == 0);
}

TEST_CASE("write is idempotent") {
    auto c = cell::fresh_cell(ctx());
    c = cell::write(ctx(), std::move(c), 1);
    const auto once = c;
    c = cell::write(ctx(), std::move(c), 1);
    CHECK(same_film(once.film, c.film));
    CHECK(once.node_v == c.node_v);

    c = cell::erase(ctx(), std::move(c));
    const auto erased_once = c;
    c = cell::erase(ctx(), std::move(c));
    CHECK(same_film(erased_once.film, c.film));
}

TEST_CASE("read is non-destructive and repeatable") {
    auto c = cell::write(ctx(), cell::fresh_cell(ctx()), 1);
    const auto before = c.film;
    cell::ReadResult r{0, std::move(c), 0.0};
    for (int i = 0; i < 50; ++i) {
        r = cell::read(ctx(), std::move(r.cell));
        CHECK(r.bit == 1);
    }
    CHECK(same_film(before, r.cell.film)); // polarization untouched, exactly
}

TEST_CASE("write erases history") {
    // randomized op histories followed by the same saturating write must give
    // bit-identical states
    oracle::Rng rng(0xC0DE0001);
    std::optional<device::FilmState> reference;
    for (int trial = 0; trial < 4; ++trial) {
        auto c = cell::fresh_cell(ctx());
        const int ops = 2 + static_cast<int>(rng.uniform(0.0, 4.0));
        for (int i = 0; i < ops; ++i) {
            const double pick = rng.uniform(0.0, 3.0);
            if (pick < 1.0)
                c = cell::write(ctx(), std::move(c), rng.uniform(0.0, 1.0) > 0.5);
            else if (pick < 2.0)
                c = cell::erase(ctx(), std::move(c));
            else
                c = cell::hold(ctx(), std::move(c), 1.0).cell;
        }
        c = cell::write(ctx(), std::move(c), 1);
        if (!reference)
            reference = c.film;
        else
            CHECK(same_film(*reference, c.film));
    }
}

TEST_CASE("hold accounting identities") {
    auto c = cell::write(ctx(), cell::fresh_cell(ctx()), 1);
    SECTION("zero duration changes nothing") {
        const auto before = c;
        const auto h = cell::hold(ctx(), std::move(c), 0.0);
        CHECK(same_film(before.film, h.cell.film));
        CHECK(h.cell.drift_clock == before.drift_clock);
    }
    SECTION("drain-source leakage is exactly zero and hold power is gate leak only") {
        const auto h = cell::hold(ctx(), std::move(c), 123.0);
        CHECK(h.ds_leakage_power == 0.0);
        CHECK(h.hold_power == ctx().write_access.gate_leak * ctx().volts.v_m);
    }
}

TEST_CASE("clamped hold retains the bit, unclamped hold loses it") {
    SECTION("programmed cell still reads 1 after 1e4 s at the clamp") {
        auto c = cell::write(ctx(), cell::fresh_cell(ctx()), 1);
        c = cell::hold(ctx(), std::move(c), 1e4).cell;
        CHECK(cell::read(ctx(), std::move(c)).bit == 1);
    }
    SECTION("erased cell still reads 0 after 1e3 s") {
        auto c = cell::erase(ctx(), cell::fresh_cell(ctx()));
        c = cell::hold(ctx(), std::move(c), 1e3).cell;
        CHECK(cell::read(ctx(), std::move(c)).bit == 0);
    }
    SECTION("removing the clamp collapses a programmed cell to 0") {
        auto c = cell::write(ctx(), cell::fresh_cell(ctx()), 1);
        c = cell::hold(ctx(), std::move(c), 100.0, 0.0).cell;
        c = cell::hold(ctx(), std::move(c), 0.0).cell; // re-clamp
        CHECK(cell::read(ctx(), std::move(c)).bit == 0);
    }
}

TEST_CASE("ground write-0 leaves a smaller window than a negative erase") {
    auto c1 = cell::write(ctx(), cell::fresh_cell(ctx()), 1);
    c1 = cell::write(ctx(), std::move(c1), 0); // minor loop
    const double i_off_ground = cell::state_current(ctx(), c1, ctx().volts.v_m);

    auto c2 = cell::write(ctx(), cell::fresh_cell(ctx()), 1);
    c2 = cell::erase(ctx(), std::move(c2)); // full loop
    const double i_off_deep = cell::state_current(ctx(), c2, ctx().volts.v_m);

    CHECK(i_off_deep < i_off_ground);
    const double i_on = ctx().i_on0;
    CHECK(i_on / i_off_ground < i_on / i_off_deep);
}

TEST_CASE("voltage configuration validation") {
    cell::OperatingVoltages bad;
    bad.v_h = bad.v_w + 0.1; // below the access threshold requirement
    CHECK_THROWS_AS(cell::make_cell_context(calibration::reference_device(), bad,
                                            calibration::bipolar_drift()),
                    cell::ConfigurationError);
}

TEST_CASE("hold margin validation accepts the reference setup") {
    CHECK_NOTHROW(cell::validate_hold_margin(ctx()));
}

TEST_CASE("array disturb") {
    SECTION("ideal switch isolates unselected rows completely") {
        cell::AccessTransistor ideal;
        ideal.g_off = 0.0;
        const auto ctx2 = cell::make_cell_context(calibration::reference_device(),
                                                  cell::OperatingVoltages{},
                                                  calibration::bipolar_drift(), ideal);
        std::vector<cell::ArrayOp> ops{{cell::ArrayOp::Write, 0, 0, 1, 0.0}};
        const auto rep = cell::check_disturb(ctx2, 2, 2, ops);
        CHECK(rep.worst_node_excursion == 0.0);
        CHECK_FALSE(rep.switching);
    }
    SECTION("checkerboard write pass never disturbs unselected cells") {
        std::vector<cell::ArrayOp> ops;
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c)
                ops.push_back({cell::ArrayOp::Write, r, c, (r + c) % 2, 0.0});
        ops.push_back({cell::ArrayOp::Read, 0, 0, 0, 0.0});
        const auto rep = cell::check_disturb(ctx(), 2, 2, ops);
        CHECK_FALSE(rep.switching);
        CHECK(rep.worst_node_excursion < 0.2);
    }
    SECTION("a leaky access device at a marginal clamp level raises the flag") {
        cell::AccessTransistor leaky;
        leaky.g_off = 5e-12; // strongly coupled half-selected nodes
        cell::OperatingVoltages volts;
        const auto hw = device::hold_window(calibration::reference_device(), volts.v_w,
                                            volts.v_e, volts.v_m);
        volts.v_m = hw.v_high - 0.02; // park right at the window edge
        const auto ctx2 = cell::make_cell_context(calibration::reference_device(), volts,
                                                  calibration::bipolar_drift(), leaky);
        std::vector<cell::ArrayOp> ops{{cell::ArrayOp::Write, 0, 0, 1, 0.0},
                                       {cell::ArrayOp::Write, 0, 0, 1, 0.0}};
        const auto rep = cell::check_disturb(ctx2, 2, 1, ops);
        CHECK(rep.worst_node_excursion > 0.0);
        CHECK(rep.switching);
    }
}
