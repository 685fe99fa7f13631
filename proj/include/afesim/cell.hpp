#pragma once

// 2T1AF memory cell: write/erase through the write-access transistor,
// non-destructive read through the read path, and the clamped hold phase
// where the write transistor sees zero drain-source voltage.

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "afesim/device.hpp"
#include "afesim/reliability.hpp"

namespace afesim::cell {

struct OperatingVoltages {
    double v_w = 4.0;           // write-'1' bitline level
    double v_e = -2.0;          // erase bitline level
    double v_h = 5.0;           // wordline boost during writes
    double v_m = 1.5;           // hold / clamp level
    double vdd_read = 1.0;      // read-path supply
    double write_pulse = 10e-3; // s, full-settling write pulse

    bool valid(double access_v_th) const { return v_h > v_w + access_v_th; }
};

struct AccessTransistor {
    double r_on = 1e4;       // ohm
    double g_off = 1e-15;    // S, subthreshold conductance at its own V_GS
    double v_th = 0.7;       // V
    double gate_leak = 1e-11; // A, lumped gate leakage
    bool valid() const { return r_on > 0.0 && g_off >= 0.0 && gate_leak >= 0.0; }
};

struct CellState {
    double node_v = 0.0;      // storage-node voltage
    device::FilmState film;
    double drift_clock = 0.0; // accumulated hold time, s
    int stored_bit_intent = 0; // bookkeeping only
};

struct ConfigurationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Everything fixed for a cell's lifetime: device, voltages, access
// transistors, drift law, and the sense threshold derived from the two
// calibrated hold states.
struct CellContext {
    device::AfeFet dev;
    OperatingVoltages volts;
    AccessTransistor write_access;
    AccessTransistor read_access;
    reliability::DriftModel drift;
    double i_sense = 0.0;
    double i_on0 = 0.0;
    double i_off0 = 0.0;
    double p_on0 = 0.0;  // physical mean polarization of the two reference states
    double p_off0 = 0.0;
};

inline double state_current(const CellContext& ctx, const CellState& cell, double bias) {
    // evaluate without disturbing the stored film state
    const auto [sol, film] = device::solve_stack(ctx.dev, cell.film, bias);
    double v_int = sol.v_int;
    if (cell.drift_clock > 0.0) {
        const double decades = std::log10(1.0 + cell.drift_clock / ctx.drift.t0);
        const double mid = 0.5 * (ctx.p_on0 + ctx.p_off0);
        const double rate = (sol.p > mid) ? ctx.drift.rate_p : ctx.drift.rate_e;
        v_int -= rate * decades;
    }
    return device::drain_current(ctx.dev.mos, v_int, ctx.volts.vdd_read);
}

inline CellContext make_cell_context(device::AfeFet dev, OperatingVoltages volts,
                                     reliability::DriftModel drift,
                                     AccessTransistor write_access = {},
                                     AccessTransistor read_access = {}) {
    if (!volts.valid(write_access.v_th))
        throw ConfigurationError("wordline boost must exceed v_w plus the access threshold");
    CellContext ctx;
    ctx.dev = std::move(dev);
    ctx.volts = volts;
    ctx.write_access = write_access;
    ctx.read_access = read_access;
    ctx.drift = drift;

    auto on = device::programmed_state(ctx.dev, volts.v_w, volts.v_m);
    auto off = device::erased_state(ctx.dev, volts.v_w, volts.v_e, volts.v_m);
    const auto [sol_on, f1] = device::solve_stack(ctx.dev, std::move(on), volts.v_m);
    const auto [sol_off, f2] = device::solve_stack(ctx.dev, std::move(off), volts.v_m);
    ctx.i_on0 = device::drain_current(ctx.dev.mos, sol_on.v_int, volts.vdd_read);
    ctx.i_off0 = device::drain_current(ctx.dev.mos, sol_off.v_int, volts.vdd_read);
    ctx.p_on0 = sol_on.p;
    ctx.p_off0 = sol_off.p;
    ctx.i_sense = std::sqrt(ctx.i_on0 * ctx.i_off0); // geometric-mean sense threshold
    return ctx;
}

// Margin check: v_m must sit inside the functional hold window with room on
// both sides.
inline void validate_hold_margin(const CellContext& ctx, double margin = 0.1) {
    const device::HoldWindow hw =
        device::hold_window(ctx.dev, ctx.volts.v_w, ctx.volts.v_e, ctx.volts.v_m);
    if (ctx.volts.v_m - hw.v_low < margin || hw.v_high - ctx.volts.v_m < margin)
        throw ConfigurationError("hold level too close to the hysteresis window edge");
}

inline CellState fresh_cell(const CellContext& ctx) {
    CellState c;
    c.film = device::ramp(ctx.dev, device::fresh_film(ctx.dev), 0.0, ctx.volts.v_m);
    c.node_v = ctx.volts.v_m;
    return c;
}

namespace detail {

inline CellState drive_node(const CellContext& ctx, CellState cell, double target) {
    cell.film = device::ramp(ctx.dev, std::move(cell.film), cell.node_v, target);
    cell.node_v = target;
    return cell;
}

} // namespace detail

// Write: wordline boosted, node driven to v_w (bit 1) or ground (bit 0)
// through the on-resistance for the full pulse, then released and re-clamped
// at v_m. The pulse is long enough that the node settles at the rail.
inline CellState write(const CellContext& ctx, CellState cell, int bit) {
    cell = detail::drive_node(ctx, std::move(cell), bit ? ctx.volts.v_w : 0.0);
    cell = detail::drive_node(ctx, std::move(cell), ctx.volts.v_m);
    cell.drift_clock = 0.0;
    cell.stored_bit_intent = bit ? 1 : 0;
    return cell;
}

inline CellState erase(const CellContext& ctx, CellState cell) {
    cell = detail::drive_node(ctx, std::move(cell), ctx.volts.v_e);
    cell = detail::drive_node(ctx, std::move(cell), ctx.volts.v_m);
    cell.drift_clock = 0.0;
    cell.stored_bit_intent = 0;
    return cell;
}

struct ReadResult {
    int bit = 0;
    CellState cell;
    double i_read = 0.0;
};

// Non-destructive read: the bitline is precharged to vdd_read and discharges
// through the read path when the device conducts above the sense threshold.
// The gate never leaves v_m, so the polarization state is untouched.
inline ReadResult read(const CellContext& ctx, CellState cell) {
    ReadResult r;
    r.i_read = state_current(ctx, cell, cell.node_v);
    r.bit = r.i_read > ctx.i_sense ? 1 : 0;
    r.cell = std::move(cell);
    return r;
}

struct HoldResult {
    CellState cell;
    double ds_leakage_power = 0.0; // exactly zero: both sides of the off switch at v_m
    double hold_power = 0.0;       // gate_leak * v_m
};

// Hold: the bitline and the device gate share the clamp level, so the off
// write transistor sees identical source and drain voltages. An override of
// the clamp level models loss of the hold bias.
inline HoldResult hold(const CellContext& ctx, CellState cell, double dt,
                       std::optional<double> v_m_override = std::nullopt) {
    if (dt < 0.0) throw std::invalid_argument("hold: negative duration");
    const double clamp = v_m_override.value_or(ctx.volts.v_m);
    HoldResult h;
    cell = detail::drive_node(ctx, std::move(cell), clamp);
    cell.drift_clock += dt;
    h.ds_leakage_power = 0.0;
    h.hold_power = ctx.write_access.gate_leak * clamp;
    h.cell = std::move(cell);
    return h;
}

// ---- array disturb analysis ----------------------------------------------

struct ArrayOp {
    enum Kind { Write, Erase, Read, Hold } kind = Hold;
    int row = 0, col = 0;
    int bit = 0;
    double seconds = 0.0;
};

struct DisturbReport {
    double worst_node_excursion = 0.0;  // V seen by any unselected cell
    double worst_field_excursion = 0.0; // normalized film field
    bool switching = false;             // any unselected grain changed branch
    int ops = 0;
};

// Simulates half-select conditions on a small array. Unselected rows have the
// wordline grounded, so their nodes float and see the toggling bitline only
// through the off-state conductance of the write transistor charging the node
// capacitance over the pulse width.
inline DisturbReport check_disturb(const CellContext& ctx, int rows, int cols,
                                   const std::vector<ArrayOp>& pattern) {
    if (rows < 1 || cols < 1) throw std::invalid_argument("check_disturb: empty array");
    std::vector<CellState> cells(static_cast<std::size_t>(rows) * cols, fresh_cell(ctx));
    auto at = [&](int r, int c) -> CellState& {
        return cells[static_cast<std::size_t>(r) * cols + c];
    };

    // storage-node capacitance from a small-signal solve at the hold point
    const double dv = 1e-3;
    const double a_afe = ctx.dev.a_afe();
    auto gate_charge = [&](const device::FilmState& f, double v) {
        const auto [sol, f2] = device::solve_stack(ctx.dev, f, v);
        return a_afe * (ctx.dev.stack.eps_afe * sol.v_afe / ctx.dev.stack.t_afe + sol.p);
    };
    const device::FilmState probe = fresh_cell(ctx).film;
    const double c_node = (gate_charge(probe, ctx.volts.v_m + dv) -
                           gate_charge(probe, ctx.volts.v_m - dv)) /
                          (2.0 * dv);

    DisturbReport rep;
    const double fv = ctx.dev.film.e_scale * ctx.dev.stack.t_afe;
    for (const ArrayOp& op : pattern) {
        ++rep.ops;
        if (op.kind == ArrayOp::Hold) {
            for (auto& c : cells) c = hold(ctx, std::move(c), op.seconds).cell;
            continue;
        }
        if (op.kind == ArrayOp::Read) {
            // read never moves any gate off v_m: zero excursion by construction
            continue;
        }
        const double wbl = (op.kind == ArrayOp::Erase) ? ctx.volts.v_e
                                                       : (op.bit ? ctx.volts.v_w : 0.0);
        for (int r = 0; r < rows; ++r) {
            for (int c = 0; c < cols; ++c) {
                CellState& cs = at(r, c);
                if (r == op.row && c == op.col) {
                    cs = (op.kind == ArrayOp::Erase) ? erase(ctx, std::move(cs))
                                                     : write(ctx, std::move(cs), op.bit);
                    continue;
                }
                double v_node = cs.node_v;
                if (c == op.col) {
                    // unselected row on the driven column: floating node charges
                    // through the off transistor toward the bitline level
                    const double tau = c_node / std::max(ctx.write_access.g_off, 1e-30);
                    const double f = 1.0 - std::exp(-ctx.volts.write_pulse / tau);
                    v_node = cs.node_v + (wbl - cs.node_v) * f;
                }
                // unselected columns in the selected row stay at the clamp level
                const double excursion = std::abs(v_node - ctx.volts.v_m);
                if (excursion > 0.0) {
                    const auto before = device::solve_stack(ctx.dev, cs.film, cs.node_v).first;
                    auto [after, film] = device::solve_stack(ctx.dev, std::move(cs.film), v_node);
                    cs.film = std::move(film);
                    rep.worst_node_excursion = std::max(rep.worst_node_excursion, excursion);
                    rep.worst_field_excursion =
                        std::max(rep.worst_field_excursion,
                                 std::abs(after.v_afe - before.v_afe) / fv);
                    rep.switching |= after.switching;
                    // node returns to the clamp once the pulse ends
                    auto [back, film2] = device::solve_stack(ctx.dev, std::move(cs.film),
                                                             ctx.volts.v_m);
                    cs.film = std::move(film2);
                    rep.switching |= back.switching;
                    cs.node_v = ctx.volts.v_m;
                }
            }
        }
    }
    return rep;
}

} // namespace afesim::cell
