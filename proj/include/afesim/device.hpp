#pragma once

// MFMIS AFeFET assembly: a Landau AFE capacitor in series with a MOS gate,
// coupled by charge balance on the floating gate. Solving
//
//   A_AFE * (eps_afe * E_afe + P(E_afe)) + A_AFE * q_trap = A_MOS * Q_mos(v_int)
//   E_afe = (v_gs - v_fb - v_int) / t_afe
//
// for v_int at each gate bias gives the load-line operating point; polarization
// follows hysteresis-branch continuation between bias steps. The film is split
// into a small set of equal-area grains with a symmetric spread of local bias
// fields, which is what lets a 0 V-terminated sweep leave the film partially
// polarized (minor loop) while a negative erase depolarizes it fully.

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "afesim/lgd.hpp"

namespace afesim::device {

constexpr double kThermalVoltage = 0.0259; // V at room temperature
constexpr double kVtLin = 0.1;             // V, drain-bias linearization scale

struct StackConfig {
    double ar = 16.0;           // A_MOS : A_AFE
    double t_afe = 10e-9;       // m
    double eps_afe = 2.656e-10; // F/m background permittivity of the AFE film
    double c_ox = 2.53e-2;      // F/m^2, 7 nm HfO2 areal capacitance
    double c_bg = 5e-3;         // F/m^2, depletion / interface background response
    double v_fb = -0.9;         // V flat-band offset of the stack
    double q_trap = -0.155;     // C/m^2 fixed charge on the floating gate
    int grains = 31;            // film subdivisions sharing the electrostatic field
    double beta_spread = 0.1;   // +- dispersion of the quartic coefficient across grains
                                // (local Zr-content variation; spreads the back-switch
                                // fields far more than the up-switch fields)

    bool valid() const {
        return ar > 0.0 && t_afe > 0.0 && c_ox > 0.0 && grains >= 1 && beta_spread >= 0.0;
    }
};

struct TransistorParams {
    double w = 10e-6;      // m channel width
    double l_ch = 5e-6;    // m channel length
    double mu_cox = 2.5e-5; // A/V^2 transconductance factor
    double v_t0 = 0.4;     // V intrinsic threshold referenced to the internal node
    double n_ss = 1.3;     // subthreshold ideality
    double i_gmin = 1e-9;  // A/m floor leakage per width

    bool valid() const {
        return w > 0.0 && l_ch > 0.0 && mu_cox > 0.0 && n_ss >= 1.0 && i_gmin >= 0.0;
    }
};

struct AfeFet {
    lgd::LandauParams film;
    StackConfig stack;
    TransistorParams mos;

    // Per-grain Landau coefficients: beta spread uniformly across grains.
    std::vector<lgd::LandauParams> grain_params() const {
        std::vector<lgd::LandauParams> gp;
        const int n = stack.grains;
        gp.reserve(n);
        for (int k = 0; k < n; ++k) {
            lgd::LandauParams lp = film;
            if (n > 1) lp.beta += stack.beta_spread * (2.0 * k / (n - 1) - 1.0);
            gp.push_back(lp);
        }
        return gp;
    }
    double a_mos() const { return mos.w * mos.l_ch; }
    double a_afe() const { return a_mos() / stack.ar; }
};

// One branch state per grain; value type carried between quasi-static steps.
struct FilmState {
    std::vector<lgd::BranchState> grains;

    double mean_p() const {
        double s = 0.0;
        for (const auto& g : grains) s += g.p;
        return grains.empty() ? 0.0 : s / static_cast<double>(grains.size());
    }
};

struct StackSolution {
    double v_afe = 0.0;  // V across the AFE film
    double v_int = 0.0;  // V floating gate to channel
    double p = 0.0;      // C/m^2 mean film polarization
    double q_mos = 0.0;  // C/m^2 MOS areal charge
    double residual = 0.0;
    bool switching = false; // any grain changed branch during this solve
};

inline double softplus(double x) {
    if (x > 30.0) return x;
    if (x < -30.0) return std::exp(x);
    return std::log1p(std::exp(x));
}

// Unified smooth gate charge: exponential below threshold, linear above, plus
// a weak background (depletion/interface) term that keeps negative biases
// coupled to the stack.
inline double mos_charge(const StackConfig& s, const TransistorParams& t, double v_int) {
    const double nvt = t.n_ss * kThermalVoltage;
    return s.c_ox * nvt * softplus((v_int - t.v_t0) / nvt) + s.c_bg * v_int;
}

// EKV-style interpolated drain current; subthreshold swing is exactly
// n_ss * v_t * ln(10) per decade and the drain dependence saturates over kVtLin.
inline double drain_current(const TransistorParams& t, double v_int, double v_ds) {
    const double nvt = t.n_ss * kThermalVoltage;
    const double q = nvt * softplus((v_int - t.v_t0) / (2.0 * nvt));
    return (t.w / t.l_ch) * t.mu_cox * q * q * std::tanh(v_ds / kVtLin) + t.w * t.i_gmin;
}

namespace detail {

// Root of dG/dp = e on one stable interval, clamped to the interval's fold
// point when the branch has no root at this field. f is monotone increasing
// on stable intervals, so the endpoint test is exact.
inline double branch_root_clamped(const lgd::LandauParams& lp, double e, const lgd::Interval& iv,
                                  double guess) {
    const double bound = lgd::detail::root_bound(lp, e);
    double lo = std::isfinite(iv.lo) ? iv.lo : -bound;
    double hi = std::isfinite(iv.hi) ? iv.hi : bound;
    if (lgd::field_residual(lp, lo, e) >= 0.0) return lo; // root below branch
    if (lgd::field_residual(lp, hi, e) <= 0.0) return hi; // root above branch
    double p = std::min(std::max(guess, lo), hi);
    for (int i = 0; i < 60; ++i) {
        const double f = lgd::field_residual(lp, p, e);
        if (std::abs(f) <= lgd::kRootResidual) return p;
        if (f > 0.0)
            hi = p;
        else
            lo = p;
        const double df = lgd::curvature(lp, p);
        double next = (df > 0.0) ? p - f / df : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        p = next;
    }
    return p;
}

} // namespace detail

// Charge-balance solve at one gate bias. Bisection on v_int with the grain
// branches frozen, then one continuation update per grain; repeated until the
// branch assignment is a fixed point. The frozen-branch map is monotone in
// v_int, so the bisection is safe.
inline std::pair<StackSolution, FilmState> solve_stack(const AfeFet& dev, FilmState film,
                                                       double v_gs) {
    const StackConfig& st = dev.stack;
    const std::vector<lgd::LandauParams> gp = dev.grain_params();
    const int n = static_cast<int>(film.grains.size());
    std::vector<std::vector<lgd::Interval>> ivs(n);
    for (int k = 0; k < n; ++k) ivs[k] = lgd::stable_intervals(gp[k]);
    const double film_volts = dev.film.e_scale * st.t_afe; // V across film per unit e

    std::vector<int> branches(n);
    for (int k = 0; k < n; ++k) branches[k] = lgd::branch_index(gp[k], film.grains[k].p);

    const double span = 15.0 * std::max(1.0, film_volts / 8.0);
    bool switched_any = false;
    StackSolution sol;
    std::vector<std::vector<int>> seen;

    for (int outer = 0; outer < 60; ++outer) {
        // displacement with frozen branches, as a function of v_int
        auto disp = [&](double v_int) {
            const double e_norm = (v_gs - st.v_fb - v_int) / film_volts;
            double psum = 0.0;
            for (int k = 0; k < n; ++k) {
                const lgd::Interval& iv =
                    ivs[k][static_cast<std::size_t>(std::max(0, branches[k]))];
                psum += detail::branch_root_clamped(gp[k], e_norm, iv, film.grains[k].p);
            }
            const double e_phys = e_norm * dev.film.e_scale;
            return st.eps_afe * e_phys + dev.film.p_scale * psum / n;
        };
        auto balance = [&](double v_int) {
            return disp(v_int) + st.q_trap - st.ar * mos_charge(st, dev.mos, v_int);
        };

        double lo = v_gs - st.v_fb - span;
        double hi = v_gs - st.v_fb + span;
        double flo = balance(lo);
        double fhi = balance(hi);
        if (!(flo >= 0.0 && fhi <= 0.0))
            throw lgd::SolverError("device::solve_stack: balance not bracketed",
                                   std::min(std::abs(flo), std::abs(fhi)));
        for (int i = 0; i < 100 && hi - lo > 1e-14 * (1.0 + std::abs(lo)); ++i) {
            const double mid = 0.5 * (lo + hi);
            if (balance(mid) >= 0.0)
                lo = mid;
            else
                hi = mid;
        }
        const double v_int = 0.5 * (lo + hi);
        const double e_norm = (v_gs - st.v_fb - v_int) / film_volts;

        // continuation update at the solved field
        std::vector<int> next_branches(n);
        bool changed = false;
        for (int k = 0; k < n; ++k) {
            const auto r = lgd::step_quasistatic(film.grains[k], gp[k], e_norm);
            film.grains[k] = r.state;
            switched_any |= r.switched;
            next_branches[k] = lgd::branch_index(gp[k], r.state.p);
            changed |= (next_branches[k] != branches[k]);
        }

        sol.v_int = v_int;
        sol.v_afe = v_gs - st.v_fb - v_int;
        sol.p = dev.film.p_scale * film.mean_p();
        sol.q_mos = mos_charge(st, dev.mos, v_int);
        sol.residual = std::abs(st.eps_afe * e_norm * dev.film.e_scale + sol.p + st.q_trap -
                                st.ar * sol.q_mos);

        if (!changed) break;
        // knife-edge oscillation between assignments: keep the latest
        if (std::find(seen.begin(), seen.end(), next_branches) != seen.end()) {
            branches = next_branches;
            seen.clear();
            continue;
        }
        seen.push_back(branches);
        branches = next_branches;
    }

    const double scale = std::max({std::abs(sol.p), st.ar * std::abs(sol.q_mos),
                                   std::abs(st.q_trap), st.c_ox});
    if (sol.residual > 1e-9 * scale * 10.0)
        throw lgd::SolverError("device::solve_stack: charge balance residual too large",
                               sol.residual);
    sol.switching = switched_any;
    return {sol, std::move(film)};
}

// Film with every grain relaxed at its zero-field equilibrium.
inline FilmState fresh_film(const AfeFet& dev) {
    FilmState fs;
    for (const lgd::LandauParams& lp : dev.grain_params()) {
        const auto eqs = lgd::equilibria(lp, 0.0);
        double best = eqs.front().p;
        for (const auto& q : eqs)
            if (q.stable && std::abs(q.p) < std::abs(best)) best = q.p;
        fs.grains.push_back({best, 0.0});
    }
    return fs;
}

// Quasi-static ramp of the gate bias in steps no larger than `step`.
inline FilmState ramp(const AfeFet& dev, FilmState film, double v_from, double v_to,
                      double step = 5e-3) {
    const int nsteps = std::max(1, static_cast<int>(std::ceil(std::abs(v_to - v_from) / step)));
    for (int i = 1; i <= nsteps; ++i) {
        const double v = v_from + (v_to - v_from) * i / nsteps;
        film = solve_stack(dev, std::move(film), v).second;
    }
    return film;
}

struct SweepSample {
    double v_gs = 0.0;
    double i_d = 0.0;
    double c_gg = 0.0; // F, filled when C-V output is requested
    double p = 0.0;    // C/m^2
    double v_int = 0.0;
    int dir = +1;      // +1 rising, -1 falling
    bool switched = false;
};

struct SweepTrace {
    std::vector<SweepSample> samples;
    double w = 0.0;    // channel width, used by current-criterion extraction
    double v_ds = 0.0;
    FilmState final_state;
};

// v_start -> v_peak -> v_valley -> v_start, quasi-static step grid.
inline std::vector<double> loop_waveform(double v_start, double v_peak, double v_valley,
                                         double step = 5e-3, int cycles = 1) {
    std::vector<double> w;
    auto seg = [&](double a, double b) {
        const int ns = std::max(1, static_cast<int>(std::ceil(std::abs(b - a) / step)));
        for (int i = 1; i <= ns; ++i) w.push_back(a + (b - a) * i / ns);
    };
    for (int c = 0; c < cycles; ++c) {
        seg(v_start, v_peak);
        seg(v_peak, v_valley);
        seg(v_valley, v_start);
    }
    return w;
}

inline SweepTrace sweep_idvg(const AfeFet& dev, const std::vector<double>& waveform, double v_ds,
                             FilmState film, bool with_cv = false) {
    SweepTrace tr;
    tr.w = dev.mos.w;
    tr.v_ds = v_ds;
    tr.samples.reserve(waveform.size());
    double v_prev = waveform.empty() ? 0.0 : waveform.front();
    const double a_afe = dev.a_afe();
    for (std::size_t i = 0; i < waveform.size(); ++i) {
        const double v = waveform[i];
        const int dir = (i == 0) ? ((waveform.size() > 1 && waveform[1] < v) ? -1 : +1)
                                 : (v >= v_prev ? +1 : -1);
        auto [sol, next] = solve_stack(dev, std::move(film), v);
        film = std::move(next);
        SweepSample smp;
        smp.v_gs = v;
        smp.v_int = sol.v_int;
        smp.p = sol.p;
        smp.switched = sol.switching;
        smp.dir = dir;
        smp.i_d = drain_current(dev.mos, sol.v_int, v_ds);
        if (with_cv) {
            // symmetric numerical derivative of the control-gate charge, 1 mV step
            const double dv = 1e-3;
            auto charge_at = [&](double vg) {
                const auto [s2, f2] = solve_stack(dev, film, vg);
                const double e_phys = s2.v_afe / dev.stack.t_afe;
                return a_afe * (dev.stack.eps_afe * e_phys + s2.p);
            };
            smp.c_gg = (charge_at(v + dv) - charge_at(v - dv)) / (2.0 * dv);
        }
        tr.samples.push_back(smp);
        v_prev = v;
    }
    tr.final_state = std::move(film);
    return tr;
}

struct CrossingError : std::runtime_error {
    explicit CrossingError(const std::string& branch)
        : std::runtime_error("no constant-current crossing on the " + branch + " branch") {}
};

struct ThresholdPair {
    double v_th_up = 0.0;   // erased-state threshold (rising pass)
    double v_th_down = 0.0; // programmed-state threshold (falling pass)
};

// Constant-current thresholds, log-interpolated in v_gs. i_crit is per width.
inline ThresholdPair extract_vth(const SweepTrace& tr, double i_crit_per_width) {
    const double i_th = i_crit_per_width * tr.w;
    std::optional<double> up, down;
    for (std::size_t i = 1; i < tr.samples.size(); ++i) {
        const auto& a = tr.samples[i - 1];
        const auto& b = tr.samples[i];
        if (a.dir != b.dir) continue;
        auto interp = [&]() {
            const double la = std::log(a.i_d), lb = std::log(b.i_d);
            const double t = (std::log(i_th) - la) / (lb - la);
            return a.v_gs + t * (b.v_gs - a.v_gs);
        };
        if (!up && b.dir == +1 && a.i_d < i_th && b.i_d >= i_th) up = interp();
        if (!down && b.dir == -1 && a.i_d >= i_th && b.i_d < i_th) down = interp();
    }
    if (!up) throw CrossingError("up");
    if (!down) throw CrossingError("down");
    return {*up, *down};
}

struct WindowMetrics {
    double mw = 0.0;
    double on_off = 1.0;
    double i_on = 0.0;
    double i_off = 0.0;
    double v_th_up = 0.0;
    double v_th_down = 0.0;
};

namespace detail {

inline double branch_current_at(const SweepTrace& tr, int dir, double v_m) {
    for (std::size_t i = 1; i < tr.samples.size(); ++i) {
        const auto& a = tr.samples[i - 1];
        const auto& b = tr.samples[i];
        if (a.dir != dir || b.dir != dir) continue;
        const double lo = std::min(a.v_gs, b.v_gs), hi = std::max(a.v_gs, b.v_gs);
        if (v_m < lo || v_m > hi) continue;
        if (a.v_gs == b.v_gs) return a.i_d;
        const double t = (v_m - a.v_gs) / (b.v_gs - a.v_gs);
        return std::exp(std::log(a.i_d) + t * (std::log(b.i_d) - std::log(a.i_d)));
    }
    throw CrossingError(dir > 0 ? "up" : "down");
}

} // namespace detail

inline WindowMetrics extract_window_metrics(const SweepTrace& tr, double v_m,
                                            double i_crit_per_width) {
    WindowMetrics m;
    const ThresholdPair th = extract_vth(tr, i_crit_per_width);
    m.v_th_up = th.v_th_up;
    m.v_th_down = th.v_th_down;
    m.mw = th.v_th_up - th.v_th_down;
    m.i_on = detail::branch_current_at(tr, -1, v_m);
    m.i_off = detail::branch_current_at(tr, +1, v_m);
    m.on_off = m.i_on / m.i_off;
    return m;
}

// Canonical device states under a given write/erase protocol. All ramps are
// quasi-static at <= 5 mV.
inline FilmState programmed_state(const AfeFet& dev, double v_w, double v_m) {
    FilmState f = fresh_film(dev);
    f = ramp(dev, std::move(f), 0.0, v_w);
    return ramp(dev, std::move(f), v_w, v_m);
}

inline FilmState erased_state(const AfeFet& dev, double v_w, double v_e, double v_m) {
    FilmState f = fresh_film(dev);
    f = ramp(dev, std::move(f), 0.0, v_w);   // program first; erase depth is
    f = ramp(dev, std::move(f), v_w, v_e);   // measured from the written state
    return ramp(dev, std::move(f), v_e, v_m);
}

struct HoldWindow {
    double v_low = 0.0;  // deepest excursion the programmed state survives
    double v_high = 0.0; // highest excursion the erased state survives
};

// Bias range over which the two hold states stay readable. A state survives a
// bias excursion when, after returning to v_m, the on/off current ratio
// against the undisturbed opposite state still exceeds ratio_min. With the
// grain dispersion, individual grain switches near the window edge are normal;
// the functional window is about keeping the states distinguishable.
inline HoldWindow hold_window(const AfeFet& dev, double v_w, double v_e, double v_m,
                              double ratio_min = 10.0, double v_ds = 0.1, double step = 2.5e-2) {
    const FilmState on0 = programmed_state(dev, v_w, v_m);
    const FilmState off0 = erased_state(dev, v_w, v_e, v_m);
    auto current_at_vm = [&](FilmState f) {
        const auto [sol, next] = solve_stack(dev, std::move(f), v_m);
        return drain_current(dev.mos, sol.v_int, v_ds);
    };
    const double i_on0 = current_at_vm(on0);
    const double i_off0 = current_at_vm(off0);

    HoldWindow hw{v_e, v_w};
    FilmState on = on0;
    for (double v = v_m; v >= v_e - 1e-12; v -= step) {
        on = solve_stack(dev, std::move(on), v).second;
        FilmState back = ramp(dev, on, v, v_m, step);
        const double i_on = current_at_vm(std::move(back));
        if (i_on / i_off0 < ratio_min) {
            hw.v_low = v + step;
            break;
        }
    }
    FilmState off = off0;
    for (double v = v_m; v <= v_w + 1e-12; v += step) {
        off = solve_stack(dev, std::move(off), v).second;
        FilmState back = ramp(dev, off, v, v_m, step);
        const double i_off = current_at_vm(std::move(back));
        if (i_on0 / i_off < ratio_min) {
            hw.v_high = v - step;
            break;
        }
    }
    return hw;
}

// Channel-length scaling: rescales the aspect ratio and shifts the intrinsic
// threshold; no short-channel electrostatics.
inline AfeFet scaled_device(AfeFet dev, double l_ch_new, double v_t0_shift) {
    dev.mos.l_ch = l_ch_new;
    dev.mos.v_t0 += v_t0_shift;
    return dev;
}

} // namespace afesim::device
