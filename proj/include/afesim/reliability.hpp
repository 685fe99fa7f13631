#pragma once

// Phenomenological time / cycle degradation: log-time threshold drift for
// retention, straight-line fits in log10 space for retention and endurance
// extrapolation, and a deterministic cycling-stress transform on device
// parameters.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "afesim/device.hpp"

namespace afesim::reliability {

struct DriftModel {
    double rate_p = 0.0;          // V of threshold drift per decade, programmed state
    double rate_e = 0.0;          // V per decade, erased state (negative = erased leaks up)
    double t0 = 1.0;              // s, reference time of the log-time law
    double fast_depol_tau = 10.0; // s, state collapse constant when the hold bias is gone

    bool valid() const { return t0 > 0.0 && fast_depol_tau > 0.0; }
};

// Operating point captured from the two hold states of a device at v_m. Drift
// shifts the effective internal-node voltage of each state; currents are then
// re-evaluated through the transistor model.
struct DriftOperatingPoint {
    device::TransistorParams mos;
    double v_int_on = 0.0;
    double v_int_off = 0.0;
    double v_read = 0.1; // drain bias used when sampling the states
};

inline DriftOperatingPoint capture_operating_point(const device::AfeFet& dev, double v_w,
                                                   double v_e, double v_m,
                                                   double v_read = 0.1) {
    DriftOperatingPoint op;
    op.mos = dev.mos;
    op.v_read = v_read;
    auto on = device::programmed_state(dev, v_w, v_m);
    op.v_int_on = device::solve_stack(dev, std::move(on), v_m).first.v_int;
    auto off = device::erased_state(dev, v_w, v_e, v_m);
    op.v_int_off = device::solve_stack(dev, std::move(off), v_m).first.v_int;
    return op;
}

struct DriftSample {
    double i_on = 0.0;
    double i_off = 0.0;
};

// Retention behavior at time t. Held: each state's threshold moves by
// rate * log10(1 + t/t0). Not held: both currents relax in log space toward
// the depolarized value with the fast collapse constant.
inline DriftSample drift_sample(const DriftModel& m, const DriftOperatingPoint& op, double t,
                                bool held) {
    if (t < 0.0) throw std::invalid_argument("drift_sample: negative time");
    DriftSample s;
    if (held) {
        const double decades = std::log10(1.0 + t / m.t0);
        s.i_on = device::drain_current(op.mos, op.v_int_on - m.rate_p * decades, op.v_read);
        s.i_off = device::drain_current(op.mos, op.v_int_off - m.rate_e * decades, op.v_read);
    } else {
        const double i_on0 = device::drain_current(op.mos, op.v_int_on, op.v_read);
        const double i_off0 = device::drain_current(op.mos, op.v_int_off, op.v_read);
        const double i_dep = i_off0; // depolarized film reads as erased
        const double w = std::exp(-t / m.fast_depol_tau);
        s.i_on = i_dep * std::pow(i_on0 / i_dep, w);
        s.i_off = i_dep * std::pow(i_off0 / i_dep, w);
    }
    return s;
}

struct FitResult {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 1.0;
    double crossing = 0.0;       // seconds or cycles; meaningful when !exceeds_horizon
    bool exceeds_horizon = false;
    double horizon = 0.0;
};

namespace detail {

struct LinFit {
    double slope = 0.0, intercept = 0.0, r2 = 1.0;
};

inline LinFit linfit(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("degenerate fit: all abscissae equal");
    LinFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double ss_res = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = y[i] - (f.intercept + f.slope * x[i]);
        ss_res += e * e;
    }
    f.r2 = (syy > 0.0) ? std::max(0.0, 1.0 - ss_res / syy) : 1.0;
    return f;
}

inline void check_series(const std::vector<std::pair<double, double>>& s, const char* what) {
    if (s.size() < 3) throw std::invalid_argument(std::string(what) + ": need at least 3 samples");
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (i > 0 && !(s[i].first > s[i - 1].first))
            throw std::invalid_argument(std::string(what) + ": abscissae must strictly increase");
    }
}

} // namespace detail

constexpr double kRetentionHorizon = 1e10;  // s
constexpr double kEnduranceHorizon = 1e16;  // cycles

// Straight-line fits of log10(i) vs log10(t) per state; the crossing is the
// time where the fitted on/off ratio falls to ratio_min. slope/intercept of
// the result describe the fitted log-ratio line.
inline FitResult fit_retention(const std::vector<std::pair<double, double>>& samples_on,
                               const std::vector<std::pair<double, double>>& samples_off,
                               double ratio_min) {
    detail::check_series(samples_on, "fit_retention(on)");
    detail::check_series(samples_off, "fit_retention(off)");
    auto logs = [](const std::vector<std::pair<double, double>>& s) {
        std::vector<double> x, y;
        for (auto& [t, i] : s) {
            if (t <= 0.0 || i <= 0.0)
                throw std::invalid_argument("fit_retention: nonpositive sample");
            x.push_back(std::log10(t));
            y.push_back(std::log10(i));
        }
        return std::pair{x, y};
    };
    auto [xo, yo] = logs(samples_on);
    auto [xf, yf] = logs(samples_off);
    const detail::LinFit on = detail::linfit(xo, yo);
    const detail::LinFit off = detail::linfit(xf, yf);

    FitResult r;
    r.horizon = kRetentionHorizon;
    r.slope = on.slope - off.slope;         // log-ratio per decade of time
    r.intercept = on.intercept - off.intercept;
    r.r_squared = std::min(on.r2, off.r2);
    if (r.slope >= 0.0) {
        r.exceeds_horizon = true; // ratio never decays
        return r;
    }
    const double log_t = (std::log10(ratio_min) - r.intercept) / r.slope;
    r.crossing = std::pow(10.0, log_t);
    r.exceeds_horizon = r.crossing > r.horizon;
    return r;
}

// Linear fit of mw versus log10(cycles); crossing where the window reaches
// half its fresh value.
inline FitResult fit_endurance(const std::vector<std::pair<double, double>>& points,
                               double mw0) {
    detail::check_series(points, "fit_endurance");
    std::vector<double> x, y;
    for (auto& [n, mw] : points) {
        if (n <= 0.0) throw std::invalid_argument("fit_endurance: nonpositive cycle count");
        x.push_back(std::log10(n));
        y.push_back(mw);
    }
    const detail::LinFit f = detail::linfit(x, y);
    FitResult r;
    r.horizon = kEnduranceHorizon;
    r.slope = f.slope;
    r.intercept = f.intercept;
    r.r_squared = f.r2;
    if (f.slope >= 0.0) {
        r.exceeds_horizon = true; // no degradation observed
        return r;
    }
    r.crossing = std::pow(10.0, (0.5 * mw0 - f.intercept) / f.slope);
    r.exceeds_horizon = r.crossing > r.horizon;
    return r;
}

struct StressPulse {
    double amplitude = 6.0; // V
    double width = 10e-6;   // s
};

// Reference pulse the stress rates are calibrated against.
constexpr double kStressRefAmplitude = 6.0;
constexpr double kStressRefWidth = 10e-6;
constexpr double kVthShiftPerDecade = 8e-3; // V, parallel shift of both states
constexpr double kMwShrinkPerDecade = 0.015;

// Deterministic cycling degradation: a parallel threshold shift (dominant) and
// a slower polarization-scale fatigue that narrows the window.
inline device::AfeFet cycling_stress(device::AfeFet dev, double n_pulses,
                                     const StressPulse& pulse = {}) {
    if (n_pulses < 0.0) throw std::invalid_argument("cycling_stress: negative pulse count");
    const double severity = (pulse.amplitude / kStressRefAmplitude) *
                            (pulse.amplitude / kStressRefAmplitude) *
                            (pulse.width / kStressRefWidth);
    const double decades = std::log10(1.0 + n_pulses * severity);
    dev.mos.v_t0 += kVthShiftPerDecade * decades;
    dev.film.p_scale *= std::max(0.0, 1.0 - kMwShrinkPerDecade * decades);
    return dev;
}

} // namespace afesim::reliability
