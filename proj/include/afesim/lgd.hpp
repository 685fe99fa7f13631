#pragma once

// Landau-Ginzburg-Devonshire free-energy model of a single-domain FE/AFE film,
// with quasi-static hysteresis-branch continuation.
//
// Everything here works in normalized units: the energy density is
//   G(p, e) = (alpha/2) p^2 + (beta/4) p^4 + (xi/6) p^6 - e*p
// and equilibria are the real roots of dG/dp = alpha*p + beta*p^3 + xi*p^5 - e.
// p_scale / e_scale map normalized polarization and field to C/m^2 and V/m.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace afesim::lgd {

struct LandauParams {
    double alpha = 1.0;   // quadratic coefficient; > 0 AFE, < 0 FE
    double beta = -1.8;   // quartic coefficient
    double xi = 1.0;      // sextic coefficient, must be > 0
    double p_scale = 1.0; // C/m^2 per normalized polarization unit
    double e_scale = 1.0; // V/m per normalized field unit

    bool valid() const {
        return xi > 0.0 && p_scale > 0.0 && e_scale > 0.0 && std::isfinite(alpha) &&
               std::isfinite(beta);
    }
    bool afe_regime() const { return alpha > 0.0; }
};

struct Equilibrium {
    double p = 0.0;
    bool stable = false;
    double energy = 0.0; // G at (p, e)
};

// Polarization plus the field it equilibrated at. p must be a stable root of
// the landscape at e_last; step_quasistatic preserves that invariant.
struct BranchState {
    double p = 0.0;
    double e_last = 0.0;
};

struct SolverError : std::runtime_error {
    double residual;
    explicit SolverError(const std::string& what, double res)
        : std::runtime_error(what + " (residual " + std::to_string(res) + ")"), residual(res) {}
};

inline double free_energy(const LandauParams& lp, double p, double e) {
    const double p2 = p * p;
    return p2 * (0.5 * lp.alpha + p2 * (0.25 * lp.beta + p2 * lp.xi / 6.0)) - e * p;
}

// dG/dp
inline double field_residual(const LandauParams& lp, double p, double e) {
    const double p2 = p * p;
    return p * (lp.alpha + p2 * (lp.beta + p2 * lp.xi)) - e;
}

// d2G/dp2; sign decides stability
inline double curvature(const LandauParams& lp, double p) {
    const double p2 = p * p;
    return lp.alpha + p2 * (3.0 * lp.beta + 5.0 * lp.xi * p2);
}

constexpr double kStabilityTol = 1e-9;  // |G''| below this counts as degenerate
constexpr double kRootResidual = 1e-12; // Newton polish target for dG/dp

// Roots of d2G/dp2 = 0 (the fold points of the S-curve), ascending. The
// curvature is quadratic in p^2, so this is closed-form: 0, 2 or 4 roots.
inline std::vector<double> fold_points(const LandauParams& lp) {
    std::vector<double> folds;
    const double a = 5.0 * lp.xi, b = 3.0 * lp.beta, c = lp.alpha;
    const double disc = b * b - 4.0 * a * c;
    if (disc < 0.0) return folds;
    const double s = std::sqrt(disc);
    for (double u : {(-b - s) / (2.0 * a), (-b + s) / (2.0 * a)}) {
        if (u > 0.0) {
            const double r = std::sqrt(u);
            folds.push_back(-r);
            folds.push_back(r);
        } else if (u == 0.0) {
            folds.push_back(0.0);
        }
    }
    std::sort(folds.begin(), folds.end());
    folds.erase(std::unique(folds.begin(), folds.end()), folds.end());
    return folds;
}

struct Interval {
    double lo, hi; // may be +-inf
    bool contains(double p) const { return p >= lo && p <= hi; }
};

// Maximal intervals where G'' > 0. Hysteresis branches live on these; they
// depend only on the coefficients, not on the applied field.
inline std::vector<Interval> stable_intervals(const LandauParams& lp) {
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> folds = fold_points(lp);
    std::vector<Interval> out;
    double lo = -inf;
    bool in_stable = curvature(lp, folds.empty() ? 0.0 : folds.front() - 1.0) > 0.0;
    for (double f : folds) {
        if (in_stable) out.push_back({lo, f});
        lo = f;
        in_stable = !in_stable;
    }
    if (in_stable) out.push_back({lo, inf});
    return out;
}

// Index of the stable interval containing p, or -1 if p sits in an unstable gap.
inline int branch_index(const LandauParams& lp, double p) {
    const std::vector<Interval> iv = stable_intervals(lp);
    for (std::size_t i = 0; i < iv.size(); ++i)
        if (iv[i].contains(p)) return static_cast<int>(i);
    return -1;
}

namespace detail {

// Smallest power-of-two bound with xi*p^4 dominating the lower-order terms,
// so every real root of dG/dp lies inside [-p_max, p_max].
inline double root_bound(const LandauParams& lp, double e) {
    double p = 1.0;
    while (lp.xi * p * p * p * p <= std::abs(lp.alpha) + std::abs(lp.beta) * p * p +
                                        std::abs(e) / p &&
           p < 1e6)
        p *= 2.0;
    return p;
}

// Bisection to a tight bracket followed by safeguarded Newton.
inline double polish_root(const LandauParams& lp, double e, double lo, double hi) {
    double flo = field_residual(lp, lo, e);
    for (int i = 0; i < 80 && hi - lo > 1e-15 * (1.0 + std::abs(lo)); ++i) {
        const double mid = 0.5 * (lo + hi);
        const double fm = field_residual(lp, mid, e);
        if ((fm <= 0.0) == (flo <= 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    double p = 0.5 * (lo + hi);
    for (int i = 0; i < 40; ++i) {
        const double f = field_residual(lp, p, e);
        if (std::abs(f) <= kRootResidual) break;
        const double df = curvature(lp, p);
        if (df == 0.0) break;
        double step = f / df;
        double next = p - step;
        if (next <= lo || next >= hi) next = 0.5 * (lo + hi); // keep inside bracket
        if (field_residual(lp, next, e) <= 0.0 == (flo <= 0.0))
            lo = next;
        else
            hi = next;
        p = next;
    }
    return p;
}

} // namespace detail

// All real equilibria of the landscape at field e, sorted by p. dG/dp is
// monotone between consecutive roots of G'' (the closed-form fold points), so
// each monotone segment holds at most one root: bracket by endpoint signs and
// polish by bisection + safeguarded Newton. Tangency (double) roots at the
// fold points are added as unstable when dG/dp ~ 0 there.
inline std::vector<Equilibrium> equilibria(const LandauParams& lp, double e) {
    const double pmax = detail::root_bound(lp, e);
    std::vector<double> nodes{-pmax};
    for (double pf : fold_points(lp))
        if (pf > -pmax && pf < pmax) nodes.push_back(pf);
    nodes.push_back(pmax);

    std::vector<double> roots;
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
        const double a = nodes[i], b = nodes[i + 1];
        const double fa = field_residual(lp, a, e);
        const double fb = field_residual(lp, b, e);
        if (fa == 0.0)
            roots.push_back(a);
        else if ((fa < 0.0) != (fb < 0.0))
            roots.push_back(detail::polish_root(lp, e, a, b));
    }
    if (field_residual(lp, pmax, e) == 0.0) roots.push_back(pmax);

    // near-tangent pair exactly at a fold, invisible to the sign brackets
    for (double pf : fold_points(lp))
        if (std::abs(field_residual(lp, pf, e)) <= kStabilityTol) roots.push_back(pf);

    std::sort(roots.begin(), roots.end());
    std::vector<Equilibrium> out;
    for (double p : roots) {
        if (!out.empty() && std::abs(p - out.back().p) < 1e-7) continue;
        Equilibrium q;
        q.p = p;
        q.stable = curvature(lp, p) > kStabilityTol;
        q.energy = free_energy(lp, p, e);
        out.push_back(q);
    }

    bool any_stable = false;
    double worst = 0.0;
    for (const Equilibrium& q : out) {
        any_stable |= q.stable;
        worst = std::max(worst, std::abs(field_residual(lp, q.p, e)));
    }
    if (out.empty() || !any_stable)
        throw SolverError("lgd::equilibria found no stable root", worst);
    return out;
}

struct StepResult {
    BranchState state;
    bool switched = false; // the incoming branch vanished (saddle-node jump)
};

// Quasi-static continuation: move to the stable root nearest the previous
// polarization. The switching flag fires when no stable root remains inside
// the interval the previous state occupied.
inline StepResult step_quasistatic(const BranchState& st, const LandauParams& lp, double e_new) {
    const std::vector<Equilibrium> eqs = equilibria(lp, e_new);
    const int old_branch = branch_index(lp, st.p);
    const std::vector<Interval> iv = stable_intervals(lp);

    double best_p = 0.0, best_d = std::numeric_limits<double>::infinity();
    bool branch_survives = false;
    for (const Equilibrium& q : eqs) {
        if (!q.stable) continue;
        const double d = std::abs(q.p - st.p);
        if (d < best_d) {
            best_d = d;
            best_p = q.p;
        }
        if (old_branch >= 0 && iv[static_cast<std::size_t>(old_branch)].contains(q.p))
            branch_survives = true;
    }
    StepResult r;
    r.state = BranchState{best_p, e_new};
    r.switched = !branch_survives;
    return r;
}

struct LoopPoint {
    double e = 0.0;
    double p = 0.0;
    bool switched = false;
};

inline std::vector<LoopPoint> trace_pe_loop(const LandauParams& lp,
                                            const std::vector<double>& e_waveform,
                                            BranchState initial) {
    std::vector<LoopPoint> out;
    out.reserve(e_waveform.size());
    BranchState st = initial;
    for (double e : e_waveform) {
        const StepResult r = step_quasistatic(st, lp, e);
        st = r.state;
        out.push_back({e, st.p, r.switched});
    }
    return out;
}

// Triangular waveform 0 -> +amp -> -amp -> 0 sampled with |step| increments.
inline std::vector<double> triangle_wave(double amp, double step, int cycles = 1) {
    std::vector<double> w;
    const int n = std::max(1, static_cast<int>(std::round(std::abs(amp) / step)));
    const double h = std::abs(amp) / n;
    for (int c = 0; c < cycles; ++c) {
        for (int i = 1; i <= n; ++i) w.push_back(i * h);
        for (int i = n - 1; i >= -n; --i) w.push_back(i * h);
        for (int i = -n + 1; i <= 0; ++i) w.push_back(i * h);
    }
    return w;
}

// Field at which the branch holding `from` disappears when ramping toward
// e_to. Coarse continuation at `step`, then interval bisection; the returned
// field is the saddle-node point to within `tol`. Throws if no switching
// event occurs before e_to.
inline double switching_field(const LandauParams& lp, BranchState from, double e_to,
                              double step = 5e-3, double tol = 1e-6) {
    const double dir = (e_to >= from.e_last) ? 1.0 : -1.0;
    BranchState st = from;
    double lo = st.e_last; // branch known alive here
    double hi = e_to;
    bool found = false;
    const int nsteps = static_cast<int>(std::ceil(std::abs(e_to - st.e_last) / step));
    for (int i = 1; i <= nsteps; ++i) {
        const double e = (i == nsteps) ? e_to : st.e_last + dir * step;
        const StepResult r = step_quasistatic(st, lp, e);
        if (r.switched) {
            lo = st.e_last;
            hi = e;
            found = true;
            break;
        }
        st = r.state;
    }
    if (!found) throw SolverError("lgd::switching_field: no switching before e_to", 0.0);

    BranchState base = st; // last state on the surviving branch, at field lo
    while (std::abs(hi - lo) > tol) {
        const double mid = 0.5 * (lo + hi);
        const StepResult r = step_quasistatic(base, lp, mid);
        if (r.switched) {
            hi = mid;
        } else {
            lo = mid;
            base = r.state;
        }
    }
    return 0.5 * (lo + hi);
}

} // namespace afesim::lgd
