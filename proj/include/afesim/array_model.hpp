#pragma once

// Array-level cost model: retention power, refresh occupancy, and hold-bias
// leakage for SRAM / eDRAM / 2T1AF arrays, with calibration of the power
// coefficients to measured endpoints.

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace afesim::array_model {

enum class Tech { Sram6T, Edram2T, Af2T1 };

inline const char* tech_name(Tech t) {
    switch (t) {
        case Tech::Sram6T: return "sram6t";
        case Tech::Edram2T: return "edram2t";
        case Tech::Af2T1: return "af2t1";
    }
    return "?";
}

inline std::optional<Tech> parse_tech(const std::string& s) {
    if (s == "sram6t" || s == "sram") return Tech::Sram6T;
    if (s == "edram2t" || s == "edram") return Tech::Edram2T;
    if (s == "af2t1" || s == "2t1af") return Tech::Af2T1;
    return std::nullopt;
}

struct ArrayConfig {
    int rows = 32;
    int cols = 32;
    double n_bits() const { return static_cast<double>(rows) * cols; }
    bool valid() const { return rows >= 1 && cols >= 1; }
};

struct TechParams {
    Tech tech = Tech::Af2T1;
    double p_cell = 0.0;           // W static leakage per cell
    double c_parasitic = 0.0;      // W per bit^1.5
    double e_refresh_row = 0.0;    // J per row refresh (eDRAM only)
    double t_retention_cell = 0.0; // s refresh period (eDRAM only)
    double t_refresh_row = 0.0;    // s a row refresh occupies (eDRAM only)

    bool valid() const {
        const bool nonneg = p_cell >= 0.0 && c_parasitic >= 0.0 && e_refresh_row >= 0.0 &&
                            t_retention_cell >= 0.0 && t_refresh_row >= 0.0;
        if (!nonneg) return false;
        if (tech != Tech::Edram2T)
            return e_refresh_row == 0.0 && t_refresh_row == 0.0;
        return true;
    }
};

inline double retention_power(const TechParams& t, const ArrayConfig& a) {
    const double n = a.n_bits();
    double p = t.p_cell * n + t.c_parasitic * std::pow(n, 1.5);
    if (t.tech == Tech::Edram2T && t.t_retention_cell > 0.0)
        p += a.rows * t.e_refresh_row / t.t_retention_cell;
    return p;
}

// Fraction of time the array cannot serve accesses because refresh occupies
// it. Exactly zero for SRAM and 2T1AF.
inline double inaccessible_fraction(const TechParams& t, const ArrayConfig& a) {
    if (t.tech != Tech::Edram2T || t.t_retention_cell <= 0.0) return 0.0;
    return a.rows * t.t_refresh_row / t.t_retention_cell;
}

// Lumped gate-leak law for the hold bias: i(v) = i0 * exp(v / v0) per cell.
struct GateLeakModel {
    double i0 = 0.0; // A per cell at v = 0
    double v0 = 1.0; // V
};

inline double vm_leakage(const ArrayConfig& a, double v_m, const GateLeakModel& g) {
    return a.n_bits() * g.i0 * std::exp(v_m / g.v0) * v_m;
}

// Exponential law through two (v, power) anchor points of a reference array.
inline GateLeakModel calibrate_gate_leak(double v1, double p1, double v2, double p2,
                                         double n_cells) {
    if (v1 == v2) throw std::invalid_argument("calibrate_gate_leak: identical anchors");
    GateLeakModel g;
    g.v0 = (v2 - v1) / std::log((p2 / v2) / (p1 / v1));
    g.i0 = p1 / (v1 * n_cells * std::exp(v1 / g.v0));
    return g;
}

enum class PowerShape { Linear, LinearPlusSuperlinear, SuperlinearOnly };

struct CalibrationResult {
    TechParams params;
    std::vector<double> residuals; // relative error at each endpoint
    double max_residual = 0.0;
};

// Fit the power model coefficients to (n_bits, W) endpoints, with any refresh
// contribution of `base` subtracted first. Exact when the system is square;
// relative-error least squares otherwise. If the exact two-term solve turns a
// coefficient negative, it is clamped to zero and the remaining term is
// refit (the endpoints then carry a small documented residual).
inline CalibrationResult calibrate_power_model(
    const std::vector<std::pair<double, double>>& endpoints, PowerShape shape,
    TechParams base = {}) {
    if (endpoints.empty()) throw std::invalid_argument("calibrate_power_model: no endpoints");
    for (std::size_t i = 0; i < endpoints.size(); ++i)
        for (std::size_t j = i + 1; j < endpoints.size(); ++j)
            if (endpoints[i].first == endpoints[j].first)
                throw std::invalid_argument("calibrate_power_model: singular system "
                                            "(duplicate endpoint sizes)");

    const std::size_t need = (shape == PowerShape::LinearPlusSuperlinear) ? 2 : 1;
    if (endpoints.size() < need)
        throw std::invalid_argument("calibrate_power_model: underdetermined system");

    // residual after subtracting the refresh term
    auto remainder = [&](const std::pair<double, double>& ep) {
        double r = ep.second;
        if (base.tech == Tech::Edram2T && base.t_retention_cell > 0.0)
            r -= std::sqrt(ep.first) * base.e_refresh_row / base.t_retention_cell;
        return r;
    };

    // relative-error least squares for a single coefficient against basis f(n)
    auto lsq_single = [&](auto basis) {
        double num = 0.0, den = 0.0;
        for (const auto& ep : endpoints) {
            const double b = basis(ep.first) / ep.second; // scale rows by 1/target
            num += b * (remainder(ep) / ep.second);
            den += b * b;
        }
        return num / den;
    };

    TechParams out = base;
    out.p_cell = 0.0;
    out.c_parasitic = 0.0;
    if (shape == PowerShape::Linear) {
        out.p_cell = lsq_single([](double n) { return n; });
    } else if (shape == PowerShape::SuperlinearOnly) {
        out.c_parasitic = lsq_single([](double n) { return std::pow(n, 1.5); });
    } else {
        if (endpoints.size() == 2) {
            const double n1 = endpoints[0].first, n2 = endpoints[1].first;
            const double r1 = remainder(endpoints[0]), r2 = remainder(endpoints[1]);
            const double a1 = n1, b1 = std::pow(n1, 1.5);
            const double a2 = n2, b2 = std::pow(n2, 1.5);
            const double det = a1 * b2 - a2 * b1;
            if (det == 0.0) throw std::invalid_argument("calibrate_power_model: singular system");
            out.p_cell = (r1 * b2 - r2 * b1) / det;
            out.c_parasitic = (a1 * r2 - a2 * r1) / det;
            if (out.p_cell < 0.0) {
                out.p_cell = 0.0;
                out.c_parasitic = lsq_single([](double n) { return std::pow(n, 1.5); });
            } else if (out.c_parasitic < 0.0) {
                out.c_parasitic = 0.0;
                out.p_cell = lsq_single([](double n) { return n; });
            }
        } else {
            throw std::invalid_argument(
                "calibrate_power_model: overdetermined two-term fit not supported");
        }
    }

    CalibrationResult res;
    res.params = out;
    for (const auto& ep : endpoints) {
        ArrayConfig a;
        const int side = static_cast<int>(std::round(std::sqrt(ep.first)));
        a.rows = side;
        a.cols = static_cast<int>(std::round(ep.first / side));
        const double err = std::abs(retention_power(out, a) - ep.second) / ep.second;
        res.residuals.push_back(err);
        res.max_residual = std::max(res.max_residual, err);
    }
    return res;
}

struct ComparisonRow {
    int rows = 0, cols = 0;
    double n_bits = 0.0;
    Tech tech = Tech::Af2T1;
    double power = 0.0;
    double inaccessible = 0.0;
    // savings of 2T1AF relative to this technology at the same size; 1 for
    // 2T1AF itself, unset when no 2T1AF column is present
    std::optional<double> savings_vs_af2t1;
};

struct PowerReport {
    std::vector<ComparisonRow> rows;
    bool has_af2t1 = false;
};

inline PowerReport compare(const std::vector<ArrayConfig>& configs,
                           const std::vector<TechParams>& techs) {
    PowerReport rep;
    for (const TechParams& t : techs) rep.has_af2t1 |= (t.tech == Tech::Af2T1);
    for (const ArrayConfig& a : configs) {
        double p_ref = 0.0;
        if (rep.has_af2t1) {
            for (const TechParams& t : techs)
                if (t.tech == Tech::Af2T1) p_ref = retention_power(t, a);
        }
        for (const TechParams& t : techs) {
            ComparisonRow r;
            r.rows = a.rows;
            r.cols = a.cols;
            r.n_bits = a.n_bits();
            r.tech = t.tech;
            r.power = retention_power(t, a);
            r.inaccessible = inaccessible_fraction(t, a);
            if (rep.has_af2t1 && p_ref > 0.0) r.savings_vs_af2t1 = r.power / p_ref;
            rep.rows.push_back(r);
        }
    }
    return rep;
}

} // namespace afesim::array_model
