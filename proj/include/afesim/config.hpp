#pragma once

// Flat key = value configuration files with [section] headers. Lines starting
// with # or ; are comments. Parse errors carry the line number.

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>

#include "afesim/array_model.hpp"
#include "afesim/calibration.hpp"
#include "afesim/device.hpp"
#include "afesim/reliability.hpp"

namespace afesim::config {

struct ConfigError : std::runtime_error {
    int line;
    ConfigError(const std::string& what, int line_no)
        : std::runtime_error(what + (line_no > 0 ? " (line " + std::to_string(line_no) + ")"
                                                 : std::string())),
          line(line_no) {}
};

using KeyValues = std::map<std::string, std::string>; // "section.key" -> value

namespace detail {
inline std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}
} // namespace detail

inline KeyValues parse_stream(std::istream& in) {
    KeyValues kv;
    std::string line, section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = detail::trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']' || t.size() < 3)
                throw ConfigError("malformed section header", line_no);
            section = detail::trim(t.substr(1, t.size() - 2));
            continue;
        }
        const std::size_t eq = t.find('=');
        if (eq == std::string::npos) throw ConfigError("expected key = value", line_no);
        const std::string key = detail::trim(t.substr(0, eq));
        const std::string val = detail::trim(t.substr(eq + 1));
        if (key.empty()) throw ConfigError("empty key", line_no);
        if (val.empty()) throw ConfigError("empty value for key '" + key + "'", line_no);
        kv[section.empty() ? key : section + "." + key] = val;
    }
    return kv;
}

inline KeyValues parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path, 0);
    return parse_stream(in);
}

inline double to_number(const KeyValues& kv, const std::string& key, double fallback) {
    auto it = kv.find(key);
    if (it == kv.end()) return fallback;
    const char* s = it->second.c_str();
    char* end = nullptr;
    const double v = std::strtod(s, &end);
    if (end == s || *detail::trim(end).c_str() != '\0')
        throw ConfigError("not a number: " + key + " = " + it->second, 0);
    return v;
}

inline std::string to_string(const KeyValues& kv, const std::string& key,
                             const std::string& fallback) {
    auto it = kv.find(key);
    return it == kv.end() ? fallback : it->second;
}

// Device file: [film], [stack], [transistor] sections over the reference
// calibration defaults.
inline device::AfeFet load_device(const KeyValues& kv) {
    device::AfeFet d = calibration::reference_device();
    d.film.alpha = to_number(kv, "film.alpha", d.film.alpha);
    d.film.beta = to_number(kv, "film.beta", d.film.beta);
    d.film.xi = to_number(kv, "film.xi", d.film.xi);
    d.film.p_scale = to_number(kv, "film.p_scale", d.film.p_scale);
    d.film.e_scale = to_number(kv, "film.e_scale", d.film.e_scale);
    d.stack.ar = to_number(kv, "stack.ar", d.stack.ar);
    d.stack.t_afe = to_number(kv, "stack.t_afe", d.stack.t_afe);
    d.stack.eps_afe = to_number(kv, "stack.eps_afe", d.stack.eps_afe);
    d.stack.c_ox = to_number(kv, "stack.c_ox", d.stack.c_ox);
    d.stack.c_bg = to_number(kv, "stack.c_bg", d.stack.c_bg);
    d.stack.v_fb = to_number(kv, "stack.v_fb", d.stack.v_fb);
    d.stack.q_trap = to_number(kv, "stack.q_trap", d.stack.q_trap);
    d.stack.grains = static_cast<int>(to_number(kv, "stack.grains", d.stack.grains));
    d.stack.beta_spread = to_number(kv, "stack.beta_spread", d.stack.beta_spread);
    d.mos.w = to_number(kv, "transistor.w", d.mos.w);
    d.mos.l_ch = to_number(kv, "transistor.l_ch", d.mos.l_ch);
    d.mos.mu_cox = to_number(kv, "transistor.mu_cox", d.mos.mu_cox);
    d.mos.v_t0 = to_number(kv, "transistor.v_t0", d.mos.v_t0);
    d.mos.n_ss = to_number(kv, "transistor.n_ss", d.mos.n_ss);
    d.mos.i_gmin = to_number(kv, "transistor.i_gmin", d.mos.i_gmin);
    if (!d.film.valid() || !d.stack.valid() || !d.mos.valid())
        throw ConfigError("device parameters out of range", 0);
    return d;
}

inline array_model::TechParams load_tech(const KeyValues& kv) {
    array_model::TechParams t;
    const std::string name = to_string(kv, "tech.name", "af2t1");
    const auto parsed = array_model::parse_tech(name);
    if (!parsed) throw ConfigError("unknown technology: " + name, 0);
    t.tech = *parsed;
    switch (t.tech) {
        case array_model::Tech::Sram6T: t = calibration::reference_sram(); break;
        case array_model::Tech::Edram2T: t = calibration::reference_edram(); break;
        case array_model::Tech::Af2T1: t = calibration::reference_af2t1(); break;
    }
    t.p_cell = to_number(kv, "tech.p_cell", t.p_cell);
    t.c_parasitic = to_number(kv, "tech.c_parasitic", t.c_parasitic);
    t.e_refresh_row = to_number(kv, "tech.e_refresh_row", t.e_refresh_row);
    t.t_retention_cell = to_number(kv, "tech.t_retention_cell", t.t_retention_cell);
    t.t_refresh_row = to_number(kv, "tech.t_refresh_row", t.t_refresh_row);
    if (!t.valid()) throw ConfigError("technology parameters out of range", 0);
    return t;
}

inline reliability::DriftModel load_drift(const KeyValues& kv, const std::string& protocol) {
    reliability::DriftModel m = (protocol == "unipolar") ? calibration::unipolar_drift()
                                                         : calibration::bipolar_drift();
    m.rate_p = to_number(kv, "drift.rate_p", m.rate_p);
    m.rate_e = to_number(kv, "drift.rate_e", m.rate_e);
    m.t0 = to_number(kv, "drift.t0", m.t0);
    m.fast_depol_tau = to_number(kv, "drift.fast_depol_tau", m.fast_depol_tau);
    if (!m.valid()) throw ConfigError("drift parameters out of range", 0);
    return m;
}

} // namespace afesim::config
