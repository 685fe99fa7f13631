// afesim: quasi-static AFeFET / 2T1AF memory simulator front end.
//
// Subcommands reproduce the standard characterization flows: polarization
// loops, hysteretic transfer sweeps with window extraction, cell operation
// scripts, retention sampling, measurement-data fits, and the array-level
// power comparison. All outputs are deterministic: identical inputs give
// byte-identical files.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <sstream>

#include "afesim/calibration.hpp"
#include "afesim/cell.hpp"
#include "afesim/config.hpp"
#include "afesim/device.hpp"
#include "afesim/io.hpp"
#include "afesim/lgd.hpp"
#include "afesim/reliability.hpp"

using namespace afesim;
using nlohmann::json;

namespace {

constexpr int kExitSolver = 1;
constexpr int kExitUsage = 2;

struct CommonOpts {
    std::string config_path;
    std::string out_path;
    std::string format = "csv";
    int parallel = 1;
};

config::KeyValues load_config_or_empty(const std::string& path) {
    if (path.empty()) return {};
    return config::parse_file(path); // throws ConfigError naming the path
}

void emit(const CommonOpts& opts, const std::string& content) {
    if (opts.out_path.empty())
        std::cout << content;
    else
        io::write_file(opts.out_path, content);
}

// ---- pv-loop ---------------------------------------------------------------

int cmd_pv_loop(const CommonOpts& opts, double amplitude, double step, int cycles) {
    const config::KeyValues kv = load_config_or_empty(opts.config_path);
    lgd::LandauParams lp;
    lp.alpha = config::to_number(kv, "film.alpha", 1.0);
    lp.beta = config::to_number(kv, "film.beta", -1.8);
    lp.xi = config::to_number(kv, "film.xi", 1.0);
    lp.p_scale = config::to_number(kv, "film.p_scale", 1.0);
    lp.e_scale = config::to_number(kv, "film.e_scale", 1.0);
    if (!lp.valid()) throw config::ConfigError("invalid film parameters", 0);

    const auto wave = lgd::triangle_wave(amplitude, step, cycles);
    const auto loop = lgd::trace_pe_loop(lp, wave, {0.0, 0.0});

    io::CsvWriter csv({"e", "p", "switching_flag"});
    for (const auto& pt : loop)
        csv.row({io::num(pt.e), io::num(pt.p), pt.switched ? "1" : "0"});
    emit(opts, csv.str());
    return 0;
}

// ---- idvg ------------------------------------------------------------------

struct IdvgResult {
    double ar;
    device::SweepTrace trace;
    device::WindowMetrics metrics;
};

IdvgResult run_idvg(device::AfeFet dev, double ar, double v_start, double v_peak,
                    double v_valley, double step, double v_ds, double v_m, bool with_cv) {
    dev.stack.ar = ar;
    auto film = device::fresh_film(dev);
    // one conditioning cycle so the reported loop is the steady one
    film = device::sweep_idvg(dev, device::loop_waveform(v_start, v_peak, v_valley, step), v_ds,
                              std::move(film))
               .final_state;
    IdvgResult r;
    r.ar = ar;
    r.trace = device::sweep_idvg(dev, device::loop_waveform(v_start, v_peak, v_valley, step),
                                 v_ds, std::move(film), with_cv);
    r.metrics = device::extract_window_metrics(r.trace, v_m,
                                               calibration::kCriterionCurrentPerWidth);
    return r;
}

int cmd_idvg(const CommonOpts& opts, std::vector<double> ars, double v_peak, double v_valley,
             double step, double v_ds, double v_m, bool with_cv) {
    const config::KeyValues kv = load_config_or_empty(opts.config_path);
    const device::AfeFet base = config::load_device(kv);
    v_peak = config::to_number(kv, "sweep.stop", v_peak);
    v_valley = config::to_number(kv, "sweep.start", v_valley);
    step = config::to_number(kv, "sweep.step", step);
    if (step <= 0.0) throw config::ConfigError("sweep step must be positive", 0);
    if (ars.empty()) ars = {base.stack.ar};

    std::vector<IdvgResult> results(ars.size());
    if (opts.parallel > 1) {
        std::vector<std::future<IdvgResult>> futs;
        for (double ar : ars)
            futs.push_back(std::async(std::launch::async, run_idvg, base, ar, 0.0, v_peak,
                                      v_valley, step, v_ds, v_m, with_cv));
        for (std::size_t i = 0; i < futs.size(); ++i) results[i] = futs[i].get();
    } else {
        for (std::size_t i = 0; i < ars.size(); ++i)
            results[i] = run_idvg(base, ars[i], 0.0, v_peak, v_valley, step, v_ds, v_m, with_cv);
    }

    for (const auto& r : results) {
        io::CsvWriter csv({"v_gs_V", "i_d_A", "c_gg_F", "p_C_per_m2", "v_int_V", "branch"});
        for (const auto& s : r.trace.samples)
            csv.row({io::num(s.v_gs), io::num(s.i_d), io::num(s.c_gg), io::num(s.p),
                     io::num(s.v_int), s.dir > 0 ? "up" : "down"});
        if (!opts.out_path.empty()) {
            std::ostringstream name;
            name << opts.out_path << ".ar" << io::num(r.ar) << ".csv";
            io::write_file(name.str(), csv.str());
        }
    }

    if (opts.format == "json") {
        json j = json::array();
        for (const auto& r : results)
            j.push_back({{"ar", r.ar},
                         {"mw", r.metrics.mw},
                         {"on_off", r.metrics.on_off},
                         {"v_th_p", r.metrics.v_th_down},
                         {"v_th_e", r.metrics.v_th_up},
                         {"i_on", r.metrics.i_on},
                         {"i_off", r.metrics.i_off}});
        std::cout << j.dump(2) << "\n";
    } else {
        io::CsvWriter csv({"ar", "mw_V", "on_off", "v_th_p_V", "v_th_e_V"});
        for (const auto& r : results)
            csv.row({io::num(r.ar), io::num(r.metrics.mw), io::num(r.metrics.on_off),
                     io::num(r.metrics.v_th_down), io::num(r.metrics.v_th_up)});
        std::cout << csv.str();
    }
    return 0;
}

// ---- cell-demo -------------------------------------------------------------

struct ScriptError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

int cmd_cell_demo(const CommonOpts& opts, const std::string& script_path) {
    const config::KeyValues kv = load_config_or_empty(opts.config_path);
    const device::AfeFet dev = config::load_device(kv);
    cell::OperatingVoltages volts;
    volts.v_w = config::to_number(kv, "cell.v_w", volts.v_w);
    volts.v_e = config::to_number(kv, "cell.v_e", volts.v_e);
    volts.v_h = config::to_number(kv, "cell.v_h", volts.v_h);
    volts.v_m = config::to_number(kv, "cell.v_m", volts.v_m);
    volts.vdd_read = config::to_number(kv, "cell.vdd_read", volts.vdd_read);
    const auto ctx = cell::make_cell_context(dev, volts, calibration::bipolar_drift());

    std::ifstream in(script_path);
    if (!in) throw config::ConfigError("cannot open script file: " + script_path, 0);

    cell::CellState c = cell::fresh_cell(ctx);
    json log = json::array();
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ss(line);
        std::string op;
        if (!(ss >> op) || op.empty() || op[0] == '#') continue;
        json entry;
        entry["op"] = op;
        if (op == "WRITE") {
            int r, cidx, bit;
            if (!(ss >> r >> cidx >> bit))
                throw ScriptError("line " + std::to_string(line_no) + ": WRITE needs row col bit");
            c = cell::write(ctx, std::move(c), bit);
        } else if (op == "ERASE") {
            int r, cidx;
            if (!(ss >> r >> cidx))
                throw ScriptError("line " + std::to_string(line_no) + ": ERASE needs row col");
            c = cell::erase(ctx, std::move(c));
        } else if (op == "READ") {
            int r, cidx;
            if (!(ss >> r >> cidx))
                throw ScriptError("line " + std::to_string(line_no) + ": READ needs row col");
            auto res = cell::read(ctx, std::move(c));
            c = std::move(res.cell);
            entry["bit_read"] = res.bit;
            entry["i_read_A"] = res.i_read;
        } else if (op == "HOLD") {
            double secs;
            if (!(ss >> secs))
                throw ScriptError("line " + std::to_string(line_no) + ": HOLD needs seconds");
            std::optional<double> override_vm;
            std::string extra;
            if (ss >> extra) {
                if (extra.rfind("vm=", 0) == 0)
                    override_vm = std::stod(extra.substr(3));
                else
                    throw ScriptError("line " + std::to_string(line_no) +
                                      ": unknown HOLD argument '" + extra + "'");
            }
            auto res = cell::hold(ctx, std::move(c), secs, override_vm);
            c = std::move(res.cell);
            entry["hold_power_W"] = res.hold_power;
            entry["ds_leakage_W"] = res.ds_leakage_power;
        } else {
            throw ScriptError("line " + std::to_string(line_no) + ": unknown command '" + op +
                              "'");
        }
        entry["node_v"] = c.node_v;
        entry["p_C_per_m2"] = dev.film.p_scale * c.film.mean_p();
        log.push_back(entry);
    }
    emit(opts, log.dump(2) + "\n");
    return 0;
}

// ---- retention -------------------------------------------------------------

int cmd_retention(const CommonOpts& opts, const std::string& protocol, double t_max,
                  int points_per_decade, bool held) {
    const config::KeyValues kv = load_config_or_empty(opts.config_path);
    const device::AfeFet dev = config::load_device(kv);
    const reliability::DriftModel drift = config::load_drift(kv, protocol);
    const double v_e = (protocol == "unipolar") ? 0.0 : -2.0;
    const auto op = reliability::capture_operating_point(dev, 4.0, v_e, 1.5);

    io::CsvWriter csv({"t_seconds", "current_A", "state"});
    const int decades = static_cast<int>(std::ceil(std::log10(t_max)));
    for (int d = 0; d <= decades; ++d) {
        for (int k = 0; k < points_per_decade; ++k) {
            const double t = std::pow(10.0, d + static_cast<double>(k) / points_per_decade);
            if (t > t_max * (1.0 + 1e-12)) break;
            const auto s = reliability::drift_sample(drift, op, t, held);
            csv.row({io::num(t), io::num(s.i_on), "on"});
            csv.row({io::num(t), io::num(s.i_off), "off"});
        }
    }
    emit(opts, csv.str());
    return 0;
}

// ---- fit -------------------------------------------------------------------

int cmd_fit(const CommonOpts& opts, const std::string& kind, const std::string& csv_path,
            double ratio_min, double mw0) {
    const io::CsvTable table = io::read_csv(csv_path);
    if (table.rows.size() < 3) throw config::ConfigError("need at least 3 data rows", 0);

    reliability::FitResult fit;
    if (kind == "retention") {
        std::vector<std::pair<double, double>> on, off;
        for (const auto& r : table.rows) {
            if (r.size() < 3) throw config::ConfigError("retention rows need t,current,state", 0);
            const double t = std::stod(r[0]);
            const double i = std::stod(r[1]);
            if (r[2] == "on")
                on.push_back({t, i});
            else if (r[2] == "off")
                off.push_back({t, i});
            else
                throw config::ConfigError("state column must be 'on' or 'off'", 0);
        }
        fit = reliability::fit_retention(on, off, ratio_min);
    } else if (kind == "endurance") {
        std::vector<std::pair<double, double>> pts;
        for (const auto& r : table.rows) {
            if (r.size() < 2) throw config::ConfigError("endurance rows need cycles,mw", 0);
            pts.push_back({std::stod(r[0]), std::stod(r[1])});
        }
        fit = reliability::fit_endurance(pts, mw0);
    } else {
        throw config::ConfigError("fit kind must be retention or endurance", 0);
    }

    json j;
    j["kind"] = kind;
    j["slope"] = fit.slope;
    j["intercept"] = fit.intercept;
    j["r_squared"] = fit.r_squared;
    j["exceeds_horizon"] = fit.exceeds_horizon;
    j["horizon"] = fit.horizon;
    if (fit.exceeds_horizon)
        j["crossing"] = nullptr;
    else
        j["crossing"] = fit.crossing;
    emit(opts, j.dump(2) + "\n");
    return 0;
}

// ---- array-compare ---------------------------------------------------------

int cmd_array_compare(const CommonOpts& opts, const std::vector<std::string>& tech_args,
                      const std::vector<int>& sizes_kb) {
    std::vector<array_model::TechParams> techs;
    for (const std::string& t : tech_args) {
        if (auto kind = array_model::parse_tech(t)) {
            switch (*kind) {
                case array_model::Tech::Sram6T: techs.push_back(calibration::reference_sram()); break;
                case array_model::Tech::Edram2T: techs.push_back(calibration::reference_edram()); break;
                case array_model::Tech::Af2T1: techs.push_back(calibration::reference_af2t1()); break;
            }
        } else {
            techs.push_back(config::load_tech(config::parse_file(t)));
        }
    }
    std::vector<array_model::ArrayConfig> sizes;
    for (int kb : sizes_kb) {
        const int side = static_cast<int>(std::round(std::sqrt(kb * 1024.0)));
        sizes.push_back({side, side});
    }
    const auto rep = array_model::compare(sizes, techs);

    if (opts.format == "json") {
        json j = json::array();
        for (const auto& r : rep.rows) {
            json row{{"rows", r.rows},
                     {"cols", r.cols},
                     {"n_bits", r.n_bits},
                     {"tech", array_model::tech_name(r.tech)},
                     {"power_W", r.power},
                     {"inaccessible_fraction", r.inaccessible}};
            if (r.savings_vs_af2t1)
                row["savings_vs_af2t1"] = *r.savings_vs_af2t1;
            else
                row["savings_vs_af2t1"] = nullptr;
            j.push_back(row);
        }
        emit(opts, j.dump(2) + "\n");
    } else {
        io::CsvWriter csv({"rows", "cols", "n_bits", "tech", "power_W", "inaccessible_fraction",
                           "savings_vs_af2t1"});
        for (const auto& r : rep.rows)
            csv.row({io::num(r.rows), io::num(r.cols), io::num(r.n_bits),
                     array_model::tech_name(r.tech), io::num(r.power), io::num(r.inaccessible),
                     r.savings_vs_af2t1 ? io::num(*r.savings_vs_af2t1) : ""});
        emit(opts, csv.str());
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"quasi-static AFeFET / leakage-free volatile memory simulator"};
    app.require_subcommand(1);

    CommonOpts opts;
    app.add_option("--config", opts.config_path, "key = value configuration file");
    app.add_option("--out", opts.out_path, "output file (stdout when omitted)");
    app.add_option("--format", opts.format, "csv|json")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--parallel", opts.parallel, "worker threads for independent points")
        ->check(CLI::PositiveNumber);

    auto* pv = app.add_subcommand("pv-loop", "polarization-field loop of the bare film");
    double amplitude = 0.5, pv_step = 2.5e-3;
    int cycles = 1;
    pv->add_option("--amplitude", amplitude, "triangular wave amplitude, normalized field");
    pv->add_option("--step", pv_step, "field step");
    pv->add_option("--cycles", cycles, "number of periods");

    auto* idvg = app.add_subcommand("idvg", "hysteretic transfer sweep and window metrics");
    std::vector<double> ars;
    double v_peak = 4.0, v_valley = -2.0, sweep_step = 5e-3, v_ds = 0.1, v_m = 1.5;
    bool with_cv = false;
    idvg->add_option("--ar", ars, "area ratios to sweep");
    idvg->add_option("--peak", v_peak, "sweep peak, V");
    idvg->add_option("--valley", v_valley, "sweep valley, V (0 for the unipolar loop)");
    idvg->add_option("--step", sweep_step, "sweep step, V");
    idvg->add_option("--vds", v_ds, "drain bias, V");
    idvg->add_option("--vm", v_m, "window evaluation bias, V");
    idvg->add_flag("--cv", with_cv, "also compute the gate capacitance column");

    auto* demo = app.add_subcommand("cell-demo", "run a cell operation script");
    std::string script_path;
    demo->add_option("--script", script_path, "WRITE/ERASE/READ/HOLD script")->required();

    auto* ret = app.add_subcommand("retention", "sample the drift law into a measurement csv");
    std::string protocol = "bipolar";
    double t_max = 1e8;
    int ppd = 2;
    bool unheld = false;
    ret->add_option("--protocol", protocol, "unipolar|bipolar")
        ->check(CLI::IsMember({"unipolar", "bipolar"}));
    ret->add_option("--tmax", t_max, "last sample time, s");
    ret->add_option("--points-per-decade", ppd, "sampling density");
    ret->add_flag("--no-hold", unheld, "sample with the hold bias removed");

    auto* fit = app.add_subcommand("fit", "fit retention or endurance measurements");
    std::string fit_kind, fit_csv;
    double ratio_min = 10.0, mw0 = 1.0;
    fit->add_option("--kind", fit_kind, "retention|endurance")->required();
    fit->add_option("--csv", fit_csv, "measurement csv")->required();
    fit->add_option("--ratio-min", ratio_min, "retention failure criterion");
    fit->add_option("--mw0", mw0, "fresh window for the endurance criterion");

    auto* arr = app.add_subcommand("array-compare", "retention power and stall comparison");
    std::vector<std::string> tech_args{"sram6t", "edram2t", "af2t1"};
    std::vector<int> sizes_kb{1, 4, 16, 64, 256};
    arr->add_option("--tech", tech_args, "technology names or parameter files");
    arr->add_option("--sizes", sizes_kb, "array sizes in kilobits");

    CLI11_PARSE(app, argc, argv);

    try {
        if (pv->parsed()) return cmd_pv_loop(opts, amplitude, pv_step, cycles);
        if (idvg->parsed())
            return cmd_idvg(opts, ars, v_peak, v_valley, sweep_step, v_ds, v_m, with_cv);
        if (demo->parsed()) return cmd_cell_demo(opts, script_path);
        if (ret->parsed()) return cmd_retention(opts, protocol, t_max, ppd, !unheld);
        if (fit->parsed()) return cmd_fit(opts, fit_kind, fit_csv, ratio_min, mw0);
        if (arr->parsed()) return cmd_array_compare(opts, tech_args, sizes_kb);
    } catch (const config::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ScriptError& e) {
        std::cerr << "script error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const lgd::SolverError& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return kExitSolver;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSolver;
    }
    return kExitUsage;
}
