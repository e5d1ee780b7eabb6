// faslab: batch front-end for the scattering, trace and weighted-estimate
// experiments. Every command reads one key-value config, validates it fully
// before any solver work, and drops CSV/JSON artifacts with provenance
// headers into the output root.
//
// Exit codes: 0 success, 2 config error, 3 numerical-check failure,
// 4 runtime error.

#include "CLI11.hpp"
#include "json.hpp"

#include "fas/carleman.hpp"
#include "fas/config.hpp"
#include "fas/experiments.hpp"
#include "fas/freqbridge.hpp"
#include "fas/report.hpp"
#include "fas/wavesolver.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace fas;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitCheckFailed = 3;
constexpr int kExitRuntime = 4;

const std::vector<std::string> kKnownKeys = {
    "grid.n",           "grid.L",            "grid.h",
    "grid.t0",          "grid.T",            "grid.sponge_width",
    "solver.eps",       "solver.sponge_strength", "solver.source_scale",
    "solver.trace_offset",
    "potential.file",   "potential.index",   "potential.bumps",
    "potential2.file",  "potential2.index",  "potential2.bumps",
    "ensemble.count",   "ensemble.seed",     "ensemble.bumps_min",
    "ensemble.bumps_max", "ensemble.center_max", "ensemble.r_min",
    "ensemble.r_max",   "ensemble.amp_max",
    "carleman.a",       "carleman.lambda",   "carleman.suite",
    "carleman.seed",    "carleman.s_list",   "carleman.spread_limit",
    "carleman.with_potential",
    "ibp.suite",        "ibp.seed",          "ibp.s",
    "energy.suite",     "energy.seed",       "energy.s",
    "energy.tau",
    "recover.offset",
    "stability.pairs",
    "hs.s_list",        "hs.T",              "hs.a",
    "hs.lambda",        "hs.nrho",           "hs.nxn",
    "hs.nt",
    "freq.k_list",      "freq.taper",        "freq.theta_count",
    "output.dir",
};

std::string join(const std::string& dir, const std::string& name) {
    return (fs::path(dir) / name).string();
}

std::string describe_grid(const SpaceTimeGrid& g) {
    std::ostringstream os;
    os << "n=" << g.n() << " h=" << format_double(g.h()) << " L=" << format_double(g.L())
       << " t0=" << format_double(g.t0()) << " T=" << format_double(g.T());
    return os.str();
}

std::string fd(double v) { return format_double(v); }
std::string fb(bool v) { return v ? "1" : "0"; }

double default_eps(const SpaceTimeGrid& g) { return 4.0 * g.h(); }

// ring of unit directions in the x0-x1 plane; the single angle keeps the
// far-field CSV schema identical for n = 2 and n = 3
std::vector<Vec> ring_directions(int count) {
    if (count < 1) throw ConfigError("config: freq.theta_count must be positive");
    std::vector<Vec> dirs;
    dirs.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        const double th = 2.0 * std::numbers::pi * i / count;
        dirs.push_back({std::cos(th), std::sin(th), 0.0});
    }
    return dirs;
}

// ---- commands --------------------------------------------------------------

int cmd_gen_potential(const Config& cfg, const std::string& outdir, int) {
    const EnsembleSpec spec = ensemble_from_config(cfg);
    const int n = cfg.get_int("grid.n", 2);
    const std::vector<Potential> pots = gen_ensemble(spec, n);

    json arr = json::array();
    for (const Potential& V : pots) {
        json jp = json::array();
        for (const Bump& b : V.bumps())
            jp.push_back({{"center", {b.center[0], b.center[1], b.center[2]}},
                          {"r", b.r},
                          {"amp", b.amp}});
        arr.push_back(jp);
    }
    const MetaInfo meta{"gen-potential", cfg.hash(),
                        "n=" + std::to_string(n) + " seed=" + std::to_string(spec.seed)};
    json doc;
    doc["meta"] = {{"tool", "faslab"},
                   {"version", kFaslabVersion},
                   {"command", meta.command},
                   {"config_hash", meta.config_hash}};
    doc["n"] = n;
    doc["potentials"] = arr;
    const std::string path = join(outdir, "potentials.json");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << doc.dump(2) << "\n";

    write_json_summary(join(outdir, "gen_summary.json"), meta,
                       {{"count", pots.size()}, {"file", path}});
    std::cout << "wrote " << pots.size() << " potentials to " << path << "\n";
    return kExitOk;
}

int cmd_solve(const Config& cfg, const std::string& outdir, int) {
    const SpaceTimeGrid g(grid_from_config(cfg));
    const double eps = cfg.get_double("solver.eps", default_eps(g));
    const double sponge = cfg.get_double("solver.sponge_strength", 30.0);
    const double scale = cfg.get_double("solver.source_scale", 1.0);
    const double offset = cfg.get_double("solver.trace_offset", 8.0);
    const Potential V = potential_from_config(cfg, "potential", g.n());

    const WaveField f = solve_scattered(V, g, eps, sponge, scale);
    const CharTrace tr = characteristic_trace(f, g, offset);

    const MetaInfo meta{"solve", cfg.hash(), describe_grid(g)};
    CsvFile csv(join(outdir, "solve_trace.csv"), meta, "x0,x1,x2,w,w_t,w_xn,past_T");
    std::size_t flagged = 0;
    for (const std::size_t p : g.ball_nodes()) {
        const Vec x = g.point(p);
        flagged += tr.past_T[p];
        csv.row(csv_row({fd(x[0]), fd(x[1]), fd(x[2]), fd(tr.w[p]), fd(tr.w_t[p]),
                         fd(tr.w_xn[p]), fb(tr.past_T[p] != 0)}));
    }
    double umax = 0.0;
    for (const double v : f.u) umax = std::max(umax, std::abs(v));

    write_json_summary(join(outdir, "solve_summary.json"), meta,
                       {{"potential", f.potential_ref},
                        {"eps", eps},
                        {"trace_offset", offset},
                        {"max_abs_u", umax},
                        {"ball_nodes", g.ball_nodes().size()},
                        {"trace_nodes_past_T", flagged}});
    std::cout << "solve: max|u| = " << fd(umax) << ", trace written for "
              << g.ball_nodes().size() << " nodes\n";
    return kExitOk;
}

int cmd_stability(const Config& cfg, const std::string& outdir, int jobs) {
    const SpaceTimeGrid g(grid_from_config(cfg));
    const double eps = cfg.get_double("solver.eps", default_eps(g));
    const double sponge = cfg.get_double("solver.sponge_strength", 30.0);
    const int npairs = cfg.get_int("stability.pairs", 10);
    const EnsembleSpec spec = ensemble_from_config(cfg);

    const auto pairs = make_pairs(spec, npairs, g.n());
    const StabilityReport rep = run_stability(pairs, g, eps, sponge, spec.seed, jobs);

    const MetaInfo meta{"stability", cfg.hash(), describe_grid(g)};
    CsvFile csv(join(outdir, "stability.csv"), meta,
                "id1,id2,dv_norm,trace_norm,ratio,skipped,skip_reason");
    for (const PairRecord& p : rep.pairs)
        csv.row(csv_row({std::to_string(p.id1), std::to_string(p.id2), fd(p.dv_norm),
                         fd(p.trace_norm), fd(p.ratio), fb(p.skipped), p.skip_reason}));

    bool healthy = true;
    for (const PairRecord& p : rep.pairs)
        if (!p.skipped && (!std::isfinite(p.ratio) || p.ratio <= 0.0)) healthy = false;

    write_json_summary(join(outdir, "stability_summary.json"), meta,
                       {{"pairs", rep.pairs.size()},
                        {"retained", rep.retained},
                        {"c_emp", rep.c_emp},
                        {"spread", rep.spread},
                        {"eps", rep.eps},
                        {"seed", rep.seed},
                        {"ratios_positive_finite", healthy}});
    std::cout << "stability: retained " << rep.retained << "/" << rep.pairs.size()
              << ", C_emp = " << fd(rep.c_emp) << ", spread = " << fd(rep.spread) << "\n";
    if (!healthy) {
        std::cerr << "stability: a retained ratio is not finite and positive\n";
        return kExitCheckFailed;
    }
    return kExitOk;
}

int cmd_carleman_verify(const Config& cfg, const std::string& outdir, int jobs) {
    const SpaceTimeGrid g(grid_from_config(cfg));
    WeightParams wp;
    wp.a = cfg.get_double("carleman.a", wp.a);
    wp.lambda = cfg.get_double("carleman.lambda", wp.lambda);
    wp.T = g.T();
    const CarlemanWeight wt(g.n(), wp);
    const int suite_size = cfg.get_int("carleman.suite", 20);
    const std::uint64_t seed = cfg.get_u64("carleman.seed", 1);
    const std::vector<double> s_list =
        cfg.get_double_list("carleman.s_list", {0.5, 1.0, 2.0, 4.0});
    const double spread_limit = cfg.get_double("carleman.spread_limit", 2.0);
    const bool with_potential = cfg.get_bool("carleman.with_potential", false);
    const Potential V =
        with_potential ? potential_from_config(cfg, "potential", g.n()) : Potential();

    const auto suite = make_test_suite(suite_size, seed, g.n(), g.T());
    const SweepReport rep =
        carleman_sweep(suite, wt, s_list, g, with_potential ? &V : nullptr, jobs);

    const MetaInfo meta{"carleman-verify", cfg.hash(), describe_grid(g)};
    CsvFile csv(join(outdir, "carleman_sweep.csv"), meta,
                "fn,s,offset,log_lhs,log_rhs_volume,log_rhs_sigma,log_rhs_top,ratio,"
                "all_zero,under_resolved");
    for (const SweepRow& r : rep.rows)
        csv.row(csv_row({std::to_string(r.fn_index), fd(r.s), fd(r.entry.offset),
                         fd(r.entry.log_lhs), fd(r.entry.log_rhs_volume),
                         fd(r.entry.log_rhs_sigma), fd(r.entry.log_rhs_top),
                         fd(r.entry.ratio), fb(r.entry.all_zero),
                         fb(r.entry.under_resolved)}));

    const bool uniform_ok = rep.empty || rep.spread <= spread_limit;
    write_json_summary(join(outdir, "carleman_summary.json"), meta,
                       {{"s_values", rep.s_values},
                        {"max_ratio", rep.max_ratio},
                        {"c_emp", rep.c_emp},
                        {"spread", rep.spread},
                        {"spread_limit", spread_limit},
                        {"uniform_ok", uniform_ok},
                        {"suite", suite_size},
                        {"lambda", wp.lambda},
                        {"a", wp.a},
                        {"empty", rep.empty},
                        {"under_resolved", rep.under_resolved}});
    std::cout << "carleman-verify: C_emp = " << fd(rep.c_emp) << ", spread = "
              << fd(rep.spread) << " (limit " << fd(spread_limit) << ")\n";
    if (!uniform_ok) {
        std::cerr << "carleman-verify: per-s max ratio spread " << fd(rep.spread)
                  << " exceeds " << fd(spread_limit)
                  << "; no uniform constant at this tolerance\n";
        return kExitCheckFailed;
    }
    return kExitOk;
}

int cmd_ibp_check(const Config& cfg, const std::string& outdir, int) {
    const SpaceTimeGrid g(grid_from_config(cfg));
    WeightParams wp;
    wp.a = cfg.get_double("carleman.a", wp.a);
    wp.lambda = cfg.get_double("carleman.lambda", wp.lambda);
    wp.T = g.T();
    const CarlemanWeight wt(g.n(), wp);
    const int suite_size = cfg.get_int("ibp.suite", 10);
    const std::uint64_t seed = cfg.get_u64("ibp.seed", 1);
    const double s = cfg.get_double("ibp.s", 1.0);

    const auto suite = make_test_suite(suite_size, seed, g.n(), g.T());
    const MetaInfo meta{"ibp-check", cfg.hash(), describe_grid(g)};
    CsvFile csv(join(outdir, "ibp_check.csv"), meta,
                "fn,lhs,j1,j2,j3,b0,d0,d0_printed,residual,residual_printed,floor_used,"
                "under_resolved");
    double worst = 0.0, worst_printed = 0.0;
    for (std::size_t i = 0; i < suite.size(); ++i) {
        const IbpReport r = ibp_identity_check(suite[i], wt, s, g);
        worst = std::max(worst, r.residual);
        worst_printed = std::max(worst_printed, r.residual_printed);
        csv.row(csv_row({std::to_string(i), fd(r.lhs), fd(r.j1), fd(r.j2), fd(r.j3),
                         fd(r.b0), fd(r.d0), fd(r.d0_printed), fd(r.residual),
                         fd(r.residual_printed), fd(r.floor_used),
                         fb(r.under_resolved)}));
    }
    write_json_summary(join(outdir, "ibp_summary.json"), meta,
                       {{"suite", suite_size},
                        {"s", s},
                        {"max_residual", worst},
                        {"max_residual_printed", worst_printed}});
    std::cout << "ibp-check: max residual " << fd(worst) << " (as-published variant "
              << fd(worst_printed) << ")\n";
    return kExitOk;
}

int cmd_energy_check(const Config& cfg, const std::string& outdir, int) {
    const SpaceTimeGrid g(grid_from_config(cfg));
    WeightParams wp;
    wp.a = cfg.get_double("carleman.a", wp.a);
    wp.lambda = cfg.get_double("carleman.lambda", wp.lambda);
    wp.T = g.T();
    const CarlemanWeight wt(g.n(), wp);
    const int suite_size = cfg.get_int("energy.suite", 20);
    const std::uint64_t seed = cfg.get_u64("energy.seed", 1);
    const double s = cfg.get_double("energy.s", 1.0);
    const double tau = cfg.get_double("energy.tau", g.T());

    const auto suite = make_test_suite(suite_size, seed, g.n(), g.T());
    const MetaInfo meta{"energy-check", cfg.hash(), describe_grid(g)};
    CsvFile csv(join(outdir, "energy_check.csv"), meta,
                "fn,t_lhs,t_rhs,t_ratio,t_zero,c_lhs,c_rhs,c_ratio,c_zero");
    double max_t = 0.0, max_c = 0.0;
    bool finite = true;
    for (std::size_t i = 0; i < suite.size(); ++i) {
        const EnergyReport rt = energy_check_T(suite[i], g, tau);
        const EnergyReport rc = energy_check_char(suite[i], wt, s, g);
        if (!rt.zero) {
            max_t = std::max(max_t, rt.ratio);
            finite = finite && std::isfinite(rt.ratio);
        }
        if (!rc.zero) {
            max_c = std::max(max_c, rc.ratio);
            finite = finite && std::isfinite(rc.ratio);
        }
        csv.row(csv_row({std::to_string(i), fd(rt.lhs), fd(rt.rhs), fd(rt.ratio),
                         fb(rt.zero), fd(rc.lhs), fd(rc.rhs), fd(rc.ratio), fb(rc.zero)}));
    }
    write_json_summary(join(outdir, "energy_summary.json"), meta,
                       {{"suite", suite_size},
                        {"s", s},
                        {"tau", tau},
                        {"max_ratio_T", max_t},
                        {"max_ratio_char", max_c},
                        {"all_finite", finite}});
    std::cout << "energy-check: max T-side ratio " << fd(max_t)
              << ", max characteristic-side ratio " << fd(max_c) << "\n";
    if (!finite) {
        std::cerr << "energy-check: a ratio is not finite\n";
        return kExitCheckFailed;
    }
    return kExitOk;
}

int cmd_recover_trace(const Config& cfg, const std::string& outdir, int) {
    const SpaceTimeGrid g(grid_from_config(cfg));
    const double eps = cfg.get_double("solver.eps", default_eps(g));
    const double sponge = cfg.get_double("solver.sponge_strength", 30.0);
    const double offset = cfg.get_double("recover.offset", 8.0);
    const Potential V1 = potential_from_config(cfg, "potential", g.n());
    const Potential V2 = potential_from_config(cfg, "potential2", g.n());

    const RecoveryRecord rec = run_trace_recovery(V1, V2, g, eps, offset, sponge);

    const MetaInfo meta{"recover-trace", cfg.hash(), describe_grid(g)};
    CsvFile csv(join(outdir, "recover_field.csv"), meta,
                "x0,x1,x2,dv_rec,dv_alt,valid,valid_alt");
    for (const std::size_t p : g.ball_nodes()) {
        const Vec x = g.point(p);
        csv.row(csv_row({fd(x[0]), fd(x[1]), fd(x[2]), fd(rec.dv_rec[p]), fd(rec.dv_alt[p]),
                         fb(rec.valid[p] != 0), fb(rec.valid_alt[p] != 0)}));
    }
    write_json_summary(join(outdir, "recover_summary.json"), meta,
                       {{"rel_l2", rec.rel_l2},
                        {"absolute_mode", rec.absolute_mode},
                        {"alt_gap", rec.alt_gap},
                        {"offset", rec.offset},
                        {"eps", rec.eps}});
    std::cout << "recover-trace: " << (rec.absolute_mode ? "absolute L2 " : "relative L2 ")
              << fd(rec.rel_l2) << ", path consistency gap " << fd(rec.alt_gap) << "\n";
    return kExitOk;
}

int cmd_hs_decay(const Config& cfg, const std::string& outdir, int) {
    const std::vector<double> s_list =
        cfg.get_double_list("hs.s_list", {0.5, 1.0, 2.0, 4.0, 8.0});
    const double T = cfg.get_double("hs.T", 6.5);
    const double a = cfg.get_double("hs.a", 1.1);
    const double lambda = cfg.get_double("hs.lambda", 10.0);
    const int nrho = cfg.get_int("hs.nrho", 161);
    const int nxn = cfg.get_int("hs.nxn", 321);
    const int nt = cfg.get_int("hs.nt", 4001);

    const HsReport rep = h_s_decay(s_list, T, a, lambda, nrho, nxn, nt);

    std::ostringstream desc;
    desc << "T=" << fd(T) << " a=" << fd(a) << " lambda=" << fd(lambda);
    const MetaInfo meta{"hs-decay", cfg.hash(), desc.str()};
    CsvFile csv(join(outdir, "hs_decay.csv"), meta, "s,h");
    for (std::size_t i = 0; i < rep.s.size(); ++i)
        csv.row(csv_row({fd(rep.s[i]), fd(rep.h[i])}));

    const double decay =
        rep.h.empty() || rep.h.front() == 0.0 ? 0.0 : rep.h.back() / rep.h.front();
    write_json_summary(join(outdir, "hs_summary.json"), meta,
                       {{"s_list", rep.s},
                        {"h", rep.h},
                        {"strictly_decreasing", rep.strictly_decreasing},
                        {"last_over_first", decay}});
    std::cout << "hs-decay: h(" << fd(rep.s.front()) << ") = " << fd(rep.h.front()) << ", h("
              << fd(rep.s.back()) << ") = " << fd(rep.h.back()) << "\n";
    if (!rep.strictly_decreasing) {
        std::cerr << "hs-decay: values are not strictly decreasing\n";
        return kExitCheckFailed;
    }
    return kExitOk;
}

int cmd_farfield(const Config& cfg, const std::string& outdir, int jobs) {
    const SpaceTimeGrid g(grid_from_config(cfg));
    const double eps = cfg.get_double("solver.eps", default_eps(g));
    const double sponge = cfg.get_double("solver.sponge_strength", 30.0);
    const Potential V = potential_from_config(cfg, "potential", g.n());
    const std::vector<double> ks = cfg.get_double_list("freq.k_list", {1.0, 2.0, 3.0});
    const double taper = cfg.get_double("freq.taper", 0.1);
    const int theta_count = cfg.get_int("freq.theta_count", 64);
    const std::vector<Vec> dirs = ring_directions(theta_count);

    const WaveField f = solve_scattered(V, g, eps, sponge);
    const BoundaryTrace tr = boundary_trace(f, g);
    const FrequencyTrace ft = time_to_frequency(tr, g, ks, taper, jobs);

    const MetaInfo meta{"farfield", cfg.hash(), describe_grid(g)};
    CsvFile csv(join(outdir, "farfield.csv"), meta, "theta,k,re,im");
    json kmax = json::object();
    for (const double k : ks) {
        const auto ff = far_field(ft, k, dirs, g, jobs);
        double mx = 0.0;
        for (std::size_t i = 0; i < dirs.size(); ++i) {
            const double th = 2.0 * std::numbers::pi * static_cast<double>(i) / theta_count;
            csv.row(csv_row({fd(th), fd(k), fd(ff[i].real()), fd(ff[i].imag())}));
            mx = std::max(mx, std::abs(ff[i]));
        }
        kmax[format_double(k)] = mx;
    }
    write_json_summary(join(outdir, "farfield_summary.json"), meta,
                       {{"potential", f.potential_ref},
                        {"eps", eps},
                        {"taper", taper},
                        {"theta_count", theta_count},
                        {"max_abs_by_k", kmax}});
    std::cout << "farfield: " << ks.size() << " frequencies x " << theta_count
              << " directions written\n";
    return kExitOk;
}

// ---- report: aggregate whatever summaries exist into one page -------------

std::vector<std::vector<std::string>> read_csv_body(const std::string& path) {
    std::vector<std::vector<std::string>> rows;
    std::ifstream in(path);
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) { // column line
            header_seen = true;
            continue;
        }
        std::vector<std::string> cells;
        std::string cur;
        for (const char c : line) {
            if (c == ',') {
                cells.push_back(cur);
                cur.clear();
            } else {
                cur += c;
            }
        }
        cells.push_back(cur);
        rows.push_back(std::move(cells));
    }
    return rows;
}

int cmd_report(const Config& cfg, const std::string& outdir, int) {
    static const char* summaries[] = {
        "gen_summary.json",    "solve_summary.json",   "stability_summary.json",
        "carleman_summary.json", "ibp_summary.json",   "energy_summary.json",
        "recover_summary.json", "hs_summary.json",     "farfield_summary.json"};

    if (!fs::exists(outdir))
        throw ConfigError("report: output root '" + outdir + "' does not exist");

    std::ostringstream md;
    md << "# faslab report\n\n";
    int found = 0;
    for (const char* name : summaries) {
        const std::string path = join(outdir, name);
        if (!fs::exists(path)) continue;
        std::ifstream in(path);
        json doc;
        try {
            in >> doc;
        } catch (const std::exception&) {
            continue;
        }
        ++found;
        md << "## " << doc["meta"].value("command", name) << "\n\n";
        md << "- config hash: `" << doc["meta"].value("config_hash", "?") << "`\n";
        md << "- grid: " << doc["meta"].value("grid", "?") << "\n";
        for (const auto& [key, val] : doc["results"].items())
            md << "- " << key << ": " << val.dump() << "\n";
        md << "\n";
    }

    std::vector<std::string> charts;
    if (fs::exists(join(outdir, "hs_decay.csv"))) {
        ChartSeries s{"h(s)", {}};
        for (const auto& row : read_csv_body(join(outdir, "hs_decay.csv")))
            if (row.size() >= 2)
                s.points.push_back({std::strtod(row[0].c_str(), nullptr),
                                    std::strtod(row[1].c_str(), nullptr)});
        svg_line_chart(join(outdir, "hs_decay.svg"), "weighted window integral decay", "s",
                       "h(s)", {s}, true);
        charts.push_back("hs_decay.svg");
    }
    if (fs::exists(join(outdir, "carleman_summary.json"))) {
        std::ifstream in(join(outdir, "carleman_summary.json"));
        json doc;
        in >> doc;
        if (doc["results"].contains("s_values")) {
            ChartSeries s{"max ratio", {}};
            const auto& sv = doc["results"]["s_values"];
            const auto& mr = doc["results"]["max_ratio"];
            for (std::size_t i = 0; i < sv.size() && i < mr.size(); ++i)
                s.points.push_back({sv[i].get<double>(), mr[i].get<double>()});
            svg_line_chart(join(outdir, "carleman_ratios.svg"),
                           "weighted estimate: per-s max LHS/RHS", "s", "ratio", {s});
            charts.push_back("carleman_ratios.svg");
        }
    }
    if (fs::exists(join(outdir, "farfield.csv"))) {
        std::map<std::string, ChartSeries> by_k;
        for (const auto& row : read_csv_body(join(outdir, "farfield.csv")))
            if (row.size() >= 4) {
                auto& s = by_k[row[1]];
                if (s.label.empty()) s.label = "k=" + row[1];
                const double re = std::strtod(row[2].c_str(), nullptr);
                const double im = std::strtod(row[3].c_str(), nullptr);
                s.points.push_back(
                    {std::strtod(row[0].c_str(), nullptr), std::hypot(re, im)});
            }
        std::vector<ChartSeries> series;
        for (auto& [k, s] : by_k) series.push_back(std::move(s));
        svg_line_chart(join(outdir, "farfield_pattern.svg"), "far-field magnitude", "theta",
                       "|pattern|", series);
        charts.push_back("farfield_pattern.svg");
    }

    if (!charts.empty()) {
        md << "## charts\n\n";
        for (const std::string& c : charts) md << "- " << c << "\n";
        md << "\n";
    }
    if (found == 0) md << "No command summaries found in `" << outdir << "`.\n";

    const std::string md_path = join(outdir, "report.md");
    std::ofstream out(md_path);
    if (!out) throw std::runtime_error("cannot write '" + md_path + "'");
    out << md.str();

    const MetaInfo meta{"report", cfg.hash(), "aggregate"};
    write_json_summary(join(outdir, "report_summary.json"), meta,
                       {{"sections", found}, {"charts", charts}});
    std::cout << "report: " << found << " sections, " << charts.size() << " charts -> "
              << md_path << "\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"batch experiments for time-domain scattering, characteristic traces and "
                 "weighted estimates"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::string out_override;
    int jobs = 0;
    app.add_option("-c,--config", config_path, "key-value config file");
    app.add_option("-o,--out", out_override,
                   "output root (overrides FASLAB_OUT and output.dir)");
    app.add_option("-j,--jobs", jobs, "worker thread cap, 0 = all cores");

    using Command = int (*)(const Config&, const std::string&, int);
    struct Entry {
        const char* name;
        const char* help;
        Command fn;
        bool needs_config;
    };
    const Entry entries[] = {
        {"gen-potential", "draw a seeded potential ensemble and dump it as JSON",
         cmd_gen_potential, true},
        {"solve", "one scattering solve plus its settled characteristic trace",
         cmd_solve, true},
        {"stability", "ensemble of pairs: potential gap vs boundary-trace gap",
         cmd_stability, true},
        {"carleman-verify", "weighted-estimate sweep over a seeded suite and s grid",
         cmd_carleman_verify, true},
        {"ibp-check", "integration-by-parts identity residuals over a suite",
         cmd_ibp_check, true},
        {"energy-check", "top-slice and characteristic-base energy ratios",
         cmd_energy_check, true},
        {"recover-trace", "recover a potential gap from the settled trace",
         cmd_recover_trace, true},
        {"hs-decay", "decay of the weighted window integral in s", cmd_hs_decay, true},
        {"farfield", "solve, transform lateral data and emit far-field patterns",
         cmd_farfield, true},
        {"report", "aggregate existing summaries into report.md plus charts",
         cmd_report, false},
    };
    for (const Entry& e : entries) app.add_subcommand(e.name, e.help);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfig;
    }

    try {
        const std::string sub = app.get_subcommands().front()->get_name();
        const Entry* entry = nullptr;
        for (const Entry& e : entries)
            if (sub == e.name) entry = &e;
        if (entry == nullptr) throw ConfigError("unknown command '" + sub + "'");

        Config cfg;
        if (!config_path.empty()) {
            cfg = Config::from_file(config_path);
            cfg.check_keys(kKnownKeys);
        } else if (entry->needs_config) {
            throw ConfigError("command '" + sub + "' needs a config file (-c path)");
        }

        std::string outdir = out_override;
        if (outdir.empty())
            if (const char* env = std::getenv("FASLAB_OUT"); env != nullptr && *env != '\0')
                outdir = env;
        if (outdir.empty()) outdir = cfg.get_string("output.dir", "out");
        if (sub != "report") fs::create_directories(outdir);

        return entry->fn(cfg, outdir, jobs);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const NumericalCheckError& e) {
        std::cerr << "numerical check failed: " << e.what() << "\n";
        return kExitCheckFailed;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
}
