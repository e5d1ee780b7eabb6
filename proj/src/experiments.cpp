#include "fas/experiments.hpp"
#include "fas/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace fas {

namespace {

Potential difference_potential(const Potential& a, const Potential& b, int n) {
    std::vector<Bump> bumps = a.bumps();
    for (Bump bb : b.bumps()) {
        bb.amp = -bb.amp;
        bumps.push_back(bb);
    }
    return make_potential(bumps, n);
}

double max_abs_of(const std::vector<double>& v) {
    double m = 0.0;
    for (const double x : v) m = std::max(m, std::abs(x));
    return m;
}

double trace_max_abs(const BoundaryTrace& tr) {
    double m = 0.0;
    for (const auto* arr : {&tr.s_w, &tr.s_wt, &tr.s_grad, &tr.g_w, &tr.g_wt, &tr.g_grad,
                            &tr.t_w, &tr.t_wt, &tr.t_grad})
        m = std::max(m, max_abs_of(*arr));
    return m;
}

} // namespace

std::vector<std::pair<Potential, Potential>> make_pairs(const EnsembleSpec& spec, int count,
                                                        int n) {
    if (count < 1) throw ConfigError("make_pairs: pair count must be positive");
    EnsembleSpec doubled = spec;
    doubled.count = 2 * count;
    std::vector<Potential> pool = gen_ensemble(doubled, n);
    std::vector<std::pair<Potential, Potential>> pairs;
    pairs.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i)
        pairs.emplace_back(pool[static_cast<std::size_t>(2 * i)],
                           pool[static_cast<std::size_t>(2 * i + 1)]);
    return pairs;
}

StabilityReport run_stability(const std::vector<std::pair<Potential, Potential>>& pairs,
                              const SpaceTimeGrid& grid, double eps, double sponge_strength,
                              std::uint64_t seed, int jobs) {
    if (!(grid.T() > 6.0))
        throw ConfigError("run_stability: window must extend past T = 6");

    StabilityReport rep;
    rep.n = grid.n();
    rep.h = grid.h();
    rep.T = grid.T();
    rep.eps = eps;
    rep.seed = seed;
    rep.pairs.resize(pairs.size());

    // potential gaps first: cheap, and they decide which pairs get solves
    double scale = 0.0;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        PairRecord& rec = rep.pairs[i];
        rec.id1 = static_cast<int>(2 * i);
        rec.id2 = static_cast<int>(2 * i + 1);
        rec.dv_norm =
            l2_norm_B(difference_potential(pairs[i].first, pairs[i].second, grid.n()), grid);
        scale = std::max(scale, rec.dv_norm);
    }
    for (PairRecord& rec : rep.pairs)
        if (rec.dv_norm <= 1e-3 * scale) {
            rec.skipped = true;
            rec.skip_reason = "potential gap below 1e-3 of the batch scale";
        }

    parallel_rows(pairs.size(), jobs, [&](std::size_t i) {
        PairRecord& rec = rep.pairs[i];
        if (rec.skipped) return;
        const WaveField f1 = solve_scattered(pairs[i].first, grid, eps, sponge_strength);
        const WaveField f2 = solve_scattered(pairs[i].second, grid, eps, sponge_strength);
        const BoundaryTrace diff =
            trace_difference(boundary_trace(f1, grid), boundary_trace(f2, grid));
        rec.trace_norm = h1_sigma_norm(diff, grid);
        if (rec.trace_norm <= 1e-12) {
            rec.skipped = true;
            rec.skip_reason = "difference trace at the solver floor";
            return;
        }
        rec.ratio = rec.dv_norm / rec.trace_norm;
    });

    double lo = 0.0, hi = 0.0;
    for (const PairRecord& rec : rep.pairs) {
        if (rec.skipped) continue;
        ++rep.retained;
        if (rep.retained == 1) {
            lo = hi = rec.ratio;
        } else {
            lo = std::min(lo, rec.ratio);
            hi = std::max(hi, rec.ratio);
        }
    }
    rep.c_emp = hi;
    rep.spread = (rep.retained > 0 && lo > 0.0) ? hi / lo : 0.0;
    return rep;
}

RecoveryRecord run_trace_recovery(const Potential& V1, const Potential& V2,
                                  const SpaceTimeGrid& grid, double eps, double offset,
                                  double sponge_strength) {
    const WaveField f1 = solve_scattered(V1, grid, eps, sponge_strength);
    const WaveField f2 = solve_scattered(V2, grid, eps, sponge_strength);
    const CharTrace t1 = characteristic_trace(f1, grid, offset);
    const CharTrace t2 = characteristic_trace(f2, grid, offset);

    const int n = grid.n();
    const std::size_t ns = grid.nspace();
    RecoveryRecord rec;
    rec.offset = offset;
    rec.eps = eps;
    rec.dv_rec.assign(ns, 0.0);
    rec.dv_alt.assign(ns, 0.0);
    rec.valid.assign(ns, 0);
    rec.valid_alt.assign(ns, 0);

    const Potential dv = difference_potential(V1, V2, n);
    double num = 0.0, den = 0.0;
    for (const std::size_t p : grid.ball_nodes()) {
        if (t1.past_T[p]) continue;
        rec.valid[p] = 1;
        rec.dv_rec[p] = -2.0 * ((t1.w_xn[p] - t2.w_xn[p]) + (t1.w_t[p] - t2.w_t[p]));
        const double want = dv.value(grid.point(p));
        const double wB = grid.ball_weight(p);
        num += wB * (rec.dv_rec[p] - want) * (rec.dv_rec[p] - want);
        den += wB * want * want;
    }
    rec.absolute_mode = (den == 0.0);
    rec.rel_l2 = rec.absolute_mode ? std::sqrt(num) : std::sqrt(num / den);

    // alternative path: total x_n-derivative of the traced values themselves
    std::size_t stride = 1;
    for (int k = 0; k < n - 1; ++k) stride *= static_cast<std::size_t>(grid.nx());
    double anum = 0.0, aden = 0.0;
    for (const std::size_t p : grid.ball_nodes()) {
        if (!rec.valid[p]) continue;
        const std::size_t up = p + stride, dn = p - stride;
        if (!rec.valid[up] || !rec.valid[dn]) continue;
        const double gu = t1.w[up] - t2.w[up];
        const double gd = t1.w[dn] - t2.w[dn];
        rec.dv_alt[p] = -2.0 * (gu - gd) / (2.0 * grid.h());
        rec.valid_alt[p] = 1;
        anum += (rec.dv_alt[p] - rec.dv_rec[p]) * (rec.dv_alt[p] - rec.dv_rec[p]);
        aden += rec.dv_rec[p] * rec.dv_rec[p];
    }
    rec.alt_gap = (aden > 0.0) ? std::sqrt(anum / aden) : 0.0;
    return rec;
}

UniquenessRecord run_uniqueness_sanity(const Potential& V, const SpaceTimeGrid& grid, double eps,
                                       double sponge_strength) {
    const WaveField fa = solve_scattered(V, grid, eps, sponge_strength);
    const WaveField fb = solve_scattered(V, grid, eps, sponge_strength);
    const BoundaryTrace ta = boundary_trace(fa, grid);
    const BoundaryTrace tb = boundary_trace(fb, grid);

    UniquenessRecord rec;
    rec.amplitude = trace_max_abs(ta);
    rec.repeat_gap = trace_max_abs(trace_difference(ta, tb));
    rec.deterministic = rec.repeat_gap <= 1e-12 * std::max(rec.amplitude, 1.0);
    if (!rec.deterministic)
        throw NumericalCheckError(
            "run_uniqueness_sanity: repeated solve produced different traces");

    const WaveField fc = solve_scattered(V, grid, 2.0 * eps, sponge_strength);
    const double base = h1_sigma_norm(ta, grid);
    if (base > 0.0) {
        const BoundaryTrace gap = trace_difference(ta, boundary_trace(fc, grid));
        rec.eps_sensitivity = h1_sigma_norm(gap, grid) / base;
    }
    return rec;
}

} // namespace fas
