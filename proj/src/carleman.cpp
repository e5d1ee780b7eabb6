#include "fas/carleman.hpp"
#include "fas/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fas {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSqrt2 = 1.4142135623730951;

double spatial_dot(const Vec& a, const Vec& b, int n) {
    double r = 0.0;
    for (int i = 0; i < n; ++i) r += a[i] * b[i];
    return r;
}

double grad_dot(const Jet2& z, const Vec& g, int n) {
    double r = 0.0;
    for (int i = 0; i < n; ++i) r += z.d[static_cast<size_t>(i)] * g[static_cast<size_t>(i)];
    return r;
}

double grad_sq(const Jet2& z, int n) {
    double r = 0.0;
    for (int i = 0; i < n; ++i) r += z.d[static_cast<size_t>(i)] * z.d[static_cast<size_t>(i)];
    return r;
}

double lap_of(const Jet2& z, int n) {
    double r = 0.0;
    for (int i = 0; i < n; ++i) r += z.dd[static_cast<size_t>(i)][static_cast<size_t>(i)];
    return r;
}

double hess_phi_form(const WeightEval& e, const Vec& a, const Vec& b, int n) {
    double r = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            r += e.hess_phi[static_cast<size_t>(i)][static_cast<size_t>(j)] *
                 a[static_cast<size_t>(i)] * b[static_cast<size_t>(j)];
    return r;
}

// jet of the factor e^{-s phi(x, t)} assembled from the closed-form weight
Jet2 exp_weight_jet(const WeightEval& e, double s, int n) {
    Jet2 E;
    const double ev = std::exp(-s * e.phi);
    E.v = ev;
    for (int i = 0; i < n; ++i) E.d[static_cast<size_t>(i)] = -s * e.grad_phi[static_cast<size_t>(i)] * ev;
    E.d[3] = -s * e.phi_t * ev;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            E.dd[static_cast<size_t>(i)][static_cast<size_t>(j)] =
                (s * s * e.grad_phi[static_cast<size_t>(i)] * e.grad_phi[static_cast<size_t>(j)] -
                 s * e.hess_phi[static_cast<size_t>(i)][static_cast<size_t>(j)]) *
                ev;
    for (int i = 0; i < n; ++i) {
        const double m = (s * s * e.grad_phi[static_cast<size_t>(i)] * e.phi_t -
                          s * e.grad_phi_t[static_cast<size_t>(i)]) *
                         ev;
        E.dd[static_cast<size_t>(i)][3] = m;
        E.dd[3][static_cast<size_t>(i)] = m;
    }
    E.dd[3][3] = (s * s * e.phi_t * e.phi_t - s * e.phi_tt) * ev;
    return E;
}

// largest per-cell change of the log weight 2 s phi along any axis
double cell_log_variation(const WeightEval& e, double s, double h, double dt, int n) {
    double g = 0.0;
    for (int i = 0; i < n; ++i) g = std::max(g, std::abs(e.grad_phi[static_cast<size_t>(i)]) * h);
    g = std::max(g, std::abs(e.phi_t) * dt);
    return 2.0 * s * g;
}

} // namespace

double apply_P(const Jet2& v, int n) { return v.dd[3][3] - lap_of(v, n); }

double apply_Ps_plus(const Jet2& z, const WeightEval& e, double s, int n) {
    return z.dd[3][3] - lap_of(z, n) + s * s * e.G * z.v;
}

double apply_Ps_minus(const Jet2& z, const WeightEval& e, double s, int n) {
    return -2.0 * s * (z.d[3] * e.phi_t - grad_dot(z, e.grad_phi, n)) - s * e.wm * z.v;
}

ConjugatedField conjugate(const std::vector<double>& v, const SpaceTimeGrid& grid,
                          const CarlemanWeight& wt, double s) {
    const std::size_t nspace = grid.nspace();
    const std::size_t expect = nspace * static_cast<std::size_t>(grid.nt() + 1);
    if (v.size() != expect) throw ConfigError("conjugate: field size does not match the grid");
    ConjugatedField z;
    z.s = s;
    z.logmag.resize(v.size());
    z.sign.resize(v.size());
    for (int j = 0; j <= grid.nt(); ++j) {
        const double t = grid.tcoord(j);
        for (std::size_t p = 0; p < nspace; ++p) {
            const std::size_t k = static_cast<std::size_t>(j) * nspace + p;
            const double val = v[k];
            if (val == 0.0) {
                z.logmag[k] = -kInf;
                z.sign[k] = 0;
                continue;
            }
            z.logmag[k] = std::log(std::abs(val)) + s * wt.phi(grid.point(p), t);
            z.sign[k] = (val > 0.0) ? 1 : -1;
        }
    }
    return z;
}

std::vector<double> conjugate_back(const ConjugatedField& z, const SpaceTimeGrid& grid,
                                   const CarlemanWeight& wt) {
    const std::size_t nspace = grid.nspace();
    const std::size_t expect = nspace * static_cast<std::size_t>(grid.nt() + 1);
    if (z.logmag.size() != expect || z.sign.size() != expect)
        throw ConfigError("conjugate_back: field size does not match the grid");
    std::vector<double> v(z.logmag.size(), 0.0);
    for (int j = 0; j <= grid.nt(); ++j) {
        const double t = grid.tcoord(j);
        for (std::size_t p = 0; p < nspace; ++p) {
            const std::size_t k = static_cast<std::size_t>(j) * nspace + p;
            if (z.sign[k] == 0) continue;
            v[k] = z.sign[k] * std::exp(z.logmag[k] - z.s * wt.phi(grid.point(p), t));
        }
    }
    return v;
}

std::vector<double> materialize(const ConjugatedField& z, double offset) {
    std::vector<double> out(z.logmag.size(), 0.0);
    for (std::size_t k = 0; k < z.logmag.size(); ++k) {
        if (z.sign[k] == 0) continue;
        const double ex = z.logmag[k] - offset;
        if (ex > 709.0)
            throw NumericalCheckError("materialize: exponent " + std::to_string(ex) +
                                      " overflows after offsetting");
        out[k] = z.sign[k] * std::exp(ex);
    }
    return out;
}

ConjugationResidual conjugation_identity_check(const TestFunction& z, const CarlemanWeight& wt,
                                               double s, const SpaceTimeGrid& grid, int tstride) {
    if (tstride < 1) throw ConfigError("conjugation check: stride must be positive");
    const int n = grid.n();
    ConjugationResidual best;
    for (const std::size_t idx : grid.ball_nodes()) {
        const Vec x = grid.point(idx);
        const double xn = x[static_cast<size_t>(n - 1)];
        for (int j = 0; j <= grid.nt(); j += tstride) {
            const double t = grid.tcoord(j);
            if (t < xn) continue;
            const WeightEval e = wt.eval(x, t);
            const Jet2 zj = z.eval(x, t);

            const double plus = apply_Ps_plus(zj, e, s, n);
            const double minus = apply_Ps_minus(zj, e, s, n);
            const double rhs = plus + minus;

            const Jet2 w = exp_weight_jet(e, s, n) * zj;
            const double lhs = std::exp(s * e.phi) * apply_P(w, n);

            const double scale = std::abs(zj.dd[3][3]) + std::abs(lap_of(zj, n)) +
                                 2.0 * s *
                                     (std::abs(e.phi_t * zj.d[3]) +
                                      std::abs(grad_dot(zj, e.grad_phi, n))) +
                                 s * s * std::abs(e.G * zj.v) + s * std::abs(e.wm * zj.v) +
                                 1e-300;
            const double rel = std::abs(lhs - rhs) / scale;
            if (rel > best.max_rel) {
                best.max_rel = rel;
                best.argmax_x = x;
                best.argmax_t = t;
            }
        }
    }
    return best;
}

SideEntry carleman_sides(const TestFunction& v, const CarlemanWeight& wt, double s,
                         const SpaceTimeGrid& grid, const Potential* remark_potential,
                         double cell_ratio_limit) {
    if (!(s > 0.0)) throw ConfigError("carleman_sides: s must be positive");
    const int n = grid.n();
    const WeightParams& wp = wt.params();
    // max of 2 s phi over the closed cylinder: psi peaks on the cone at
    // x_n = -1, x' = 0 with value 5 (a + 1)^2
    const double offset = 2.0 * s * std::exp(wp.lambda * 5.0 * (wp.a + 1.0) * (wp.a + 1.0));
    const double log_limit = std::log(cell_ratio_limit);

    double lhs_acc = 0.0, vol_acc = 0.0, sigma_acc = 0.0, top_acc = 0.0;
    double max_cell_var = 0.0;

    auto energy = [&](const Jet2& zj) {
        return grad_sq(zj, n) + zj.d[3] * zj.d[3] + s * s * zj.v * zj.v;
    };

    for (const std::size_t idx : grid.ball_nodes()) {
        const Vec x = grid.point(idx);
        const double wB = grid.ball_weight(idx);
        const double xn = x[static_cast<size_t>(n - 1)];
        for (int j = 0; j <= grid.nt(); ++j) {
            const double tw = grid.time_weight(xn, j);
            if (tw == 0.0) continue;
            const double t = grid.tcoord(j);
            const WeightEval e = wt.eval(x, t);
            const Jet2 zj = v.eval(x, t);
            const double wgt = std::exp(2.0 * s * e.phi - offset);
            const double w = wB * tw * wgt;
            lhs_acc += w * energy(zj);
            double pv = apply_P(zj, n);
            if (remark_potential != nullptr) pv += remark_potential->value(x) * zj.v;
            vol_acc += w * pv * pv;
            max_cell_var = std::max(max_cell_var, cell_log_variation(e, s, grid.h(), grid.dt(), n));
        }
        // top slice shares the spatial lattice
        const WeightEval eT = wt.eval(x, grid.T());
        const Jet2 zT = v.eval(x, grid.T());
        top_acc += wB * std::exp(2.0 * s * eT.phi - offset) * energy(zT);
    }

    for (const SphereSample& sp : grid.sphere_samples()) {
        const double xn = sp.x[static_cast<size_t>(n - 1)];
        for (int j = 0; j <= grid.nt(); ++j) {
            const double tw = grid.time_weight(xn, j);
            if (tw == 0.0) continue;
            const double t = grid.tcoord(j);
            const WeightEval e = wt.eval(sp.x, t);
            const Jet2 zj = v.eval(sp.x, t);
            sigma_acc += sp.weight * tw * std::exp(2.0 * s * e.phi - offset) * energy(zj);
        }
    }

    SideEntry out;
    out.offset = offset;
    out.under_resolved = max_cell_var > log_limit;

    const double lhs = s * lhs_acc;
    const double rhs_vol = vol_acc;
    const double rhs_sigma = s * sigma_acc;
    const double rhs_top = s * top_acc;
    const double rhs = rhs_vol + rhs_sigma + rhs_top;

    out.log_lhs = std::log(lhs);
    out.log_rhs_volume = std::log(rhs_vol);
    out.log_rhs_sigma = std::log(rhs_sigma);
    out.log_rhs_top = std::log(rhs_top);

    if (lhs == 0.0 && rhs == 0.0) {
        out.all_zero = true;
        out.ratio = 0.0;
        return out;
    }
    if (rhs == 0.0)
        throw NumericalCheckError(
            "carleman_sides: zero right side with positive left side (estimate violation)");
    out.ratio = lhs / rhs;
    return out;
}

SweepReport carleman_sweep(const std::vector<TestFunction>& suite, const CarlemanWeight& wt,
                           const std::vector<double>& s_values, const SpaceTimeGrid& grid,
                           const Potential* remark_potential, int jobs) {
    if (s_values.empty()) throw ConfigError("carleman_sweep: empty s list");
    for (std::size_t i = 1; i < s_values.size(); ++i)
        if (!(s_values[i] > s_values[i - 1]))
            throw ConfigError("carleman_sweep: s values must be strictly increasing");

    SweepReport rep;
    rep.s_values = s_values;
    rep.max_ratio.assign(s_values.size(), 0.0);
    rep.rows.resize(suite.size() * s_values.size());

    parallel_rows(rep.rows.size(), jobs, [&](std::size_t r) {
        const std::size_t fi = r / s_values.size();
        const std::size_t si = r % s_values.size();
        SweepRow& row = rep.rows[r];
        row.fn_index = static_cast<int>(fi);
        row.s = s_values[si];
        row.entry = carleman_sides(suite[fi], wt, row.s, grid, remark_potential);
    });

    bool any = false;
    for (const SweepRow& row : rep.rows) {
        if (row.entry.under_resolved) rep.under_resolved = true;
        if (row.entry.all_zero) continue;
        any = true;
        const std::size_t si =
            static_cast<std::size_t>(std::find(s_values.begin(), s_values.end(), row.s) -
                                     s_values.begin());
        rep.max_ratio[si] = std::max(rep.max_ratio[si], row.entry.ratio);
    }
    rep.empty = !any;
    if (any) {
        double lo = kInf, hi = 0.0;
        for (const double m : rep.max_ratio) {
            if (m <= 0.0) continue;
            lo = std::min(lo, m);
            hi = std::max(hi, m);
        }
        rep.c_emp = hi;
        rep.spread = (lo > 0.0 && lo < kInf) ? hi / lo : 0.0;
    }
    return rep;
}

namespace {

// shared accumulation for ibp_identity_check and j_terms
struct IbpAccum {
    double lhs = 0.0;
    double j1 = 0.0, j2 = 0.0, j3 = 0.0;
    double j2_main = 0.0, j2_cross = 0.0, j2_bsq = 0.0;
    double b0 = 0.0;
    double d0c = 0.0, d0p = 0.0;
    double b_min = kInf, b_max = -kInf, b_wsum = 0.0, volume = 0.0, qeta = 0.0;
    double j3_c = 0.0, j3_int = 0.0;
    bool under = false;
};

IbpAccum accumulate_ibp(const TestFunction& z, const CarlemanWeight& wt, double s,
                        const SpaceTimeGrid& grid, double eta, double cell_ratio_limit) {
    const int n = grid.n();
    const double lambda = wt.params().lambda;
    IbpAccum a;
    double max_cell_var = 0.0;

    for (const std::size_t idx : grid.ball_nodes()) {
        const Vec x = grid.point(idx);
        const double wB = grid.ball_weight(idx);
        const double xn = x[static_cast<size_t>(n - 1)];

        // volume terms over Q
        for (int j = 0; j <= grid.nt(); ++j) {
            const double tw = grid.time_weight(xn, j);
            if (tw == 0.0) continue;
            const double t = grid.tcoord(j);
            const WeightEval e = wt.eval(x, t);
            const Jet2 zj = z.eval(x, t);
            const double w = wB * tw;
            const double zv = zj.v, zp = zj.d[3];
            const double z2 = zv * zv;

            a.lhs += w * apply_Ps_plus(zj, e, s, n) * apply_Ps_minus(zj, e, s, n);

            Vec gz{};
            for (int i = 0; i < n; ++i) gz[static_cast<size_t>(i)] = zj.d[static_cast<size_t>(i)];
            a.j1 += w * 2.0 * s *
                    (e.phi_tt * zp * zp - 2.0 * zp * spatial_dot(gz, e.grad_phi_t, n) +
                     hess_phi_form(e, gz, gz, n));
            a.j2 += w * 2.0 * s * s * s * z2 *
                    (e.phi_t * e.phi_t * e.phi_tt + hess_phi_form(e, e.grad_phi, e.grad_phi, n) -
                     2.0 * e.phi_t * spatial_dot(e.grad_phi, e.grad_phi_t, n));
            a.j3 += w * (-0.5) * s * z2 * e.box2;

            // psi-level split of the J2 integrand
            const double slp = s * lambda * e.phi;
            const double slp3 = slp * slp * slp;
            double hpsi_gg = 0.0;
            for (int i = 0; i < n; ++i)
                hpsi_gg += e.hess_psi_diag[static_cast<size_t>(i)] *
                           e.grad_psi[static_cast<size_t>(i)] * e.grad_psi[static_cast<size_t>(i)];
            a.j2_main += w * 2.0 * slp3 * z2 * (e.psi_tt * e.psi_t * e.psi_t + hpsi_gg);
            a.j2_cross += w * 2.0 * slp3 * z2 *
                          (-2.0 * e.psi_t * spatial_dot(e.grad_psi, e.grad_psi_t, n));
            a.j2_bsq += w * 2.0 * lambda * slp3 * z2 * e.b * e.b;

            // b statistics and the residual-set measure
            a.b_min = std::min(a.b_min, e.b);
            a.b_max = std::max(a.b_max, e.b);
            a.b_wsum += w * e.b;
            a.volume += w;
            double gpsi2 = 0.0;
            for (int i = 0; i < n; ++i)
                gpsi2 += e.grad_psi[static_cast<size_t>(i)] * e.grad_psi[static_cast<size_t>(i)];
            if (std::abs(e.b) <= eta * gpsi2) a.qeta += w;

            a.j3_c = std::max(a.j3_c, std::abs(0.5 * s * e.box2) / (lambda * slp * slp));
            a.j3_int += w * slp * slp * z2;

            max_cell_var = std::max(max_cell_var, cell_log_variation(e, s, grid.h(), grid.dt(), n));
        }

        // top slice {t = T}
        {
            const WeightEval e = wt.eval(x, grid.T());
            const Jet2 zj = z.eval(x, grid.T());
            const double zv = zj.v, zp = zj.d[3];
            Vec gz{};
            for (int i = 0; i < n; ++i) gz[static_cast<size_t>(i)] = zj.d[static_cast<size_t>(i)];
            const double gzphi = spatial_dot(gz, e.grad_phi, n);
            const double gz2 = grad_sq(zj, n);
            const double common = 2.0 * s * zp * gzphi - s * zp * e.wm * zv +
                                  0.5 * s * zv * zv * e.wm_t - s * gz2 * e.phi_t -
                                  s * s * s * e.G * e.phi_t * zv * zv;
            a.d0c += wB * (common - s * zp * zp * e.phi_t);
            a.d0p += wB * (common - (s / kSqrt2) * zp * zp * e.phi_t);
        }

        // characteristic base {t = x_n}; every printed term carries 1/sqrt(2)
        // against the sqrt(2) dS measure, so nodes contribute with plain wB
        {
            const WeightEval e = wt.eval(x, xn);
            const Jet2 zj = z.eval(x, xn);
            const double zv = zj.v, zp = zj.d[3];
            const double zn = zj.d[static_cast<size_t>(n - 1)];
            Vec gz{};
            for (int i = 0; i < n; ++i) gz[static_cast<size_t>(i)] = zj.d[static_cast<size_t>(i)];
            const double gzphi = spatial_dot(gz, e.grad_phi, n);
            const double gz2 = grad_sq(zj, n);
            const double phin = e.grad_phi[static_cast<size_t>(n - 1)];
            const double wmn = e.grad_wm[static_cast<size_t>(n - 1)];
            const double common =
                s * zp * zp * e.phi_t - 2.0 * s * zp * gzphi - s * zp * zp * phin +
                s * zp * e.wm * zv - 0.5 * s * zv * zv * e.wm_t + 2.0 * s * zn * zp * e.phi_t -
                2.0 * s * zn * gzphi + s * gz2 * e.phi_t + s * zn * e.wm * zv -
                0.5 * s * zv * zv * wmn + s * s * s * e.G * e.phi_t * zv * zv +
                s * s * s * e.G * phin * zv * zv;
            // corrected transcription: + s |grad z|^2 d_n phi on the base
            a.d0c += wB * (common + s * gz2 * phin);
            // as published: the |z'|^2 phi' base term lacks its 1/sqrt(2) and
            // the gradient-square term appears as - z_n |phi|^2
            a.d0p += wB * (common + (kSqrt2 - 1.0) * s * zp * zp * e.phi_t -
                           s * zn * e.phi * e.phi);
        }
    }

    // lateral boundary
    for (const SphereSample& sp : grid.sphere_samples()) {
        const double xn = sp.x[static_cast<size_t>(n - 1)];
        for (int j = 0; j <= grid.nt(); ++j) {
            const double tw = grid.time_weight(xn, j);
            if (tw == 0.0) continue;
            const double t = grid.tcoord(j);
            const WeightEval e = wt.eval(sp.x, t);
            const Jet2 zj = z.eval(sp.x, t);
            const double zv = zj.v, zp = zj.d[3];
            Vec gz{};
            for (int i = 0; i < n; ++i) gz[static_cast<size_t>(i)] = zj.d[static_cast<size_t>(i)];
            const double dnu_z = spatial_dot(gz, sp.nu, n);
            const double dnu_phi = spatial_dot(e.grad_phi, sp.nu, n);
            const double dnu_wm = spatial_dot(e.grad_wm, sp.nu, n);
            const double gzphi = spatial_dot(gz, e.grad_phi, n);
            a.b0 += sp.weight * tw * s *
                    (dnu_phi * grad_sq(zj, n) - 2.0 * gzphi * dnu_z + 2.0 * e.phi_t * zp * dnu_z -
                     zp * zp * dnu_phi + zv * dnu_z * e.wm + s * s * dnu_phi * zv * zv * e.G -
                     0.5 * zv * zv * dnu_wm);
        }
    }

    a.under = max_cell_var > std::log(cell_ratio_limit);
    return a;
}

} // namespace

IbpReport ibp_identity_check(const TestFunction& z, const CarlemanWeight& wt, double s,
                             const SpaceTimeGrid& grid) {
    const IbpAccum a = accumulate_ibp(z, wt, s, grid, 0.25, 10.0);
    IbpReport r;
    r.lhs = a.lhs;
    r.j1 = a.j1;
    r.j2 = a.j2;
    r.j3 = a.j3;
    r.b0 = a.b0;
    r.d0 = a.d0c;
    r.d0_printed = a.d0p;
    const double scale =
        std::abs(a.j1) + std::abs(a.j2) + std::abs(a.j3) + std::abs(a.b0) + std::abs(a.d0c);
    r.floor_used = 1e-300 + 1e-15 * scale;
    const double rhs = a.j1 + a.j2 + a.j3 + a.b0 + a.d0c;
    const double rhs_p = a.j1 + a.j2 + a.j3 + a.b0 + a.d0p;
    r.residual = std::abs(a.lhs - rhs) / (std::abs(a.lhs) + std::abs(rhs) + r.floor_used);
    r.residual_printed =
        std::abs(a.lhs - rhs_p) / (std::abs(a.lhs) + std::abs(rhs_p) + r.floor_used);
    r.under_resolved = a.under;
    return r;
}

JTermsReport j_terms(const TestFunction& z, const CarlemanWeight& wt, double s,
                     const SpaceTimeGrid& grid, double eta) {
    if (!(eta > 0.0)) throw ConfigError("j_terms: eta must be positive");
    const IbpAccum a = accumulate_ibp(z, wt, s, grid, eta, 10.0);
    JTermsReport r;
    r.j1 = a.j1;
    r.j2 = a.j2;
    r.j3 = a.j3;
    r.j2_curvature = a.j2_main;
    r.j2_cross = a.j2_cross;
    r.j2_bsquare = a.j2_bsq;
    r.b_min = a.b_min;
    r.b_max = a.b_max;
    r.b_mean = (a.volume > 0.0) ? a.b_wsum / a.volume : 0.0;
    r.q_eta_fraction = (a.volume > 0.0) ? a.qeta / a.volume : 0.0;
    r.j3_c = a.j3_c;
    r.j3_bound_rhs = a.j3_c * wt.params().lambda * a.j3_int;
    r.j3_bound_holds = std::abs(a.j3) <= r.j3_bound_rhs * (1.0 + 1e-12);
    return r;
}

EnergyReport energy_check_T(const TestFunction& v, const SpaceTimeGrid& grid, double tau) {
    if (!(tau > 1.0) || tau > grid.T() + 1e-12)
        throw ConfigError("energy_check_T: need 1 < tau <= T");
    const int n = grid.n();
    auto en = [&](const Vec& x, double t) {
        const Jet2 j = v.eval(x, t);
        return grad_sq(j, n) + j.d[3] * j.d[3] + j.v * j.v;
    };
    auto pv2 = [&](const Vec& x, double t) {
        const Jet2 j = v.eval(x, t);
        const double p = apply_P(j, n);
        return p * p;
    };
    EnergyReport r;
    r.lhs = grid.quad_Bslice(en, tau);
    r.rhs = grid.quad_Gamma(en) + grid.quad_Q(pv2) + grid.quad_Sigma(en);
    if (r.lhs == 0.0 && r.rhs == 0.0) {
        r.zero = true;
        return r;
    }
    if (r.rhs == 0.0)
        throw NumericalCheckError("energy_check_T: zero right side with nonzero left side");
    r.ratio = r.lhs / r.rhs;
    return r;
}

EnergyReport energy_check_char(const TestFunction& v, const CarlemanWeight& wt, double s,
                               const SpaceTimeGrid& grid) {
    if (!(s > 0.0)) throw ConfigError("energy_check_char: s must be positive");
    const int n = grid.n();
    const WeightParams& wp = wt.params();
    const double offset = 2.0 * s * std::exp(wp.lambda * 5.0 * (wp.a + 1.0) * (wp.a + 1.0));
    auto wgt = [&](const Vec& x, double t) { return std::exp(2.0 * s * wt.phi(x, t) - offset); };

    auto en3 = [&](const Vec& x, double t) {
        const Jet2 j = v.eval(x, t);
        return wgt(x, t) * (grad_sq(j, n) + j.d[3] * j.d[3] + s * s * j.v * j.v);
    };
    auto pv2 = [&](const Vec& x, double t) {
        const Jet2 j = v.eval(x, t);
        const double p = apply_P(j, n);
        return wgt(x, t) * p * p;
    };
    auto en_sigma = [&](const Vec& x, double t) {
        const Jet2 j = v.eval(x, t);
        return wgt(x, t) * (grad_sq(j, n) + s * s * j.v * j.v);
    };
    auto dnu2 = [&](const Vec& x, double t) {
        const Jet2 j = v.eval(x, t);
        Vec g{};
        for (int i = 0; i < n; ++i) g[static_cast<size_t>(i)] = j.d[static_cast<size_t>(i)];
        const double d = spatial_dot(g, x, n); // sphere normal is x itself
        return wgt(x, t) * d * d;
    };

    EnergyReport r;
    r.lhs = grid.quad_Gamma(en3);
    r.rhs = s * grid.quad_Q(en3) + grid.quad_Q(pv2) + s * grid.quad_Sigma(en_sigma) +
            grid.quad_Sigma(dnu2);
    if (r.lhs == 0.0 && r.rhs == 0.0) {
        r.zero = true;
        return r;
    }
    if (r.rhs == 0.0)
        throw NumericalCheckError("energy_check_char: zero right side with nonzero left side");
    r.ratio = r.lhs / r.rhs;
    return r;
}

} // namespace fas
