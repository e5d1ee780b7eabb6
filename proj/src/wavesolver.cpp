#include "fas/wavesolver.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace fas {

namespace {

// Per-axis quadratic ramp from 0 at the inner edge of the damping layer to
// `strength` at the box face.
std::vector<double> damping_field(const SpaceTimeGrid& g, double strength) {
    const int n = g.n();
    std::vector<double> sigma(g.nspace(), 0.0);
    const double inner = g.L() - g.sponge_width();
    for (std::size_t p = 0; p < g.nspace(); ++p) {
        const Vec x = g.point(p);
        double r = 0.0;
        for (int i = 0; i < n; ++i) {
            const double d = (std::abs(x[static_cast<size_t>(i)]) - inner) / g.sponge_width();
            r = std::max(r, std::clamp(d, 0.0, 1.0));
        }
        sigma[p] = strength * r * r;
    }
    return sigma;
}

void check_cfl(const SpaceTimeGrid& g) {
    const double limit = g.h() / std::sqrt(static_cast<double>(g.n()));
    if (g.dt() > limit * 0.999)
        throw ConfigError("wave solve: dt violates the CFL bound dt <= h / sqrt(n)");
}

// Damped leapfrog over the full window. add_source(j, S) accumulates the
// source at level j into S (S arrives zeroed). init0/init1 are the first two
// levels (null means zero data). Returns the full level-major field.
std::vector<double> integrate(const SpaceTimeGrid& g, const std::vector<double>& sigma,
                              const std::vector<double>& Vg,
                              const std::function<void(int, std::vector<double>&)>& add_source,
                              const std::vector<double>* init0,
                              const std::vector<double>* init1) {
    const int n = g.n();
    const int nx = g.nx();
    const std::size_t ns = g.nspace();
    const double dt = g.dt(), h = g.h();
    const double c = dt * dt / (h * h);

    std::vector<double> field(static_cast<std::size_t>(g.nt() + 1) * ns, 0.0);
    if (init0 != nullptr) std::copy(init0->begin(), init0->end(), field.begin());
    if (init1 != nullptr) std::copy(init1->begin(), init1->end(), field.begin() + ns);

    std::vector<double> S(ns, 0.0);
    for (int j = 1; j < g.nt(); ++j) {
        const double* prev = field.data() + static_cast<std::size_t>(j - 1) * ns;
        const double* cur = field.data() + static_cast<std::size_t>(j) * ns;
        double* next = field.data() + static_cast<std::size_t>(j + 1) * ns;

        std::fill(S.begin(), S.end(), 0.0);
        add_source(j, S);

        if (n == 2) {
            for (int i1 = 1; i1 < nx - 1; ++i1) {
                const std::size_t row = static_cast<std::size_t>(i1) * nx;
                for (int i0 = 1; i0 < nx - 1; ++i0) {
                    const std::size_t p = row + static_cast<std::size_t>(i0);
                    const double lap = cur[p - 1] + cur[p + 1] + cur[p - nx] + cur[p + nx] -
                                       4.0 * cur[p];
                    const double rhs = 2.0 * cur[p] - (1.0 - 0.5 * sigma[p] * dt) * prev[p] +
                                       c * lap + dt * dt * (S[p] - Vg[p] * cur[p]);
                    next[p] = rhs / (1.0 + 0.5 * sigma[p] * dt);
                }
            }
        } else {
            const std::size_t nxx = static_cast<std::size_t>(nx) * nx;
            for (int i2 = 1; i2 < nx - 1; ++i2)
                for (int i1 = 1; i1 < nx - 1; ++i1) {
                    const std::size_t row = nxx * static_cast<std::size_t>(i2) +
                                            static_cast<std::size_t>(i1) * nx;
                    for (int i0 = 1; i0 < nx - 1; ++i0) {
                        const std::size_t p = row + static_cast<std::size_t>(i0);
                        const double lap = cur[p - 1] + cur[p + 1] + cur[p - nx] + cur[p + nx] +
                                           cur[p - nxx] + cur[p + nxx] - 6.0 * cur[p];
                        const double rhs = 2.0 * cur[p] - (1.0 - 0.5 * sigma[p] * dt) * prev[p] +
                                           c * lap + dt * dt * (S[p] - Vg[p] * cur[p]);
                        next[p] = rhs / (1.0 + 0.5 * sigma[p] * dt);
                    }
                }
        }
    }
    return field;
}

std::vector<double> sample_potential(const Potential& V, const SpaceTimeGrid& g) {
    std::vector<double> Vg(g.nspace(), 0.0);
    if (V.is_zero()) return Vg;
    for (std::size_t p = 0; p < g.nspace(); ++p) Vg[p] = V.value(g.point(p));
    return Vg;
}

// centered first differences at an interior-lattice node, one-sided at the
// box faces (trace consumers stay at least half a unit away from them)
double diff_space(const double* level, const SpaceTimeGrid& g, std::size_t p, int axis) {
    const int nx = g.nx();
    std::size_t stride = 1;
    for (int k = 0; k < axis; ++k) stride *= static_cast<std::size_t>(nx);
    int idx = static_cast<int>((p / stride) % static_cast<std::size_t>(nx));
    if (idx > 0 && idx < nx - 1) return (level[p + stride] - level[p - stride]) / (2.0 * g.h());
    if (idx == 0) return (-3.0 * level[p] + 4.0 * level[p + stride] - level[p + 2 * stride]) /
                         (2.0 * g.h());
    return (3.0 * level[p] - 4.0 * level[p - stride] + level[p - 2 * stride]) / (2.0 * g.h());
}

double diff_time(const std::vector<double>& u, const SpaceTimeGrid& g, std::size_t p, int j) {
    const std::size_t ns = g.nspace();
    auto at = [&](int lev) { return u[static_cast<std::size_t>(lev) * ns + p]; };
    if (j > 0 && j < g.nt()) return (at(j + 1) - at(j - 1)) / (2.0 * g.dt());
    if (j == 0) return (-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2.0 * g.dt());
    return (3.0 * at(j) - 4.0 * at(j - 1) + at(j - 2)) / (2.0 * g.dt());
}

} // namespace

WaveField solve_scattered(const Potential& V, const SpaceTimeGrid& grid, double eps,
                          double sponge_strength, double source_scale) {
    if (!(eps >= 2.0 * grid.dt()))
        throw ConfigError("solve_scattered: pulse width eps must be at least 2 dt");
    if (grid.t0() > -1.0 - 5.0 * eps + 1e-12)
        throw ConfigError("solve_scattered: window must start at t0 <= -1 - 5 eps");
    check_cfl(grid);

    const std::vector<double> Vg = sample_potential(V, grid);
    const std::vector<double> sigma = damping_field(grid, sponge_strength);

    WaveField out;
    out.eps = eps;
    out.potential_ref =
        V.is_zero() ? "zero" : ("bumps:" + std::to_string(V.bumps().size()));

    if (V.is_zero()) {
        // source never fires; the zero field is exact
        out.u.assign(static_cast<std::size_t>(grid.nt() + 1) * grid.nspace(), 0.0);
        return out;
    }

    // unit-mass Gaussian pulse; x_n takes only nx distinct values per level
    const int n = grid.n();
    const int nx = grid.nx();
    const double norm = source_scale / (eps * std::sqrt(2.0 * M_PI));
    std::vector<double> pulse_by_xn(static_cast<std::size_t>(nx), 0.0);
    std::size_t xn_stride = 1;
    for (int k = 0; k < n - 1; ++k) xn_stride *= static_cast<std::size_t>(nx);

    auto add_source = [&](int j, std::vector<double>& S) {
        const double t = grid.tcoord(j);
        for (int i = 0; i < nx; ++i) {
            const double tau = (t - grid.xcoord(i)) / eps;
            pulse_by_xn[static_cast<std::size_t>(i)] = norm * std::exp(-0.5 * tau * tau);
        }
        for (std::size_t p = 0; p < grid.nspace(); ++p) {
            if (Vg[p] == 0.0) continue;
            const std::size_t ixn = (p / xn_stride) % static_cast<std::size_t>(nx);
            S[p] = -Vg[p] * pulse_by_xn[ixn];
        }
    };

    out.u = integrate(grid, sigma, Vg, add_source, nullptr, nullptr);
    return out;
}

CharTrace characteristic_trace(const WaveField& f, const SpaceTimeGrid& grid, double offset) {
    if (!(offset >= 4.0))
        throw ConfigError("characteristic_trace: offset must be at least 4 eps units");
    if (f.u.size() != static_cast<std::size_t>(grid.nt() + 1) * grid.nspace())
        throw ConfigError("characteristic_trace: field does not match the grid");

    const int n = grid.n();
    const std::size_t ns = grid.nspace();
    CharTrace tr;
    tr.offset = offset;
    tr.w.assign(ns, 0.0);
    tr.w_t.assign(ns, 0.0);
    tr.w_xn.assign(ns, 0.0);
    tr.past_T.assign(ns, 0);

    for (const std::size_t p : grid.ball_nodes()) {
        const double xn = grid.point(p)[static_cast<size_t>(n - 1)];
        const double ts = xn + offset * f.eps;
        if (ts > grid.T()) {
            tr.past_T[p] = 1;
            continue;
        }
        const double pos = (ts - grid.t0()) / grid.dt();
        const int j = std::min(static_cast<int>(pos), grid.nt() - 1);
        const double th = pos - j;
        auto lev = [&](int lv) { return f.u.data() + static_cast<std::size_t>(lv) * ns; };
        tr.w[p] = (1.0 - th) * lev(j)[p] + th * lev(j + 1)[p];
        tr.w_t[p] = (1.0 - th) * diff_time(f.u, grid, p, j) + th * diff_time(f.u, grid, p, j + 1);
        tr.w_xn[p] = (1.0 - th) * diff_space(lev(j), grid, p, n - 1) +
                     th * diff_space(lev(j + 1), grid, p, n - 1);
    }
    return tr;
}

BoundaryTrace boundary_trace(const WaveField& f, const SpaceTimeGrid& grid) {
    if (f.u.size() != static_cast<std::size_t>(grid.nt() + 1) * grid.nspace())
        throw ConfigError("boundary_trace: field does not match the grid");
    const int n = grid.n();
    const std::size_t ns = grid.nspace();
    const std::size_t nlev = static_cast<std::size_t>(grid.nt() + 1);
    const auto& sphere = grid.sphere_samples();

    BoundaryTrace tr;
    tr.s_w.assign(sphere.size() * nlev, 0.0);
    tr.s_wt.assign(sphere.size() * nlev, 0.0);
    tr.s_grad.assign(sphere.size() * nlev * static_cast<std::size_t>(n), 0.0);

    // lateral block: per level, difference the lattice once, then interpolate
    std::vector<std::vector<double>> gcomp(static_cast<std::size_t>(n));
    std::vector<double> ut(ns, 0.0);
    for (int j = 0; j <= grid.nt(); ++j) {
        const double* lev = f.u.data() + static_cast<std::size_t>(j) * ns;
        for (int k = 0; k < n; ++k) {
            gcomp[static_cast<std::size_t>(k)].resize(ns);
            for (std::size_t p = 0; p < ns; ++p)
                gcomp[static_cast<std::size_t>(k)][p] = diff_space(lev, grid, p, k);
        }
        for (std::size_t p = 0; p < ns; ++p) ut[p] = diff_time(f.u, grid, p, j);
        for (std::size_t i = 0; i < sphere.size(); ++i) {
            const std::size_t idx = i * nlev + static_cast<std::size_t>(j);
            tr.s_w[idx] = grid.interp_space(lev, sphere[i].x);
            tr.s_wt[idx] = grid.interp_space(ut.data(), sphere[i].x);
            for (int k = 0; k < n; ++k)
                tr.s_grad[idx * static_cast<std::size_t>(n) + static_cast<std::size_t>(k)] =
                    grid.interp_space(gcomp[static_cast<std::size_t>(k)].data(), sphere[i].x);
        }
    }

    // characteristic base and final slice, nodewise
    tr.g_w.assign(ns, 0.0);
    tr.g_wt.assign(ns, 0.0);
    tr.g_grad.assign(ns * static_cast<std::size_t>(n), 0.0);
    tr.t_w.assign(ns, 0.0);
    tr.t_wt.assign(ns, 0.0);
    tr.t_grad.assign(ns * static_cast<std::size_t>(n), 0.0);

    for (const std::size_t p : grid.ball_nodes()) {
        const double xn = grid.point(p)[static_cast<size_t>(n - 1)];
        const double pos = (xn - grid.t0()) / grid.dt();
        const int j = std::min(static_cast<int>(pos), grid.nt() - 1);
        const double th = pos - j;
        const double* lo = f.u.data() + static_cast<std::size_t>(j) * ns;
        const double* hi = lo + ns;
        tr.g_w[p] = (1.0 - th) * lo[p] + th * hi[p];
        tr.g_wt[p] = (1.0 - th) * diff_time(f.u, grid, p, j) + th * diff_time(f.u, grid, p, j + 1);
        for (int k = 0; k < n; ++k)
            tr.g_grad[p * static_cast<std::size_t>(n) + static_cast<std::size_t>(k)] =
                (1.0 - th) * diff_space(lo, grid, p, k) + th * diff_space(hi, grid, p, k);

        const double* top = f.u.data() + static_cast<std::size_t>(grid.nt()) * ns;
        tr.t_w[p] = top[p];
        tr.t_wt[p] = diff_time(f.u, grid, p, grid.nt());
        for (int k = 0; k < n; ++k)
            tr.t_grad[p * static_cast<std::size_t>(n) + static_cast<std::size_t>(k)] =
                diff_space(top, grid, p, k);
    }
    return tr;
}

BoundaryTrace trace_difference(const BoundaryTrace& a, const BoundaryTrace& b) {
    auto sub = [](const std::vector<double>& x, const std::vector<double>& y) {
        if (x.size() != y.size())
            throw ConfigError("trace_difference: traces come from different grids");
        std::vector<double> r(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) r[i] = x[i] - y[i];
        return r;
    };
    BoundaryTrace d;
    d.s_w = sub(a.s_w, b.s_w);
    d.s_wt = sub(a.s_wt, b.s_wt);
    d.s_grad = sub(a.s_grad, b.s_grad);
    d.g_w = sub(a.g_w, b.g_w);
    d.g_wt = sub(a.g_wt, b.g_wt);
    d.g_grad = sub(a.g_grad, b.g_grad);
    d.t_w = sub(a.t_w, b.t_w);
    d.t_wt = sub(a.t_wt, b.t_wt);
    d.t_grad = sub(a.t_grad, b.t_grad);
    return d;
}

double h1_sigma_norm(const BoundaryTrace& tr, const SpaceTimeGrid& grid) {
    const int n = grid.n();
    const std::size_t nlev = static_cast<std::size_t>(grid.nt() + 1);
    const auto& sphere = grid.sphere_samples();
    if (tr.s_w.size() != sphere.size() * nlev)
        throw ConfigError("h1_sigma_norm: trace does not match the grid");
    double acc = 0.0;
    for (std::size_t i = 0; i < sphere.size(); ++i) {
        const double xn = sphere[i].x[static_cast<size_t>(n - 1)];
        for (int j = 0; j <= grid.nt(); ++j) {
            const double tw = grid.time_weight(xn, j);
            if (tw == 0.0) continue;
            const std::size_t idx = i * nlev + static_cast<std::size_t>(j);
            double g2 = 0.0;
            for (int k = 0; k < n; ++k) {
                const double g =
                    tr.s_grad[idx * static_cast<std::size_t>(n) + static_cast<std::size_t>(k)];
                g2 += g * g;
            }
            acc += sphere[i].weight * tw * (g2 + tr.s_wt[idx] * tr.s_wt[idx] +
                                            tr.s_w[idx] * tr.s_w[idx]);
        }
    }
    return std::sqrt(acc);
}

double mms_error(const Potential& V, const SpaceTimeGrid& grid, double t_probe) {
    check_cfl(grid);
    if (t_probe <= grid.t0() || t_probe > grid.T())
        throw ConfigError("mms_error: probe time outside the window");

    const std::size_t ns = grid.nspace();
    const Potential shape = make_potential({Bump{{0.0, 0.0, 0.0}, 0.8, 1.0}}, grid.n());
    const std::vector<double> Vg = sample_potential(V, grid);

    // u_exact = cos(t) b(x):  u_tt - lap u + V u = cos(t) (-b - lap b + V b)
    std::vector<double> b(ns, 0.0), gsrc(ns, 0.0);
    for (std::size_t p = 0; p < ns; ++p) {
        const Vec x = grid.point(p);
        b[p] = shape.value(x);
        gsrc[p] = -b[p] - shape.laplacian(x) + Vg[p] * b[p];
    }

    std::vector<double> u0(ns), u1(ns);
    for (std::size_t p = 0; p < ns; ++p) {
        u0[p] = std::cos(grid.t0()) * b[p];
        u1[p] = std::cos(grid.tcoord(1)) * b[p];
    }

    auto add_source = [&](int j, std::vector<double>& S) {
        const double c = std::cos(grid.tcoord(j));
        for (std::size_t p = 0; p < ns; ++p) S[p] = c * gsrc[p];
    };

    const std::vector<double> sigma = damping_field(grid, 30.0);
    const std::vector<double> field = integrate(grid, sigma, Vg, add_source, &u0, &u1);

    const int jp = static_cast<int>(std::lround((t_probe - grid.t0()) / grid.dt()));
    const double tp = grid.tcoord(jp);
    const double* lev = field.data() + static_cast<std::size_t>(jp) * ns;
    double num = 0.0, den = 0.0;
    for (const std::size_t p : grid.ball_nodes()) {
        const double wB = grid.ball_weight(p);
        const double ex = std::cos(tp) * b[p];
        num += wB * (lev[p] - ex) * (lev[p] - ex);
        den += wB * ex * ex;
    }
    if (den == 0.0) throw NumericalCheckError("mms_error: vanishing reference norm");
    return std::sqrt(num / den);
}

double sponge_reflection(const GridConfig& base, const Potential& V, double eps,
                         double sponge_strength) {
    // enlarge the box so that an edge-reflected front cannot re-enter the
    // ball before T: needs 2 (L_big - 1) > T - t0 roughly; triple the size
    GridConfig big = base;
    big.L = base.L + 0.5 * (base.T - base.t0);
    big.L = std::ceil(big.L / base.h) * base.h; // keep lattices aligned

    const SpaceTimeGrid gs(base), gb(big);
    const WaveField small = solve_scattered(V, gs, eps, sponge_strength);
    const WaveField wide = solve_scattered(V, gb, eps, sponge_strength);

    const int shift = static_cast<int>(std::lround((big.L - base.L) / base.h));
    const std::size_t ns_s = gs.nspace();
    double max_diff = 0.0, max_amp = 0.0;
    for (int j = 0; j <= gs.nt(); ++j) {
        const double* ls = small.u.data() + static_cast<std::size_t>(j) * ns_s;
        const double* lb = wide.u.data() + static_cast<std::size_t>(j) * gb.nspace();
        for (const std::size_t p : gs.ball_nodes()) {
            // map the small-grid node to the aligned node in the big grid
            std::size_t q = 0, rem = p, mult = 1;
            for (int k = 0; k < gs.n(); ++k) {
                const std::size_t i = rem % static_cast<std::size_t>(gs.nx());
                rem /= static_cast<std::size_t>(gs.nx());
                q += (i + static_cast<std::size_t>(shift)) * mult;
                mult *= static_cast<std::size_t>(gb.nx());
            }
            max_diff = std::max(max_diff, std::abs(ls[p] - lb[q]));
            max_amp = std::max(max_amp, std::abs(lb[q]));
        }
    }
    if (max_amp == 0.0) return 0.0;
    return max_diff / max_amp;
}

} // namespace fas
