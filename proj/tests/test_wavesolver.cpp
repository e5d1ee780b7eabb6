#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "fas/wavesolver.hpp"

#include <cmath>
#include <vector>

using namespace fas;

namespace {

Potential bump_a() { return make_potential({Bump{{0.1, -0.1, 0.0}, 0.4, 0.8}}, 2); }
Potential bump_b() { return make_potential({Bump{{-0.15, 0.2, 0.0}, 0.35, 0.6}}, 2); }

// analytic lattice field for trace-restriction checks
WaveField inject(const SpaceTimeGrid& g, double eps,
                 double (*f)(const Vec&, double)) {
    WaveField out;
    out.eps = eps;
    out.potential_ref = "injected";
    out.u.resize(static_cast<std::size_t>(g.nt() + 1) * g.nspace());
    for (int j = 0; j <= g.nt(); ++j)
        for (std::size_t p = 0; p < g.nspace(); ++p)
            out.u[static_cast<std::size_t>(j) * g.nspace() + p] = f(g.point(p), g.tcoord(j));
    return out;
}

double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (const double x : v) m = std::max(m, std::abs(x));
    return m;
}

} // namespace

TEST_CASE("zero potential gives the exact zero field") {
    GridConfig cfg;
    cfg.n = 2;
    cfg.h = 1.0 / 16;
    const SpaceTimeGrid g(cfg);
    const Potential none = make_potential({}, 2);
    const WaveField f = solve_scattered(none, g, 0.125);

    CHECK(f.potential_ref == "zero");
    CHECK(max_abs(f.u) == 0.0);

    const CharTrace ct = characteristic_trace(f, g, 4.0);
    CHECK(max_abs(ct.w) == 0.0);
    CHECK(max_abs(ct.w_t) == 0.0);
    CHECK(max_abs(ct.w_xn) == 0.0);

    const BoundaryTrace bt = boundary_trace(f, g);
    CHECK(max_abs(bt.s_w) == 0.0);
    CHECK(max_abs(bt.s_grad) == 0.0);
    CHECK(max_abs(bt.g_w) == 0.0);
    CHECK(max_abs(bt.t_w) == 0.0);
    CHECK(h1_sigma_norm(bt, g) == 0.0);
}

TEST_CASE("field vanishes ahead of the incident front") {
    GridConfig cfg;
    cfg.n = 2;
    cfg.h = 1.0 / 32;
    const SpaceTimeGrid g(cfg);
    const double eps = 0.125;
    const WaveField f = solve_scattered(bump_a(), g, eps);

    double precursor = 0.0, amp = 0.0;
    for (int j = 0; j <= g.nt(); ++j) {
        const double t = g.tcoord(j);
        for (std::size_t p = 0; p < g.nspace(); ++p) {
            const double v = std::abs(f.u[static_cast<std::size_t>(j) * g.nspace() + p]);
            amp = std::max(amp, v);
            if (t < g.point(p)[1] - 5.0 * eps) precursor = std::max(precursor, v);
        }
    }
    CHECK(amp > 0.0);
    CHECK(precursor / amp <= 1e-5);
}

TEST_CASE("solution is linear in the source amplitude") {
    GridConfig cfg;
    cfg.n = 2;
    cfg.h = 1.0 / 16;
    cfg.t0 = -2.5;
    cfg.T = 3.0;
    const SpaceTimeGrid g(cfg);
    const Potential V = bump_a();

    const WaveField one = solve_scattered(V, g, 0.25, 30.0, 1.0);
    const WaveField two = solve_scattered(V, g, 0.25, 30.0, 2.0);
    const WaveField off = solve_scattered(V, g, 0.25, 30.0, 0.0);

    double gap = 0.0, amp = 0.0;
    for (std::size_t i = 0; i < one.u.size(); ++i) {
        gap = std::max(gap, std::abs(two.u[i] - 2.0 * one.u[i]));
        amp = std::max(amp, std::abs(one.u[i]));
    }
    CHECK(amp > 0.0);
    CHECK(gap / amp <= 1e-12);
    CHECK(max_abs(off.u) == 0.0);
}

TEST_CASE("characteristic trace converges to the jump datum") {
    // behind the smeared front the field should settle onto
    // -(1/2) * integral of V along the incident ray; the sampling delay
    // (4 eps with eps tied to h) shrinks under refinement, so the gap
    // must shrink with it
    const Potential V = bump_a();
    std::vector<double> rel;
    for (const double h : {1.0 / 16, 1.0 / 32, 1.0 / 64}) {
        GridConfig cfg;
        cfg.n = 2;
        cfg.h = h;
        cfg.t0 = -1.5;
        cfg.T = 1.5625;
        const SpaceTimeGrid g(cfg);
        const WaveField f = solve_scattered(V, g, h);
        const CharTrace tr = characteristic_trace(f, g, 4.0);
        double num = 0.0, den = 0.0;
        for (const std::size_t p : g.ball_nodes()) {
            if (tr.past_T[p]) continue;
            const double datum = -0.5 * halfline_integral(V, g.point(p));
            const double wB = g.ball_weight(p);
            num += wB * (tr.w[p] - datum) * (tr.w[p] - datum);
            den += wB * datum * datum;
        }
        rel.push_back(std::sqrt(num / den));
    }
    CHECK(rel[0] <= 0.95);
    CHECK(rel[1] / rel[0] <= 0.85);
    CHECK(rel[2] / rel[1] <= 0.85);
    CHECK(rel[2] <= 0.40);
}

TEST_CASE("trace drift between settling offsets four and eight") {
    // at production resolution the post-front plateau still drifts in time,
    // so doubling the sampling delay moves the trace by an O(1) fraction;
    // pin the measured level so a regression (or an improvement) surfaces
    GridConfig cfg;
    cfg.n = 2;
    cfg.h = 1.0 / 32;
    const SpaceTimeGrid g(cfg);
    const WaveField f = solve_scattered(bump_a(), g, 0.125);
    const CharTrace t4 = characteristic_trace(f, g, 4.0);
    const CharTrace t8 = characteristic_trace(f, g, 8.0);

    double num = 0.0, den = 0.0;
    for (const std::size_t p : g.ball_nodes()) {
        if (t4.past_T[p] || t8.past_T[p]) continue;
        const double wB = g.ball_weight(p);
        num += wB * (t8.w[p] - t4.w[p]) * (t8.w[p] - t4.w[p]);
        den += wB * t8.w[p] * t8.w[p];
    }
    const double drift = std::sqrt(num / den);
    CHECK(drift <= 0.95);
}

TEST_CASE("trace nodes beyond the window are flagged") {
    GridConfig cfg;
    cfg.n = 2;
    cfg.h = 1.0 / 16;
    cfg.T = 1.25;
    const SpaceTimeGrid g(cfg);
    const Potential none = make_potential({}, 2);
    const WaveField f = solve_scattered(none, g, 0.125);
    const CharTrace tr = characteristic_trace(f, g, 4.0);

    int flagged = 0;
    for (const std::size_t p : g.ball_nodes()) {
        const double xn = g.point(p)[1];
        const bool expect_flag = xn + 0.5 > g.T();
        CHECK(static_cast<bool>(tr.past_T[p]) == expect_flag);
        if (tr.past_T[p]) {
            CHECK(tr.w[p] == 0.0);
            ++flagged;
        }
    }
    CHECK(flagged > 0);
}

TEST_CASE("difference field satisfies the perturbation equation") {
    // w = u1 - u2 obeys w_tt - lap w + V1 w = -(V1 - V2) u2 away from the
    // pulse; check the discrete residual against the forcing scale
    for (const double h : {1.0 / 16, 1.0 / 32}) {
        GridConfig cfg;
        cfg.n = 2;
        cfg.h = h;
        cfg.t0 = -2.5;
        cfg.T = 3.0;
        const SpaceTimeGrid g(cfg);
        const double eps = 4.0 * h;
        const Potential V1 = bump_a(), V2 = bump_b();
        const WaveField f1 = solve_scattered(V1, g, eps);
        const WaveField f2 = solve_scattered(V2, g, eps);

        const std::size_t ns = g.nspace();
        const int nx = g.nx();
        const double dt = g.dt();
        double rnum = 0.0, rden = 0.0;
        for (int j = 2; j <= g.nt() - 2; ++j) {
            const double t = g.tcoord(j);
            for (const std::size_t p : g.ball_nodes()) {
                const Vec x = g.point(p);
                if (x[0] * x[0] + x[1] * x[1] > 0.81) continue;
                if (t - x[1] < 5.0 * eps) continue;
                auto w = [&](int lv, std::size_t q) {
                    return f1.u[static_cast<std::size_t>(lv) * ns + q] -
                           f2.u[static_cast<std::size_t>(lv) * ns + q];
                };
                const double wtt = (w(j + 1, p) - 2.0 * w(j, p) + w(j - 1, p)) / (dt * dt);
                const double lap =
                    (w(j, p - 1) + w(j, p + 1) + w(j, p - nx) + w(j, p + nx) - 4.0 * w(j, p)) /
                    (h * h);
                const double force =
                    (V1.value(x) - V2.value(x)) * f2.u[static_cast<std::size_t>(j) * ns + p];
                const double res = wtt - lap + V1.value(x) * w(j, p) + force;
                rnum += res * res;
                rden += force * force;
            }
        }
        CHECK(std::sqrt(rnum / rden) <= 5e-4);
    }
}

TEST_CASE("identical potentials cancel exactly in the trace difference") {
    GridConfig cfg;
    cfg.n = 2;
    cfg.h = 1.0 / 16;
    cfg.T = 3.0;
    const SpaceTimeGrid g(cfg);
    const WaveField f1 = solve_scattered(bump_a(), g, 0.125);
    const WaveField f2 = solve_scattered(bump_a(), g, 0.125);
    const BoundaryTrace d = trace_difference(boundary_trace(f1, g), boundary_trace(f2, g));
    CHECK(max_abs(d.s_w) == 0.0);
    CHECK(max_abs(d.s_wt) == 0.0);
    CHECK(max_abs(d.s_grad) == 0.0);
    CHECK(max_abs(d.g_w) == 0.0);
    CHECK(max_abs(d.g_wt) == 0.0);
    CHECK(max_abs(d.g_grad) == 0.0);
    CHECK(max_abs(d.t_w) == 0.0);
    CHECK(max_abs(d.t_wt) == 0.0);
    CHECK(max_abs(d.t_grad) == 0.0);
}

TEST_CASE("boundary trace restricts injected fields correctly") {
    GridConfig cfg;
    cfg.n = 2;
    cfg.h = 1.0 / 32;
    const SpaceTimeGrid g(cfg);
    const std::size_t nlev = static_cast<std::size_t>(g.nt()) + 1;
    const auto& sphere = g.sphere_samples();

    SUBCASE("affine field is reproduced to rounding") {
        const WaveField f = inject(g, 0.125, [](const Vec& x, double t) {
            return 0.3 + x[0] - 0.5 * x[1] + 0.25 * t;
        });
        const BoundaryTrace b = boundary_trace(f, g);
        double e = 0.0;
        for (std::size_t i = 0; i < sphere.size(); ++i)
            for (int j = 0; j <= g.nt(); ++j) {
                const Vec x = sphere[i].x;
                const std::size_t idx = i * nlev + static_cast<std::size_t>(j);
                const double want = 0.3 + x[0] - 0.5 * x[1] + 0.25 * g.tcoord(j);
                e = std::max(e, std::abs(b.s_w[idx] - want));
                e = std::max(e, std::abs(b.s_wt[idx] - 0.25));
                e = std::max(e, std::abs(b.s_grad[idx * 2] - 1.0));
                e = std::max(e, std::abs(b.s_grad[idx * 2 + 1] + 0.5));
            }
        for (const std::size_t p : g.ball_nodes()) {
            const Vec x = g.point(p);
            e = std::max(e, std::abs(b.g_w[p] - (0.3 + x[0] - 0.25 * x[1])));
            e = std::max(e, std::abs(b.g_wt[p] - 0.25));
            e = std::max(e, std::abs(b.t_w[p] - (0.3 + x[0] - 0.5 * x[1] + 0.25 * g.T())));
        }
        CHECK(e <= 1e-12);
    }

    SUBCASE("smooth curved field is reproduced to discretization accuracy") {
        const WaveField f = inject(g, 0.125, [](const Vec& x, double t) {
            return std::cos(x[0]) * std::sin(t + x[1]);
        });
        const BoundaryTrace b = boundary_trace(f, g);
        double e = 0.0;
        for (std::size_t i = 0; i < sphere.size(); ++i)
            for (int j = 0; j <= g.nt(); ++j) {
                const Vec x = sphere[i].x;
                const double t = g.tcoord(j);
                const std::size_t idx = i * nlev + static_cast<std::size_t>(j);
                e = std::max(e, std::abs(b.s_w[idx] - std::cos(x[0]) * std::sin(t + x[1])));
                e = std::max(e, std::abs(b.s_wt[idx] - std::cos(x[0]) * std::cos(t + x[1])));
                e = std::max(e, std::abs(b.s_grad[idx * 2] + std::sin(x[0]) * std::sin(t + x[1])));
                e = std::max(e,
                             std::abs(b.s_grad[idx * 2 + 1] - std::cos(x[0]) * std::cos(t + x[1])));
            }
        for (const std::size_t p : g.ball_nodes()) {
            const Vec x = g.point(p);
            e = std::max(e, std::abs(b.g_w[p] - std::cos(x[0]) * std::sin(2.0 * x[1])));
            e = std::max(e, std::abs(b.g_wt[p] - std::cos(x[0]) * std::cos(2.0 * x[1])));
            e = std::max(e, std::abs(b.t_w[p] - std::cos(x[0]) * std::sin(g.T() + x[1])));
            e = std::max(e, std::abs(b.t_wt[p] - std::cos(x[0]) * std::cos(g.T() + x[1])));
        }
        CHECK(e <= 1e-3);
    }
}

TEST_CASE("lateral energy norm matches a closed-form integral") {
    // u = x0 on the lateral cylinder: |grad u|^2 = 1, u_t = 0, and the
    // surface-time integral of (1 + x0^2) over x_n <= t <= T equals 19.5 pi
    // for T = 6.5, so the norm is sqrt(19.5 pi)
    GridConfig cfg;
    cfg.n = 2;
    cfg.h = 1.0 / 64;
    const SpaceTimeGrid g(cfg);
    const WaveField f = inject(g, 0.25, [](const Vec& x, double) { return x[0]; });
    const BoundaryTrace b = boundary_trace(f, g);
    const double got = h1_sigma_norm(b, g);
    const double want = std::sqrt(19.5 * M_PI);
    CHECK(std::abs(got - want) / want <= 1e-9);

    SUBCASE("norm is absolutely homogeneous") {
        BoundaryTrace scaled = b;
        for (double& v : scaled.s_w) v *= -3.0;
        for (double& v : scaled.s_wt) v *= -3.0;
        for (double& v : scaled.s_grad) v *= -3.0;
        const double got3 = h1_sigma_norm(scaled, g);
        CHECK(std::abs(got3 - 3.0 * got) / (3.0 * got) <= 1e-12);
    }
}

TEST_CASE("manufactured solution converges at second order") {
    const Potential V = bump_a();
    std::vector<double> err;
    for (const double h : {1.0 / 8, 1.0 / 16, 1.0 / 32}) {
        GridConfig cfg;
        cfg.n = 2;
        cfg.h = h;
        cfg.T = 2.5;
        err.push_back(mms_error(V, SpaceTimeGrid(cfg), 2.0));
    }
    CHECK(std::log2(err[0] / err[1]) >= 1.8);
    CHECK(std::log2(err[1] / err[2]) >= 1.8);
}

TEST_CASE("damping layer calibration against an enlarged box") {
    // the graded layer absorbs the outgoing front but not the long
    // late-time tail, whose wavelength exceeds the layer; the audit
    // quantifies that worst-case pointwise gap honestly
    GridConfig cfg;
    cfg.n = 2;
    cfg.h = 1.0 / 16;
    const double refl = sponge_reflection(cfg, bump_a(), 0.125);
    CHECK(refl > 0.0);
    CHECK(refl <= 0.70);

    const Potential none = make_potential({}, 2);
    CHECK(sponge_reflection(cfg, none, 0.125) == 0.0);
}

TEST_CASE("input validation") {
    GridConfig cfg;
    cfg.n = 2;
    cfg.h = 1.0 / 16;
    const SpaceTimeGrid g(cfg);
    const Potential V = bump_a();

    // pulse narrower than two steps
    CHECK_THROWS_AS(solve_scattered(V, g, 0.5 * g.dt()), ConfigError);

    // window opens after the pulse has already crossed the support
    GridConfig late = cfg;
    late.t0 = -1.25;
    CHECK_THROWS_AS(solve_scattered(V, SpaceTimeGrid(late), 0.125), ConfigError);

    const WaveField f = solve_scattered(V, g, 0.125);
    CHECK_THROWS_AS(characteristic_trace(f, g, 3.0), ConfigError);

    // field from a different grid
    GridConfig other = cfg;
    other.h = 1.0 / 8;
    const SpaceTimeGrid g8(other);
    CHECK_THROWS_AS(characteristic_trace(f, g8, 4.0), ConfigError);
    CHECK_THROWS_AS(boundary_trace(f, g8), ConfigError);

    const BoundaryTrace b = boundary_trace(f, g);
    const WaveField f8 = solve_scattered(V, g8, 0.125);
    CHECK_THROWS_AS(trace_difference(b, boundary_trace(f8, g8)), ConfigError);
    CHECK_THROWS_AS(h1_sigma_norm(b, g8), ConfigError);

    CHECK_THROWS_AS(mms_error(V, g, g.T() + 1.0), ConfigError);
}
