#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fas/grid.hpp"

#include <cmath>
#include <numbers>

using namespace fas;

namespace {

GridConfig base2d(double h) {
    GridConfig g;
    g.n = 2;
    g.L = 1.5;
    g.h = h;
    g.dt_factor = 0.5;
    g.t0 = -1.75;
    g.T = 6.5;
    return g;
}

} // namespace

TEST_CASE("build accepts the standard 2-D window and snaps dt onto T") {
    SpaceTimeGrid g(base2d(1.0 / 32));
    CHECK(g.dt() <= g.h() / std::sqrt(2.0) + 1e-15);
    CHECK(g.dt() == doctest::Approx(1.0 / 64).epsilon(1e-12));
    CHECK(g.tcoord(g.nt()) == doctest::Approx(6.5).epsilon(1e-13));
    CHECK(g.nx() == 97);
}

TEST_CASE("build rejects a CFL-violating time step") {
    GridConfig g = base2d(1.0 / 32);
    g.dt_factor = 1.0; // dt = h > h/sqrt(2)
    CHECK_THROWS_AS(SpaceTimeGrid{g}, ConfigError);
}

TEST_CASE("build rejects geometry that cannot hold the ball plus sponge") {
    GridConfig g = base2d(1.0 / 32);
    g.L = 1.25;
    g.sponge_width = 0.5;
    CHECK_THROWS_AS(SpaceTimeGrid{g}, ConfigError);
}

TEST_CASE("3-D characteristic mask matches exhaustive node enumeration") {
    GridConfig cfg;
    cfg.n = 3;
    cfg.L = 1.5;
    cfg.h = 1.0 / 16;
    cfg.dt_factor = 0.5;
    cfg.t0 = -1.75;
    cfg.T = 2.0;
    SpaceTimeGrid g(cfg);

    std::size_t count = 0;
    for (int i2 = 0; i2 < g.nx(); ++i2)
        for (int i1 = 0; i1 < g.nx(); ++i1)
            for (int i0 = 0; i0 < g.nx(); ++i0) {
                double x = g.xcoord(i0), y = g.xcoord(i1), z = g.xcoord(i2);
                if (x * x + y * y + z * z >= 1.0) continue;
                for (int j = 0; j <= g.nt(); ++j)
                    if (std::abs(g.tcoord(j) - z) <= 0.5 * g.dt() + 1e-14) ++count;
            }
    CHECK(g.gamma_mask().size() == count);
    CHECK(count > 0);
}

TEST_CASE("diff: constants, linears, and a refinement study on sin") {
    SpaceTimeGrid g(base2d(1.0 / 16));
    const std::size_t sz = (g.nt() + 1) * g.nspace();

    std::vector<double> c(sz, 3.25);
    for (int ax = 0; ax <= g.n(); ++ax) {
        auto d = g.diff(c, ax);
        double mx = 0;
        for (double v : d) mx = std::max(mx, std::abs(v));
        CHECK(mx == 0.0);
    }

    std::vector<double> lin(sz);
    for (int j = 0; j <= g.nt(); ++j)
        for (std::size_t i = 0; i < g.nspace(); ++i)
            lin[j * g.nspace() + i] = g.point(i)[0];
    auto d0 = g.diff(lin, 0);
    double err = 0;
    for (std::size_t i = 0; i < g.nspace(); ++i) err = std::max(err, std::abs(d0[i] - 1.0));
    CHECK(err < 1e-12);

    // interior error of d/dx sin(2 pi x) halves by ~4 per refinement
    auto interior_err = [](double h) {
        SpaceTimeGrid gg(base2d(h));
        std::vector<double> f((gg.nt() + 1) * gg.nspace());
        for (std::size_t i = 0; i < gg.nspace(); ++i)
            f[i] = std::sin(2 * std::numbers::pi * gg.point(i)[0]);
        for (int j = 1; j <= gg.nt(); ++j)
            std::copy(f.begin(), f.begin() + gg.nspace(), f.begin() + j * gg.nspace());
        auto d = gg.diff(f, 0);
        double e = 0;
        for (int i1 = 0; i1 < gg.nx(); ++i1)
            for (int i0 = 1; i0 + 1 < gg.nx(); ++i0) {
                std::size_t k = gg.flat(i0, i1);
                e = std::max(e, std::abs(d[k] - 2 * std::numbers::pi *
                                                     std::cos(2 * std::numbers::pi *
                                                              gg.point(k)[0])));
            }
        return e;
    };
    double e16 = interior_err(1.0 / 16), e32 = interior_err(1.0 / 32);
    CHECK(e16 / e32 >= 3.8);
}

TEST_CASE("diff twice on a quadratic returns its exact second derivative inside") {
    SpaceTimeGrid g(base2d(1.0 / 16));
    std::vector<double> f((g.nt() + 1) * g.nspace());
    for (int j = 0; j <= g.nt(); ++j)
        for (std::size_t i = 0; i < g.nspace(); ++i) {
            double x = g.point(i)[1];
            f[j * g.nspace() + i] = 1.5 * x * x - 0.5 * x + 2;
        }
    auto d2 = g.diff(g.diff(f, 1), 1);
    double err = 0;
    for (int i1 = 2; i1 + 2 < g.nx(); ++i1)
        for (int i0 = 0; i0 < g.nx(); ++i0)
            err = std::max(err, std::abs(d2[g.flat(i0, i1)] - 3.0));
    CHECK(err < 1e-10);
}

TEST_CASE("quadrature: unit disc area, zero field, lateral cylinder area") {
    SpaceTimeGrid g(base2d(1.0 / 64));
    double area = g.quad_Bslice([](const Vec&, double) { return 1.0; }, 0.0);
    CHECK(std::abs(area - std::numbers::pi) / std::numbers::pi < 0.02);

    std::vector<double> zero((g.nt() + 1) * g.nspace(), 0.0);
    for (auto r : {Region::Q, Region::Sigma, Region::Gamma, Region::TopSlice, Region::BallSlice})
        CHECK(g.quad(zero, r) == 0.0);

    // integral of 1 over Sigma = circumference x (T - x_n) averaged; the exact
    // value is 2 pi T since the x_n average over the circle vanishes. Compare
    // against an independent fine angular summation.
    double got = g.quad_Sigma([](const Vec&, double) { return 1.0; });
    int M = 200000;
    double oracle = 0;
    for (int i = 0; i < M; ++i) {
        double th = 2 * std::numbers::pi * (i + 0.5) / M;
        oracle += (g.T() - std::sin(th)) * (2 * std::numbers::pi / M);
    }
    CHECK(std::abs(got - oracle) / oracle < 0.02);
}

TEST_CASE("space-time divergence identities hold and tighten under refinement") {
    // spatial part: int_Q div F = int_Sigma F.nu + (1/sqrt2) int_Gamma F_n
    auto Fx = [](const Vec& p, double t) { return std::sin(p[0] + 2 * t) + 0.3 * p[1]; };
    auto Fy = [](const Vec& p, double t) { return std::cos(0.7 * p[0] * p[1] + t); };
    auto divF = [](const Vec& p, double t) {
        return std::cos(p[0] + 2 * t) - 0.7 * p[0] * std::sin(0.7 * p[0] * p[1] + t);
    };
    // time part: int_Q dg/dt = int_{t=T} g - (1/sqrt2) int_Gamma g
    auto gfun = [](const Vec& p, double t) { return std::sin(t + p[0]) * std::cos(0.5 * p[1]); };
    auto gt = [](const Vec& p, double t) { return std::cos(t + p[0]) * std::cos(0.5 * p[1]); };

    auto residuals = [&](double h) {
        SpaceTimeGrid g(base2d(h));
        double lhs = g.quad_Q(divF);
        double rhs = g.quad_Sigma([&](const Vec& p, double t) {
            return Fx(p, t) * p[0] + Fy(p, t) * p[1];
        });
        rhs += (1.0 / std::numbers::sqrt2) * g.quad_Gamma(Fy);
        double r1 = std::abs(lhs - rhs) / (std::abs(lhs) + std::abs(rhs) + 1e-30);

        double lhs2 = g.quad_Q(gt);
        double rhs2 = g.quad_Tslice(gfun) - (1.0 / std::numbers::sqrt2) * g.quad_Gamma(gfun);
        double r2 = std::abs(lhs2 - rhs2) / (std::abs(lhs2) + std::abs(rhs2) + 1e-30);
        return std::pair{r1, r2};
    };
    auto [a16, b16] = residuals(1.0 / 16);
    auto [a32, b32] = residuals(1.0 / 32);
    CHECK(a16 < 0.05);
    CHECK(b16 < 0.05);
    CHECK(a32 < 0.75 * a16);
    CHECK(b32 < 0.75 * b16);
}

TEST_CASE("interpolation reproduces affine fields exactly") {
    SpaceTimeGrid g(base2d(1.0 / 16));
    std::vector<double> f((g.nt() + 1) * g.nspace());
    for (int j = 0; j <= g.nt(); ++j)
        for (std::size_t i = 0; i < g.nspace(); ++i) {
            Vec p = g.point(i);
            f[j * g.nspace() + i] = 2 * p[0] - 3 * p[1] + 0.25 * g.tcoord(j) + 1;
        }
    Vec q{0.31, -0.47, 0.0};
    double t = 1.234;
    CHECK(g.interp(f, q, t) ==
          doctest::Approx(2 * q[0] - 3 * q[1] + 0.25 * t + 1).epsilon(1e-12));
}

TEST_CASE("sphere samples sit on the sphere with unit normals and full measure") {
    for (int n : {2, 3}) {
        GridConfig cfg;
        cfg.n = n;
        cfg.L = 1.5;
        cfg.h = 1.0 / 16;
        cfg.dt_factor = 0.5;
        cfg.t0 = -1.75;
        cfg.T = 2.0;
        SpaceTimeGrid g(cfg);
        double total = 0;
        for (const auto& s : g.sphere_samples()) {
            double r = std::sqrt(s.x[0] * s.x[0] + s.x[1] * s.x[1] + s.x[2] * s.x[2]);
            CHECK(r == doctest::Approx(1.0).epsilon(1e-12));
            total += s.weight;
        }
        double exact = (n == 2) ? 2 * std::numbers::pi : 4 * std::numbers::pi;
        CHECK(total == doctest::Approx(exact).epsilon(1e-10));
    }
}

TEST_CASE("Gauss-Legendre rule integrates high-degree monomials exactly") {
    std::vector<double> xs, ws;
    gauss_legendre(5, xs, ws);
    double v = 0;
    for (int i = 0; i < 5; ++i) v += ws[i] * std::pow(xs[i], 8);
    CHECK(v == doctest::Approx(2.0 / 9).epsilon(1e-13));
}
