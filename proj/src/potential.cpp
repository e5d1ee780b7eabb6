#include "fas/potential.hpp"

#include <cmath>
#include <random>

namespace fas {

namespace {

// profile p(q) = exp(-1/(1-q)) for q < 1, with dp/dq and d2p/dq2
struct Profile {
    double p, pq, pqq;
};

Profile profile(double q) {
    if (q >= 1.0) return {0.0, 0.0, 0.0};
    double om = 1.0 - q;
    double p = std::exp(-1.0 / om);
    double pq = -p / (om * om);
    double pqq = p * (2.0 * q - 1.0) / (om * om * om * om);
    return {p, pq, pqq};
}

double dist2(const Vec& a, const Vec& b, int n) {
    double s = 0;
    for (int d = 0; d < n; ++d) s += (a[d] - b[d]) * (a[d] - b[d]);
    return s;
}

} // namespace

Potential::Potential(std::vector<Bump> bumps, int n) : bumps_(std::move(bumps)), n_(n) {
    for (const auto& b : bumps_) {
        if (b.r <= 0) throw ConfigError("potential: bump radius must be positive");
        double c = std::sqrt(dist2(b.center, Vec{0, 0, 0}, n_));
        if (c + b.r >= 1.0)
            throw ConfigError("potential: bump support must stay strictly inside the unit ball");
        if (!std::isfinite(b.amp)) throw ConfigError("potential: bump amplitude must be finite");
    }
    // sup over a dense per-bump lattice (covers overlaps since every local
    // extremum of the sum lies inside some bump's support)
    double sup = 0.0;
    int m = (n_ == 3) ? 48 : 256;
    for (const auto& b : bumps_) {
        int mz = (n_ == 3) ? m : 0;
        for (int i2 = 0; i2 <= mz; ++i2)
            for (int i1 = 0; i1 <= m; ++i1)
                for (int i0 = 0; i0 <= m; ++i0) {
                    Vec x{b.center[0] - b.r + 2.0 * b.r * i0 / m,
                          b.center[1] - b.r + 2.0 * b.r * i1 / m,
                          n_ == 3 ? b.center[2] - b.r + 2.0 * b.r * i2 / mz : 0.0};
                    sup = std::max(sup, std::abs(value(x)));
                }
    }
    sup_bound_ = sup;
}

double Potential::value(const Vec& x) const {
    double v = 0;
    for (const auto& b : bumps_) {
        double q = dist2(x, b.center, n_) / (b.r * b.r);
        v += b.amp * profile(q).p;
    }
    return v;
}

Vec Potential::grad(const Vec& x) const {
    Vec g{0, 0, 0};
    for (const auto& b : bumps_) {
        double q = dist2(x, b.center, n_) / (b.r * b.r);
        auto pr = profile(q);
        if (pr.p == 0.0) continue;
        double f = b.amp * pr.pq * 2.0 / (b.r * b.r);
        for (int d = 0; d < n_; ++d) g[d] += f * (x[d] - b.center[d]);
    }
    return g;
}

double Potential::laplacian(const Vec& x) const {
    double v = 0;
    for (const auto& b : bumps_) {
        double r2 = b.r * b.r;
        double q = dist2(x, b.center, n_) / r2;
        auto pr = profile(q);
        if (pr.p == 0.0) continue;
        v += b.amp * (pr.pqq * 4.0 * q / r2 + pr.pq * 2.0 * n_ / r2);
    }
    return v;
}

Potential make_potential(std::vector<Bump> bumps, int n) {
    return Potential(std::move(bumps), n);
}

namespace {

double simpson(double a, double fa, double b, double fb, double fm) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adapt(const std::function<double(double)>& f, double a, double fa, double b,
             double fb, double m, double fm, double whole, double tol, int depth) {
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = simpson(a, fa, m, fm, flm);
    double right = simpson(m, fm, b, fb, frm);
    if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adapt(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
           adapt(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

} // namespace

double adaptive_integral(const std::function<double(double)>& f, double lo, double hi,
                         double tol) {
    if (hi <= lo) return 0.0;
    double m = 0.5 * (lo + hi);
    double fa = f(lo), fb = f(hi), fm = f(m);
    return adapt(f, lo, fa, hi, fb, m, fm, simpson(lo, fa, hi, fb, fm), tol, 40);
}

double halfline_integral(const Potential& V, const Vec& x) {
    if (V.is_zero()) return 0.0;
    int n = V.dim();
    // support along the line is the union of bump s-intervals
    double lo = 1.0, hi = -1.0;
    for (const auto& b : V.bumps()) {
        lo = std::min(lo, b.center[n - 1] - b.r);
        hi = std::max(hi, b.center[n - 1] + b.r);
    }
    hi = std::min(hi, x[n - 1]);
    if (hi <= lo) return 0.0;
    Vec p = x;
    auto f = [&](double s) {
        Vec y = p;
        y[n - 1] = s;
        return V.value(y);
    };
    return adaptive_integral(f, lo, hi, 1e-11);
}

double l2_norm_B(const Potential& V, const SpaceTimeGrid& grid) {
    double q = grid.quad_Bslice(
        [&](const Vec& x, double) { double v = V.value(x); return v * v; }, 0.0);
    return std::sqrt(q);
}

std::vector<Potential> gen_ensemble(const EnsembleSpec& spec, int n) {
    std::mt19937_64 rng(spec.seed);
    std::uniform_int_distribution<int> nb(spec.bumps_min, spec.bumps_max);
    std::uniform_real_distribution<double> uc(-spec.center_max, spec.center_max);
    std::uniform_real_distribution<double> ur(spec.r_min, spec.r_max);
    std::uniform_real_distribution<double> ua(-spec.amp_max, spec.amp_max);
    std::vector<Potential> out;
    out.reserve(spec.count);
    for (int i = 0; i < spec.count; ++i) {
        int k = nb(rng);
        std::vector<Bump> bumps;
        bumps.reserve(k);
        for (int j = 0; j < k; ++j) {
            Bump b;
            // rejection keeps |center| <= center_max so |center|+r < 1 always
            do {
                b.center = {uc(rng), uc(rng), n == 3 ? uc(rng) : 0.0};
            } while (dist2(b.center, Vec{0, 0, 0}, n) > spec.center_max * spec.center_max);
            b.r = ur(rng);
            b.amp = ua(rng);
            bumps.push_back(b);
        }
        out.emplace_back(std::move(bumps), n);
    }
    return out;
}

} // namespace fas
