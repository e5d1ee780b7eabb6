#include "fas/testfunction.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace fas {

Jet2 Jet2::operator+(const Jet2& o) const {
    Jet2 r;
    r.v = v + o.v;
    for (int i = 0; i < 4; ++i) {
        r.d[i] = d[i] + o.d[i];
        for (int j = 0; j < 4; ++j) r.dd[i][j] = dd[i][j] + o.dd[i][j];
    }
    return r;
}

Jet2 Jet2::operator-(const Jet2& o) const {
    Jet2 r;
    r.v = v - o.v;
    for (int i = 0; i < 4; ++i) {
        r.d[i] = d[i] - o.d[i];
        for (int j = 0; j < 4; ++j) r.dd[i][j] = dd[i][j] - o.dd[i][j];
    }
    return r;
}

Jet2 Jet2::operator*(const Jet2& o) const {
    Jet2 r;
    r.v = v * o.v;
    for (int i = 0; i < 4; ++i) r.d[i] = d[i] * o.v + v * o.d[i];
    // fill the upper triangle and mirror so the Hessian stays exactly symmetric
    for (int i = 0; i < 4; ++i)
        for (int j = i; j < 4; ++j) {
            const double m = dd[i][j] * o.v + d[i] * o.d[j] + d[j] * o.d[i] + v * o.dd[i][j];
            r.dd[i][j] = m;
            r.dd[j][i] = m;
        }
    return r;
}

Jet2 Jet2::scaled(double c) const {
    Jet2 r;
    r.v = c * v;
    for (int i = 0; i < 4; ++i) {
        r.d[i] = c * d[i];
        for (int j = 0; j < 4; ++j) r.dd[i][j] = c * dd[i][j];
    }
    return r;
}

TestFunction TestFunction::zero(int n) {
    TestFunction f;
    f.n_ = n;
    f.zero_ = true;
    f.amp_ = 0.0;
    return f;
}

TestFunction TestFunction::constant(double c, int n) {
    TestFunction f;
    f.n_ = n;
    f.amp_ = c;
    f.zero_ = (c == 0.0);
    return f;
}

TestFunction TestFunction::poly(std::array<int, 4> powers, std::array<double, 4> shift, int n) {
    for (int p : powers)
        if (p < 0) throw ConfigError("poly: negative power");
    TestFunction f;
    f.n_ = n;
    Factor fac;
    fac.kind = Factor::Kind::Poly;
    fac.powers = powers;
    fac.a = shift;
    if (n == 2) fac.powers[2] = 0;
    f.factors_.push_back(fac);
    return f;
}

TestFunction TestFunction::gaussian(std::array<double, 4> center, std::array<double, 4> width,
                                    int n) {
    TestFunction f;
    f.n_ = n;
    Factor fac;
    fac.kind = Factor::Kind::Gauss;
    fac.a = center;
    for (int i = 0; i < 4; ++i)
        fac.b[i] = (width[i] > 0.0) ? 1.0 / (width[i] * width[i]) : 0.0;
    if (n == 2) fac.b[2] = 0.0;
    f.factors_.push_back(fac);
    return f;
}

TestFunction TestFunction::trig(std::array<double, 4> k, double phase, int n) {
    TestFunction f;
    f.n_ = n;
    Factor fac;
    fac.kind = Factor::Kind::Trig;
    fac.a = k;
    if (n == 2) fac.a[2] = 0.0;
    fac.phase = phase;
    f.factors_.push_back(fac);
    return f;
}

TestFunction& TestFunction::operator*=(const TestFunction& o) {
    if (o.n_ != n_) throw ConfigError("test function dimension mismatch");
    amp_ *= o.amp_;
    zero_ = zero_ || o.zero_;
    for (const auto& fac : o.factors_) factors_.push_back(fac);
    return *this;
}

TestFunction& TestFunction::scale(double c) {
    amp_ *= c;
    if (c == 0.0) zero_ = true;
    return *this;
}

TestFunction& TestFunction::apply_cutoff(double R) {
    if (R <= 1.0) throw ConfigError("cutoff radius must exceed the unit ball");
    Factor fac;
    fac.kind = Factor::Kind::Cutoff;
    fac.R = R;
    factors_.push_back(fac);
    return *this;
}

namespace {

// value and first two derivatives of q -> exp(-1/(1-q)) on [0, 1)
void bump_profile(double q, double& p, double& pq, double& pqq) {
    const double om = 1.0 - q;
    p = std::exp(-1.0 / om);
    pq = -p / (om * om);
    pqq = p * (2.0 * q - 1.0) / (om * om * om * om);
}

// univariate (xi - a)^p jet: value, d/dxi, d2/dxi2
void pow_jet(double xi, double a, int p, double& v, double& dv, double& ddv) {
    const double u = xi - a;
    if (p == 0) {
        v = 1.0;
        dv = 0.0;
        ddv = 0.0;
        return;
    }
    if (p == 1) {
        v = u;
        dv = 1.0;
        ddv = 0.0;
        return;
    }
    double um2 = 1.0;
    for (int i = 0; i < p - 2; ++i) um2 *= u;
    v = um2 * u * u;
    dv = p * um2 * u;
    ddv = p * (p - 1) * um2;
}

} // namespace

Jet2 TestFunction::eval_factor(const Factor& f, const Vec& x, double t) const {
    const std::array<double, 4> xi{x[0], x[1], x[2], t};
    Jet2 r;
    switch (f.kind) {
    case Factor::Kind::Poly: {
        std::array<double, 4> v, dv, ddv;
        for (int i = 0; i < 4; ++i) pow_jet(xi[i], f.a[i], f.powers[i], v[i], dv[i], ddv[i]);
        const double prod = v[0] * v[1] * v[2] * v[3];
        r.v = prod;
        for (int i = 0; i < 4; ++i) {
            double rest = 1.0;
            for (int m = 0; m < 4; ++m)
                if (m != i) rest *= v[m];
            r.d[i] = dv[i] * rest;
            r.dd[i][i] = ddv[i] * rest;
            for (int j = i + 1; j < 4; ++j) {
                double rest2 = 1.0;
                for (int m = 0; m < 4; ++m)
                    if (m != i && m != j) rest2 *= v[m];
                r.dd[i][j] = r.dd[j][i] = dv[i] * dv[j] * rest2;
            }
        }
        break;
    }
    case Factor::Kind::Gauss: {
        double e = 0.0;
        for (int i = 0; i < 4; ++i) {
            const double u = xi[i] - f.a[i];
            e += f.b[i] * u * u;
        }
        const double g = std::exp(-e);
        r.v = g;
        for (int i = 0; i < 4; ++i) r.d[i] = -2.0 * f.b[i] * (xi[i] - f.a[i]) * g;
        for (int i = 0; i < 4; ++i)
            for (int j = i; j < 4; ++j) {
                double m = 4.0 * f.b[i] * f.b[j] * (xi[i] - f.a[i]) * (xi[j] - f.a[j]) * g;
                if (i == j) m -= 2.0 * f.b[i] * g;
                r.dd[i][j] = m;
                r.dd[j][i] = m;
            }
        break;
    }
    case Factor::Kind::Trig: {
        double th = f.phase;
        for (int i = 0; i < 4; ++i) th += f.a[i] * xi[i];
        const double s = std::sin(th), c = std::cos(th);
        r.v = s;
        for (int i = 0; i < 4; ++i) r.d[i] = f.a[i] * c;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) r.dd[i][j] = -f.a[i] * f.a[j] * s;
        break;
    }
    case Factor::Kind::Cutoff: {
        const double R2 = f.R * f.R;
        double q = 0.0;
        for (int i = 0; i < n_; ++i) q += x[i] * x[i];
        q /= R2;
        if (q >= 1.0) return r; // identically zero jet outside the support
        double p, pq, pqq;
        bump_profile(q, p, pq, pqq);
        r.v = p;
        for (int i = 0; i < n_; ++i) r.d[i] = pq * 2.0 * x[i] / R2;
        for (int i = 0; i < n_; ++i)
            for (int j = i; j < n_; ++j) {
                double m = pqq * 4.0 * x[i] * x[j] / (R2 * R2);
                if (i == j) m += pq * 2.0 / R2;
                r.dd[i][j] = m;
                r.dd[j][i] = m;
            }
        break;
    }
    }
    return r;
}

Jet2 TestFunction::eval(const Vec& x, double t) const {
    Jet2 r;
    if (zero_) return r;
    r.v = amp_;
    for (const auto& f : factors_) r = r * eval_factor(f, x, t);
    return r;
}

bool TestFunction::is_zero() const { return zero_; }

std::vector<TestFunction> make_test_suite(int count, std::uint64_t seed, int n, double T) {
    if (count < 0) throw ConfigError("suite count must be nonnegative");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto uni = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };

    std::vector<TestFunction> suite;
    suite.reserve(static_cast<size_t>(count));
    for (int m = 0; m < count; ++m) {
        const int nfac = 1 + static_cast<int>(unit(rng) * 3.0); // 1..3 factors
        TestFunction f = TestFunction::constant(1.0, n);
        for (int fi = 0; fi < nfac; ++fi) {
            const double pick = unit(rng);
            if (pick < 1.0 / 3.0) {
                std::array<int, 4> pw{};
                std::array<double, 4> sh{};
                int total = 0;
                for (int i = 0; i < 4; ++i) {
                    if (i == 2 && n == 2) continue;
                    const int p = static_cast<int>(unit(rng) * 2.0); // 0 or 1
                    if (total + p <= 3) {
                        pw[i] = p;
                        total += p;
                    }
                    sh[i] = uni(-0.5, 0.5);
                }
                if (total == 0) pw[3] = 1; // never a bare constant factor
                TestFunction g = TestFunction::poly(pw, sh, n);
                f *= g;
            } else if (pick < 2.0 / 3.0) {
                std::array<double, 4> c{}, w{};
                for (int i = 0; i < n; ++i) {
                    c[i] = uni(-0.4, 0.4);
                    w[i] = uni(0.5, 1.5);
                }
                c[3] = uni(0.0, 0.6 * T);
                w[3] = uni(0.8, 0.35 * T);
                TestFunction g = TestFunction::gaussian(c, w, n);
                f *= g;
            } else {
                std::array<double, 4> k{};
                for (int i = 0; i < n; ++i) k[i] = uni(-2.0, 2.0);
                k[3] = uni(-2.0, 2.0);
                TestFunction g = TestFunction::trig(k, uni(0.0, 6.283185307179586), n);
                f *= g;
            }
        }
        f.scale(uni(0.5, 2.0) * (unit(rng) < 0.5 ? -1.0 : 1.0));
        f.apply_cutoff(1.35);
        suite.push_back(std::move(f));
    }
    return suite;
}

} // namespace fas
