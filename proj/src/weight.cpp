#include "fas/weight.hpp"
#include "fas/potential.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fas {

CarlemanWeight::CarlemanWeight(int n, WeightParams p) : n_(n), p_(p) {
    if (n != 2 && n != 3) throw ConfigError("weight: dimension must be 2 or 3");
    if (!(p.a > 1.0)) throw ConfigError("weight: drift center a must exceed 1");
    if (!(p.lambda > 0.0)) throw ConfigError("weight: lambda must be positive");
    if (!(p.T > 1.0)) throw ConfigError("weight: final time must exceed 1");
}

double CarlemanWeight::psi(const Vec& x, double t) const {
    const double pa = p_.a - x[n_ - 1];
    const double u = t - x[n_ - 1];
    double rho2 = 0.0;
    for (int i = 0; i < n_ - 1; ++i) rho2 += x[i] * x[i];
    return 5.0 * pa * pa + 5.0 * rho2 - u * u;
}

double CarlemanWeight::phi(const Vec& x, double t) const {
    return std::exp(p_.lambda * psi(x, t));
}

double CarlemanWeight::log_weight2(const Vec& x, double t, double s) const {
    return 2.0 * s * phi(x, t);
}

WeightEval CarlemanWeight::eval(const Vec& x, double t) const {
    const int n = n_;
    const double lam = p_.lambda;
    const double pa = p_.a - x[n - 1];
    const double u = t - x[n - 1];

    WeightEval e;
    double rho2 = 0.0;
    for (int i = 0; i < n - 1; ++i) rho2 += x[i] * x[i];

    e.psi = 5.0 * pa * pa + 5.0 * rho2 - u * u;
    e.psi_t = -2.0 * u;
    e.psi_tt = -2.0;
    for (int i = 0; i < n - 1; ++i) e.grad_psi[i] = 10.0 * x[i];
    e.grad_psi[n - 1] = -10.0 * pa + 2.0 * u;
    e.grad_psi_t[n - 1] = 2.0;
    for (int i = 0; i < n - 1; ++i) e.hess_psi_diag[i] = 10.0;
    e.hess_psi_diag[n - 1] = 8.0;
    e.lap_psi = 10.0 * (n - 1) + 8.0;

    const double gn = e.grad_psi[n - 1];
    const double gg = 100.0 * rho2 + gn * gn; // |grad psi|^2
    e.b = e.psi_t * e.psi_t - gg;
    e.b_t = 40.0 * pa;
    e.b_tt = 0.0;
    for (int i = 0; i < n - 1; ++i) e.grad_b[i] = -200.0 * x[i];
    e.grad_b[n - 1] = 4.0 * e.psi_t - 16.0 * gn;
    e.lap_b = -200.0 * (n - 1) - 120.0;

    e.phi = std::exp(lam * e.psi);
    const double lphi = lam * e.phi;
    e.phi_t = lphi * e.psi_t;
    e.phi_tt = lphi * (e.psi_tt + lam * e.psi_t * e.psi_t);
    e.phi_ttt = lam * lphi * e.psi_t * (3.0 * e.psi_tt + lam * e.psi_t * e.psi_t);
    for (int i = 0; i < n; ++i) e.grad_phi[i] = lphi * e.grad_psi[i];
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double h = lam * e.grad_psi[i] * e.grad_psi[j];
            if (i == j) h += e.hess_psi_diag[i];
            e.hess_phi[i][j] = lphi * h;
        }
    e.lap_phi = lphi * (e.lap_psi + lam * gg);
    for (int i = 0; i < n; ++i)
        e.grad_phi_t[i] = lphi * (lam * e.psi_t * e.grad_psi[i] + e.grad_psi_t[i]);
    e.lap_phi_t = lam * lphi * (e.psi_t * (e.lap_psi + lam * gg) + 4.0 * gn);

    e.m_factor = e.psi_tt - e.lap_psi + lam * e.b;
    e.wm = lphi * e.m_factor;
    for (int i = 0; i < n; ++i)
        e.grad_wm[i] = lam * lphi * (e.grad_psi[i] * e.m_factor + e.grad_b[i]);
    e.wm_t = lam * lphi * (e.psi_t * e.m_factor + e.b_t);

    double gpsib = 0.0;
    for (int i = 0; i < n; ++i) gpsib += e.grad_psi[i] * e.grad_b[i];
    e.box2 = lam * lphi *
             (e.m_factor * e.m_factor + 2.0 * lam * (e.psi_t * e.b_t - gpsib) +
              (e.b_tt - e.lap_b));
    e.G = lam * lphi * e.phi * e.b;
    return e;
}

GeometryReport geometry_check(double T, double a, double lambda, int nscan) {
    if (!(T > 1.0)) throw ConfigError("geometry_check: T must exceed 1");
    if (!(a > 1.0)) throw ConfigError("geometry_check: a must exceed 1");
    if (!(lambda > 0.0)) throw ConfigError("geometry_check: lambda must be positive");
    if (nscan < 3) throw ConfigError("geometry_check: scan resolution too small");

    GeometryReport r;
    r.margin = (T - 1.0) * (T - 1.0) - (20.0 * a + 5.0);
    r.ok = r.margin > 0.0;

    double min_gamma = std::numeric_limits<double>::infinity();
    double max_top = -std::numeric_limits<double>::infinity();
    const int nr = nscan / 2 + 1;
    for (int ix = 0; ix < nscan; ++ix) {
        const double xn = -1.0 + 2.0 * ix / (nscan - 1);
        const double rmax = std::sqrt(std::max(0.0, 1.0 - xn * xn));
        for (int ir = 0; ir < nr; ++ir) {
            const double rho = rmax * ir / (nr - 1);
            const double psi_gamma = 5.0 * (a - xn) * (a - xn) + 5.0 * rho * rho;
            const double psi_top = psi_gamma - (T - xn) * (T - xn);
            min_gamma = std::min(min_gamma, std::exp(lambda * psi_gamma));
            max_top = std::max(max_top, std::exp(lambda * psi_top));
        }
    }
    r.min_gamma_phi = min_gamma;
    r.max_top_phi = max_top;
    r.alpha = min_gamma - max_top;
    return r;
}

namespace {

// integrand of the h(s) scan at one node, guarding the inf * 0 corner when
// the on-cone factor expm1(-lambda u^2) is exactly zero
inline double hs_integrand(double s, double AB, double em) {
    if (em == 0.0) return 1.0;
    return std::exp(2.0 * s * AB * em);
}

} // namespace

HsReport h_s_decay(const std::vector<double>& s_list, double T, double a, double lambda,
                   int nrho, int nxn, int nt) {
    if (s_list.empty()) throw ConfigError("h_s_decay: empty s list");
    for (size_t i = 0; i < s_list.size(); ++i) {
        if (!(s_list[i] > 0.0)) throw ConfigError("h_s_decay: s values must be positive");
        if (i > 0 && !(s_list[i] > s_list[i - 1]))
            throw ConfigError("h_s_decay: s values must be strictly increasing");
    }
    if (!(T > 1.0) || !(a > 1.0) || !(lambda > 0.0))
        throw ConfigError("h_s_decay: need T > 1, a > 1, lambda > 0");
    if (nrho < 2 || nxn < 2 || nt < 3) throw ConfigError("h_s_decay: lattice too small");

    HsReport rep;
    rep.s = s_list;
    rep.h.assign(s_list.size(), 0.0);

    const double dt = T / (nt - 1);
    std::vector<double> em(static_cast<size_t>(nt));
    for (int ix = 0; ix < nxn; ++ix) {
        const double xn = -1.0 + 2.0 * ix / (nxn - 1);
        for (int j = 0; j < nt; ++j) {
            const double u = j * dt - xn;
            em[static_cast<size_t>(j)] = std::expm1(-lambda * u * u);
        }
        const double rmax = std::sqrt(std::max(0.0, 1.0 - xn * xn));
        for (int ir = 0; ir < nrho; ++ir) {
            const double rho = rmax * ir / (nrho - 1);
            const double psi_d = 5.0 * (a - xn) * (a - xn) + 5.0 * rho * rho;
            const double AB = std::exp(std::min(lambda * psi_d, 705.0));
            for (size_t is = 0; is < s_list.size(); ++is) {
                const double s = s_list[is];
                double acc = 0.5 * (hs_integrand(s, AB, em[0]) +
                                    hs_integrand(s, AB, em[static_cast<size_t>(nt - 1)]));
                for (int j = 1; j < nt - 1; ++j)
                    acc += hs_integrand(s, AB, em[static_cast<size_t>(j)]);
                rep.h[is] = std::max(rep.h[is], acc * dt);
            }
        }
    }

    rep.strictly_decreasing = true;
    for (size_t i = 1; i < rep.h.size(); ++i)
        if (!(rep.h[i] < rep.h[i - 1])) rep.strictly_decreasing = false;
    return rep;
}

double hs_point_integral(double rho, double xn, double T, double a, double lambda, double s) {
    if (!(T > 1.0) || !(lambda > 0.0) || !(s > 0.0))
        throw ConfigError("hs_point_integral: need T > 1, lambda > 0, s > 0");
    const double psi_d = 5.0 * (a - xn) * (a - xn) + 5.0 * rho * rho;
    const double AB = std::exp(std::min(lambda * psi_d, 705.0));
    auto f = [&](double t) {
        const double u = t - xn;
        return hs_integrand(s, AB, std::expm1(-lambda * u * u));
    };
    // split at the peak t = x_n so the adaptive rule refines toward it from
    // both sides instead of missing a narrow spike in a long interval
    if (xn > 0.0 && xn < T)
        return adaptive_integral(f, 0.0, xn, 1e-13) + adaptive_integral(f, xn, T, 1e-13);
    return adaptive_integral(f, 0.0, T, 1e-13);
}

} // namespace fas
