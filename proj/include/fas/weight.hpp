#pragma once

#include "fas/grid.hpp"

#include <vector>

namespace fas {

struct WeightParams {
    double a = 1.1;
    double lambda = 0.1;
    double T = 6.5;
};

// Pointwise evaluation of the convexified weight
//   psi(x, t) = 5 (a - x_n)^2 + 5 |x'|^2 - (t - x_n)^2,   phi = exp(lambda psi)
// together with every derivative combination the quadratic-form bookkeeping
// needs. All fields are closed-form; the suffix _t marks a time derivative,
// wm is the box-operator image phi_tt - lap_phi, box2 its second image, and
// G = phi_t^2 - |grad phi|^2 is the principal-symbol coefficient.
struct WeightEval {
    double psi = 0, psi_t = 0, psi_tt = 0;
    Vec grad_psi{};
    Vec grad_psi_t{};
    std::array<double, 3> hess_psi_diag{};
    double lap_psi = 0;
    double b = 0, b_t = 0, b_tt = 0; // b = psi_t^2 - |grad psi|^2
    Vec grad_b{};
    double lap_b = 0;

    double phi = 0, phi_t = 0, phi_tt = 0, phi_ttt = 0;
    Vec grad_phi{};
    std::array<std::array<double, 3>, 3> hess_phi{};
    double lap_phi = 0;
    Vec grad_phi_t{};
    double lap_phi_t = 0;

    double m_factor = 0; // psi_tt - lap_psi + lambda b, so wm = lambda phi m_factor
    double wm = 0;       // phi_tt - lap_phi
    Vec grad_wm{};
    double wm_t = 0;
    double box2 = 0; // (d_tt - lap)^2 phi
    double G = 0;    // phi_t^2 - |grad phi|^2 = lambda^2 phi^2 b
};

class CarlemanWeight {
  public:
    CarlemanWeight(int n, WeightParams p);

    WeightEval eval(const Vec& x, double t) const;
    double psi(const Vec& x, double t) const;
    double phi(const Vec& x, double t) const;
    // log of the squared weight, 2 s phi(x, t); callers keep exponents in log
    // space and rescale by a shared offset before exponentiating
    double log_weight2(const Vec& x, double t, double s) const;

    const WeightParams& params() const { return p_; }
    int dim() const { return n_; }

  private:
    int n_;
    WeightParams p_;
};

struct GeometryReport {
    bool ok = false;         // closed-form window condition (T-1)^2 > 20 a + 5
    double margin = 0.0;     // (T-1)^2 - (20 a + 5)
    double alpha = 0.0;      // min over the characteristic base of phi minus
                             // max over the final slice of phi, dense scan
    double min_gamma_phi = 0.0;
    double max_top_phi = 0.0;
};

// The condition is one-directional: ok = true guarantees alpha > 0, while a
// failed margin may still leave a positive alpha on the scanned lattice.
GeometryReport geometry_check(double T, double a, double lambda = 0.1, int nscan = 801);

struct HsReport {
    std::vector<double> s;
    std::vector<double> h;
    bool strictly_decreasing = false;
};

// h(s) = sup over the closed ball of the time integral from 0 to T of
// exp(2 s (phi(x, t) - phi(x, x_n))), evaluated on a dense (rho, x_n) lattice
// with a uniform trapezoid rule in t. The integrand peaks on the cone t = x_n
// where the exponent vanishes; everywhere else it decays once s grows.
HsReport h_s_decay(const std::vector<double>& s_list, double T, double a, double lambda,
                   int nrho = 161, int nxn = 321, int nt = 4001);

// Single-point version of the h(s) integrand with adaptive quadrature, sharp
// enough to resolve the narrow peak at t = x_n when s lambda phi_d is large.
double hs_point_integral(double rho, double xn, double T, double a, double lambda, double s);

} // namespace fas
