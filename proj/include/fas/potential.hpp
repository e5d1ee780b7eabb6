#pragma once

#include "fas/grid.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace fas {

// One smooth bump c * exp(-1/(1 - |x-x0|^2/r^2)) supported in the ball of
// radius r around x0; identically zero outside.
struct Bump {
    Vec center{0, 0, 0};
    double r = 0.5;
    double amp = 1.0;
};

// Sum of bumps, supported strictly inside the unit ball. Values, gradients
// and Laplacians are closed-form, so line integrals and manufactured
// forcings carry no sampling error.
class Potential {
  public:
    Potential() = default; // identically zero
    Potential(std::vector<Bump> bumps, int n);

    double value(const Vec& x) const;
    Vec grad(const Vec& x) const;
    double laplacian(const Vec& x) const;

    double sup_bound() const { return sup_bound_; }
    const std::vector<Bump>& bumps() const { return bumps_; }
    bool is_zero() const { return bumps_.empty(); }
    int dim() const { return n_; }

  private:
    std::vector<Bump> bumps_;
    int n_ = 2;
    double sup_bound_ = 0.0;
};

Potential make_potential(std::vector<Bump> bumps, int n);

// Integral of f over [lo, hi] by adaptive Simpson subdivision.
double adaptive_integral(const std::function<double(double)>& f, double lo,
                         double hi, double tol = 1e-10);

// int_{-inf}^{x_n} V(x', s) ds along the incident direction; the lower limit
// is effectively -1 by compact support. Multiplying by -1/2 gives the
// characteristic datum carried on {t = x_n}.
double halfline_integral(const Potential& V, const Vec& x);

double l2_norm_B(const Potential& V, const SpaceTimeGrid& grid);

struct EnsembleSpec {
    int count = 10;
    std::uint64_t seed = 1;
    int bumps_min = 1, bumps_max = 3;
    double center_max = 0.4;
    double r_min = 0.2, r_max = 0.4;
    double amp_max = 1.0; // amplitudes drawn from [-amp_max, amp_max]
};

std::vector<Potential> gen_ensemble(const EnsembleSpec& spec, int n);

} // namespace fas
