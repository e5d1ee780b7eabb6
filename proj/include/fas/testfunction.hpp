#pragma once

#include "fas/grid.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace fas {

// Value, gradient and Hessian of a scalar function of (x, t). Slots 0..2 are
// spatial (slot 2 unused when n == 2), slot 3 is time. Unused slots stay zero.
struct Jet2 {
    double v = 0.0;
    std::array<double, 4> d{};
    std::array<std::array<double, 4>, 4> dd{};

    Jet2 operator+(const Jet2& o) const;
    Jet2 operator-(const Jet2& o) const;
    Jet2 operator*(const Jet2& o) const; // product rule through second order
    Jet2 scaled(double c) const;
};

// Smooth space-time functions from a closed family: products of shifted
// polynomials (degree <= 3), Gaussians and trigonometric modes in (x, t),
// optionally times a spatial cutoff bump supported inside the box. Every
// derivative through second order is evaluated in closed form.
class TestFunction {
  public:
    static TestFunction zero(int n);
    static TestFunction constant(double c, int n);
    // prod_i (xi_i - shift_i)^powers_i over the four slots
    static TestFunction poly(std::array<int, 4> powers, std::array<double, 4> shift, int n);
    // exp(-sum_i (xi_i - center_i)^2 / width_i^2); width_i <= 0 skips a slot
    static TestFunction gaussian(std::array<double, 4> center, std::array<double, 4> width,
                                 int n);
    // sin(k . (x, t) + phase)
    static TestFunction trig(std::array<double, 4> k, double phase, int n);

    TestFunction& operator*=(const TestFunction& o);
    TestFunction& scale(double c);
    // multiply by the spatial bump exp(-1/(1 - |x|^2/R^2)), zero for |x| >= R
    TestFunction& apply_cutoff(double R);

    Jet2 eval(const Vec& x, double t) const;
    int dim() const { return n_; }
    bool is_zero() const;

  private:
    struct Factor {
        enum class Kind { Poly, Gauss, Trig, Cutoff } kind;
        std::array<int, 4> powers{};
        std::array<double, 4> a{}; // shifts / centers / wavevector
        std::array<double, 4> b{}; // unused / inverse width^2 / unused
        double phase = 0.0;        // trig only
        double R = 1.0;            // cutoff only
    };
    std::vector<Factor> factors_;
    double amp_ = 1.0;
    int n_ = 2;
    bool zero_ = false;

    Jet2 eval_factor(const Factor& f, const Vec& x, double t) const;
};

// Seeded random suite; every member carries the spatial cutoff so it decays
// toward the box edge but stays generically nonzero on the closed unit ball,
// its boundary pieces included. Wavenumbers and widths are kept moderate so
// an h = 1/32 grid resolves every member.
std::vector<TestFunction> make_test_suite(int count, std::uint64_t seed, int n, double T);

} // namespace fas
