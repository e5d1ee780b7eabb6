#pragma once

#include "fas/grid.hpp"
#include "fas/potential.hpp"

#include <string>
#include <vector>

namespace fas {

// Scattered smooth field behind the incident front, sampled on the full
// space-time lattice (level-major, (nt+1) * nspace entries). The incidence
// direction is fixed to the last spatial axis throughout.
struct WaveField {
    std::vector<double> u;
    double eps = 0.0;          // pulse regularization width, time units
    std::string potential_ref; // short identifier of the potential used
};

// Leapfrog solve of  u_tt - lap u + V u = -V(x) delta_eps(t - x_n)  with zero
// data at t0, centered spatial stencil, graded damping layer at the box edge.
// delta_eps is a unit-mass Gaussian of width eps. source_scale multiplies the
// pulse only, not the zeroth-order V u term, so the solution is linear in it.
// Throws ConfigError when the pulse is unresolved (eps < 2 dt), when the
// window starts too late (t0 > -1 - 5 eps), or when the step violates the
// CFL bound.
WaveField solve_scattered(const Potential& V, const SpaceTimeGrid& grid, double eps,
                          double sponge_strength = 30.0, double source_scale = 1.0);

// Trace on the characteristic surface shifted forward by offset * eps, where
// the smeared jump has settled: values approximate u(x, x_n+). Time
// derivative and x_n derivative are centered-differenced on the lattice and
// then interpolated to the sample time. Nodes whose sample time lands past T
// are flagged and zeroed; offset must be at least 4.
struct CharTrace {
    std::vector<double> w;    // per spatial node, 0 outside the ball
    std::vector<double> w_t;
    std::vector<double> w_xn;
    std::vector<unsigned char> past_T; // 1 where x_n + offset*eps > T
    double offset = 0.0;               // in eps units
};

CharTrace characteristic_trace(const WaveField& f, const SpaceTimeGrid& grid, double offset);

// First-order trace data on the lateral boundary (sample-major over time
// levels), the characteristic base, and the final slice. Gradient components
// are packed contiguously per sample point.
struct BoundaryTrace {
    // lateral: index [i * (nt+1) + j] for sphere sample i, level j
    std::vector<double> s_w, s_wt;
    std::vector<double> s_grad; // [(i * (nt+1) + j) * n + k]
    // characteristic base: per spatial node, 0 outside the ball
    std::vector<double> g_w, g_wt;
    std::vector<double> g_grad; // [p * n + k]
    // final slice t = T: per spatial node
    std::vector<double> t_w, t_wt;
    std::vector<double> t_grad; // [p * n + k]
};

BoundaryTrace boundary_trace(const WaveField& f, const SpaceTimeGrid& grid);

// Componentwise a - b; traces are linear in the field, so this is the trace
// of the difference field.
BoundaryTrace trace_difference(const BoundaryTrace& a, const BoundaryTrace& b);

// sqrt of the lateral surface integral of |grad w|^2 + |w_t|^2 + |w|^2.
double h1_sigma_norm(const BoundaryTrace& tr, const SpaceTimeGrid& grid);

// Manufactured-solution error: forcing chosen so that cos(t) * (radial bump)
// solves the equation with potential V; returns the relative L2(ball) error
// at the level closest to t_probe.
double mms_error(const Potential& V, const SpaceTimeGrid& grid, double t_probe = 2.0);

// Damping-layer audit: solves the same scattering problem on the given box
// and on a box enlarged enough that no edge reflection reaches the ball
// within the window, and returns the max over ball nodes and times of the
// difference, relative to the max field amplitude.
double sponge_reflection(const GridConfig& base, const Potential& V, double eps,
                         double sponge_strength = 30.0);

} // namespace fas
