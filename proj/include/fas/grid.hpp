#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fas {

// Spatial points carry three slots so 2-D and 3-D share one layout; slot n..2
// is zero when n == 2. The incident direction is fixed to the last spatial
// axis e_n, so x[n-1] is always "x_n".
using Vec = std::array<double, 3>;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NumericalCheckError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct GridConfig {
    int n = 2;                  // spatial dimension, 2 or 3
    double L = 1.5;             // spatial box is [-L, L]^n
    double h = 1.0 / 32;        // spatial step
    double dt_factor = 0.5;     // dt = dt_factor * h before end-snapping
    double t0 = -1.75;          // start of the time window
    double T = 6.5;             // end of the time window
    double sponge_width = 0.35; // absorbing layer depth from each box face
};

struct SphereSample {
    Vec x;         // point on the unit sphere |x| = 1
    Vec nu;        // outward unit normal (equals x on the sphere)
    double weight; // surface quadrature weight
};

enum class Region { Q, Sigma, Gamma, TopSlice, BallSlice };

// Uniform Cartesian grid on [-L,L]^n x [t0,T] together with quadrature over
// the space-time cylinder Q = {x in B, x_n <= t <= T}, its lateral boundary
// Sigma, the characteristic slice Gamma = {t = x_n}, and the top slice {t=T}.
// Gamma carries the sqrt(2) measure of the 45-degree plane. Immutable after
// construction.
class SpaceTimeGrid {
  public:
    explicit SpaceTimeGrid(const GridConfig& cfg);

    int n() const { return n_; }
    double L() const { return L_; }
    double h() const { return h_; }
    double dt() const { return dt_; }
    double t0() const { return t0_; }
    double T() const { return T_; }
    double sponge_width() const { return sponge_width_; }
    int nx() const { return nx_; }                // nodes per spatial axis
    int nt() const { return nt_; }                // time steps; nt+1 levels
    std::size_t nspace() const { return nspace_; } // nx^n

    double xcoord(int i) const { return -L_ + i * h_; }
    double tcoord(int j) const { return t0_ + j * dt_; }

    std::size_t flat(int i0, int i1, int i2 = 0) const {
        return static_cast<std::size_t>(i0) +
               static_cast<std::size_t>(nx_) *
                   (static_cast<std::size_t>(i1) +
                    static_cast<std::size_t>(nx_) * static_cast<std::size_t>(i2));
    }
    Vec point(std::size_t flat_idx) const;
    // x_n of a node, i.e. the coordinate along the incident direction.
    double xn_of(std::size_t flat_idx) const { return point(flat_idx)[n_ - 1]; }

    // Ball-slice weight: h^n times the clamped fraction of the node's cell
    // inside the unit ball (0 for nodes more than half a cell outside).
    double ball_weight(std::size_t flat_idx) const { return wB_[flat_idx]; }
    const std::vector<std::size_t>& ball_nodes() const { return ball_nodes_; }

    // Overlap of the time cell [t_j - dt/2, t_j + dt/2] with [xn, T]; these
    // weights integrate constants over [xn, T] exactly.
    double time_weight(double xn, int j) const;

    const std::vector<SphereSample>& sphere_samples() const { return sphere_; }

    // Exhaustive node masks (index pairs), used by tests and mask-level
    // consumers. Gamma: x in B and |t - x_n| <= dt/2.
    std::vector<std::pair<std::size_t, int>> gamma_mask() const;

    // --- quadrature over analytic integrands -------------------------------
    // f(x, t): evaluated exactly at quadrature nodes (no interpolation).
    double quad_Q(const std::function<double(const Vec&, double)>& f) const;
    double quad_Sigma(const std::function<double(const Vec&, double)>& f) const;
    double quad_Gamma(const std::function<double(const Vec&, double)>& f) const;
    double quad_Tslice(const std::function<double(const Vec&, double)>& f) const;
    double quad_Bslice(const std::function<double(const Vec&, double)>& f,
                       double t) const;

    // --- quadrature over sampled space-time fields -------------------------
    // field has (nt+1) * nspace entries, level-major. Sigma values are
    // multilinearly interpolated in space, Gamma values linearly in time.
    double quad(const std::vector<double>& field, Region r) const;

    // Second-order differentiation along a spatial axis (0..n-1) or time
    // (axis == n): centered interior, one-sided at the edges.
    std::vector<double> diff(const std::vector<double>& field, int axis) const;

    // Multilinear spatial interpolation on one time level.
    double interp_space(const double* level, const Vec& x) const;
    // Space-time interpolation (linear in t between levels).
    double interp(const std::vector<double>& field, const Vec& x, double t) const;

  private:
    int n_;
    double L_, h_, dt_, t0_, T_, sponge_width_;
    int nx_, nt_;
    std::size_t nspace_;
    std::vector<double> wB_;
    std::vector<std::size_t> ball_nodes_;
    std::vector<SphereSample> sphere_;
};

// Gauss-Legendre nodes/weights on [-1, 1] (used for the 3-D polar angle).
void gauss_legendre(int m, std::vector<double>& nodes, std::vector<double>& weights);

} // namespace fas
