#pragma once

#include "fas/grid.hpp"
#include "fas/potential.hpp"
#include "fas/wavesolver.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace fas {

// One stability pair: compares the potential gap against the lateral
// first-order trace data of the difference field.
struct PairRecord {
    int id1 = 0, id2 = 0;
    double dv_norm = 0.0;    // L2(ball) norm of V1 - V2
    double trace_norm = 0.0; // H1(lateral) norm of the difference trace
    double ratio = 0.0;      // dv_norm / trace_norm when retained
    bool skipped = false;
    std::string skip_reason;
};

struct StabilityReport {
    std::vector<PairRecord> pairs;
    double c_emp = 0.0;  // max retained ratio
    double spread = 0.0; // max/min retained ratio
    int retained = 0;
    // provenance
    int n = 0;
    double h = 0.0, T = 0.0, eps = 0.0;
    std::uint64_t seed = 0;
};

// Generates 2*count seeded potentials and pairs them consecutively.
std::vector<std::pair<Potential, Potential>> make_pairs(const EnsembleSpec& spec, int count,
                                                        int n);

// For each pair: two scattering solves, difference trace, both norms and the
// ratio. Pairs whose potential gap is below 1e-3 of the largest gap in the
// batch are skipped before any solve (the ratio would be noise-dominated);
// pairs whose trace norm sits at the solver floor are skipped after.
// jobs = 0 uses the hardware thread count. Requires T > 6.
StabilityReport run_stability(const std::vector<std::pair<Potential, Potential>>& pairs,
                              const SpaceTimeGrid& grid, double eps,
                              double sponge_strength = 30.0, std::uint64_t seed = 0,
                              int jobs = 0);

// Recovery of the potential gap on the characteristic base from the settled
// difference trace: dv_rec = -2 (d/dx_n + d/dt) w sampled at t = x_n +
// offset*eps. dv_alt re-derives the same quantity by differencing the traced
// values along x_n (total derivative along the base), defined where both
// lattice neighbours carry valid trace values.
struct RecoveryRecord {
    std::vector<double> dv_rec;       // per spatial node, 0 outside the ball
    std::vector<double> dv_alt;       // alternative path, same layout
    std::vector<unsigned char> valid; // 1 where dv_rec is defined
    std::vector<unsigned char> valid_alt;
    double rel_l2 = 0.0;      // vs V1 - V2; absolute L2 when the gap is zero
    bool absolute_mode = false;
    double alt_gap = 0.0;     // L2 gap between the two paths / norm of dv_rec
    double offset = 0.0;      // in eps units
    double eps = 0.0;
};

RecoveryRecord run_trace_recovery(const Potential& V1, const Potential& V2,
                                  const SpaceTimeGrid& grid, double eps, double offset = 8.0,
                                  double sponge_strength = 30.0);

// Solves the same problem twice and compares full boundary traces; any gap
// above rounding scale throws NumericalCheckError (the pipeline must be
// deterministic). Also reports the sensitivity of the lateral trace to
// doubling the pulse width (eps vs 2 eps), relative to the trace norm.
struct UniquenessRecord {
    double repeat_gap = 0.0;      // max abs trace difference, repeat solve
    double amplitude = 0.0;       // max abs trace value, for scale
    double eps_sensitivity = 0.0; // H1(lateral) relative gap, eps vs 2 eps
    bool deterministic = false;
};

UniquenessRecord run_uniqueness_sanity(const Potential& V, const SpaceTimeGrid& grid, double eps,
                                       double sponge_strength = 30.0);

} // namespace fas
