#pragma once

#include "fas/grid.hpp"
#include "fas/potential.hpp"
#include "fas/testfunction.hpp"
#include "fas/weight.hpp"

#include <cstddef>
#include <vector>

namespace fas {

// ---- pointwise operators on analytic jets ---------------------------------

// wave operator d_tt - lap applied to a jet
double apply_P(const Jet2& v, int n);

// P_s^+ z = z'' - lap z + s^2 (phi_t^2 - |grad phi|^2) z
double apply_Ps_plus(const Jet2& z, const WeightEval& e, double s, int n);

// P_s^- z = -2 s (z' phi_t - <grad z, grad phi>) - s (phi_tt - lap phi) z
double apply_Ps_minus(const Jet2& z, const WeightEval& e, double s, int n);

// ---- log-space conjugation of sampled fields ------------------------------

// z = e^{s phi} v held as sign * exp(logmag); the exponent is only realized
// by materialize() under a caller-chosen offset.
struct ConjugatedField {
    std::vector<double> logmag;    // log|v| + s phi, -inf where v == 0
    std::vector<signed char> sign; // -1, 0, +1
    double s = 0.0;
};

ConjugatedField conjugate(const std::vector<double>& v, const SpaceTimeGrid& grid,
                          const CarlemanWeight& wt, double s);

// inverse of conjugate: recovers v from the log-space representation
std::vector<double> conjugate_back(const ConjugatedField& z, const SpaceTimeGrid& grid,
                                   const CarlemanWeight& wt);

// materialize sign * exp(logmag - offset); throws NumericalCheckError with the
// offending exponent if a value still overflows after offsetting
std::vector<double> materialize(const ConjugatedField& z, double offset);

// ---- identity and estimate checks -----------------------------------------

// Max over grid nodes of |e^{s phi} P(e^{-s phi} z) - (P_s^+ z + P_s^- z)|
// scaled by the sum of the constituent term magnitudes at that node. The
// left side goes through the jet product algebra, the right through the
// assembled operators, so the residual measures implementation consistency.
struct ConjugationResidual {
    double max_rel = 0.0;
    Vec argmax_x{};
    double argmax_t = 0.0;
};

ConjugationResidual conjugation_identity_check(const TestFunction& z, const CarlemanWeight& wt,
                                               double s, const SpaceTimeGrid& grid,
                                               int tstride = 1);

// One weighted-estimate evaluation: left side, the three right-side pieces,
// and their ratio. Integrals are stored as log(value) + offset with a shared
// offset = max of 2 s phi over the closed cylinder, so ratios are exact while
// raw magnitudes never overflow.
struct SideEntry {
    double offset = 0.0;
    double log_lhs = 0.0; // log of integral in offset units: log(I) where
    double log_rhs_volume = 0.0; // I = e^{-offset} * (true integral)
    double log_rhs_sigma = 0.0;
    double log_rhs_top = 0.0;
    double ratio = 0.0; // lhs / (volume + sigma + top), offset-free
    bool all_zero = false;
    bool under_resolved = false;
};

SideEntry carleman_sides(const TestFunction& v, const CarlemanWeight& wt, double s,
                         const SpaceTimeGrid& grid, const Potential* remark_potential = nullptr,
                         double cell_ratio_limit = 10.0);

struct SweepRow {
    int fn_index = 0;
    double s = 0.0;
    SideEntry entry;
};

struct SweepReport {
    std::vector<double> s_values;
    std::vector<double> max_ratio; // per s, 0 when every row was zero
    double c_emp = 0.0;            // max over s of max_ratio
    double spread = 0.0;           // max/min over s of max_ratio (1 when flat)
    std::vector<SweepRow> rows;
    bool empty = false; // no usable (nonzero) rows; still a valid report
    bool under_resolved = false;
};

// jobs = 0 uses every hardware thread; rows are computed independently and
// merged in index order, so the report is deterministic for any job count.
SweepReport carleman_sweep(const std::vector<TestFunction>& suite, const CarlemanWeight& wt,
                           const std::vector<double>& s_values, const SpaceTimeGrid& grid,
                           const Potential* remark_potential = nullptr, int jobs = 0);

// Quadrature check of the exact integration-by-parts identity
//   (P_s^+ z, P_s^- z)_Q = J1 + J2 + J3 + B0 + D0.
// d0 is assembled twice: once with the two transcription slips repaired
// (d0, used for residual) and once exactly as published (d0_printed, reported
// alongside). floor keeps the residual defined when both sides vanish.
struct IbpReport {
    double lhs = 0.0;
    double j1 = 0.0, j2 = 0.0, j3 = 0.0;
    double b0 = 0.0;
    double d0 = 0.0;
    double d0_printed = 0.0;
    double residual = 0.0;
    double residual_printed = 0.0;
    double floor_used = 0.0;
    bool under_resolved = false;
};

IbpReport ibp_identity_check(const TestFunction& z, const CarlemanWeight& wt, double s,
                             const SpaceTimeGrid& grid);

// Volume J-terms with the psi-level decomposition of J2 and pointwise
// statistics of b = psi_t^2 - |grad psi|^2, including the measure fraction of
// Q^eta = {|b| <= eta |grad psi|^2} and an empirical constant for the
// |J3| <= C lambda int (s lambda phi)^2 |z|^2 bound.
struct JTermsReport {
    double j1 = 0.0, j2 = 0.0, j3 = 0.0;
    double j2_curvature = 0.0; // 2 int (s l phi)^3 [psi_tt psi_t^2 + hess(psi)(g,g)] z^2
    double j2_cross = 0.0;     // 2 int (s l phi)^3 [-2 psi_t <grad psi, grad psi_t>] z^2
    double j2_bsquare = 0.0;   // 2 lambda int (s l phi)^3 b^2 z^2
    double b_min = 0.0, b_max = 0.0, b_mean = 0.0;
    double q_eta_fraction = 0.0;
    double j3_c = 0.0;         // max |(s/2) box2| / (lambda (s lambda phi)^2) over Q
    double j3_bound_rhs = 0.0; // j3_c * lambda * int (s lambda phi)^2 z^2
    bool j3_bound_holds = false;
};

JTermsReport j_terms(const TestFunction& z, const CarlemanWeight& wt, double s,
                     const SpaceTimeGrid& grid, double eta = 0.25);

// Energy-estimate ratio checks. The T-side compares the slice energy at
// t = tau with the characteristic-base, volume and lateral contributions;
// the characteristic side compares the weighted base energy with the
// weighted volume and lateral pieces (normal-derivative term included).
struct EnergyReport {
    double lhs = 0.0;
    double rhs = 0.0;
    double ratio = 0.0;
    bool zero = false; // both sides vanished; ratio not meaningful
};

EnergyReport energy_check_T(const TestFunction& v, const SpaceTimeGrid& grid, double tau);

EnergyReport energy_check_char(const TestFunction& v, const CarlemanWeight& wt, double s,
                               const SpaceTimeGrid& grid);

} // namespace fas
