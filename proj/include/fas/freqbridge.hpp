#pragma once

#include "fas/grid.hpp"
#include "fas/wavesolver.hpp"

#include <complex>
#include <vector>

namespace fas {

// Boundary data moved to the frequency side: for each requested frequency,
// the transformed lateral values and their outward normal derivative at the
// sphere samples. Layout [ki * nsamples + i]. Only k > 0 is stored; for real
// time data the value at -k is the conjugate, so nothing is lost.
struct FrequencyTrace {
    std::vector<double> k;
    std::size_t nsamples = 0;
    std::vector<std::complex<double>> w_hat;
    std::vector<std::complex<double>> dnu_hat;
};

// Windowed discrete-time Fourier integral (kernel e^{+ikt}, trapezoid in t)
// of the lateral trace and its normal derivative. A cosine taper over the
// trailing `taper_fraction` of the record takes the data smoothly to zero at
// T, since the scattered field has not fully decayed there. Frequencies must
// be positive and below the lattice limit pi/dt. jobs = 0 uses all cores.
FrequencyTrace time_to_frequency(const BoundaryTrace& trace, const SpaceTimeGrid& grid,
                                 const std::vector<double>& k_list,
                                 double taper_fraction = 0.1, int jobs = 0);

// Outgoing-wave far-field pattern from first-order boundary data on the unit
// sphere, one complex amplitude per requested unit direction. k must be one
// of the frequencies stored in the trace; directions must be unit vectors.
// Throws when the sphere sampling resolves fewer than six points per
// wavelength at k. jobs = 0 uses all cores.
std::vector<std::complex<double>> far_field(const FrequencyTrace& ft, double k,
                                            const std::vector<Vec>& directions,
                                            const SpaceTimeGrid& grid, int jobs = 0);

} // namespace fas
