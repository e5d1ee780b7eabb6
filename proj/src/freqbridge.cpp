#include "fas/freqbridge.hpp"
#include "fas/parallel.hpp"

#include <cmath>
#include <cstddef>
#include <numbers>

namespace fas {

namespace {

// Trailing cosine taper: 1 on the untapered part of [t0, T], rolling smoothly
// to 0 at T over the last `frac` of the record.
double taper_factor(double t, double t0, double T, double frac) {
    if (frac <= 0.0) return 1.0;
    const double start = T - frac * (T - t0);
    if (t <= start) return 1.0;
    const double s = (t - start) / (T - start);
    return 0.5 * (1.0 + std::cos(std::numbers::pi * s));
}

} // namespace

FrequencyTrace time_to_frequency(const BoundaryTrace& trace, const SpaceTimeGrid& grid,
                                 const std::vector<double>& k_list, double taper_fraction,
                                 int jobs) {
    const auto& sphere = grid.sphere_samples();
    const int n = grid.n();
    const std::size_t nlev = static_cast<std::size_t>(grid.nt()) + 1;
    const std::size_t nsamp = sphere.size();

    if (trace.s_w.size() != nsamp * nlev ||
        trace.s_grad.size() != trace.s_w.size() * static_cast<std::size_t>(n))
        throw ConfigError("time_to_frequency: trace does not match the grid");
    if (k_list.empty())
        throw ConfigError("time_to_frequency: frequency list is empty");
    if (!(taper_fraction >= 0.0 && taper_fraction < 1.0))
        throw ConfigError("time_to_frequency: taper fraction must lie in [0, 1)");
    const double nyquist = std::numbers::pi / grid.dt();
    for (double k : k_list) {
        if (!(k > 0.0))
            throw ConfigError("time_to_frequency: frequencies must be positive, negative "
                              "ones follow by conjugation");
        if (k > nyquist * (1.0 + 1e-12))
            throw ConfigError("time_to_frequency: k exceeds the lattice limit pi/dt");
    }

    // Trapezoid-in-time quadrature factor folded with the taper, per level.
    std::vector<double> fac(nlev);
    for (std::size_t j = 0; j < nlev; ++j) {
        const double edge = (j == 0 || j + 1 == nlev) ? 0.5 : 1.0;
        fac[j] = edge * grid.dt() *
                 taper_factor(grid.tcoord(static_cast<int>(j)), grid.t0(), grid.T(),
                              taper_fraction);
    }

    // Normal derivative of the trace at each lateral sample, reused per k.
    std::vector<double> dnu(nsamp * nlev);
    for (std::size_t i = 0; i < nsamp; ++i)
        for (std::size_t j = 0; j < nlev; ++j) {
            const std::size_t idx = i * nlev + j;
            double acc = 0.0;
            for (int c = 0; c < n; ++c)
                acc += trace.s_grad[idx * static_cast<std::size_t>(n) +
                                    static_cast<std::size_t>(c)] *
                       sphere[i].nu[static_cast<std::size_t>(c)];
            dnu[idx] = acc;
        }

    FrequencyTrace ft;
    ft.k = k_list;
    ft.nsamples = nsamp;
    ft.w_hat.assign(k_list.size() * nsamp, {0.0, 0.0});
    ft.dnu_hat.assign(k_list.size() * nsamp, {0.0, 0.0});

    parallel_rows(k_list.size(), jobs, [&](std::size_t ki) {
        std::vector<std::complex<double>> phase(nlev);
        for (std::size_t j = 0; j < nlev; ++j)
            phase[j] = fac[j] * std::polar(1.0, k_list[ki] * grid.tcoord(static_cast<int>(j)));
        for (std::size_t i = 0; i < nsamp; ++i) {
            std::complex<double> aw{0.0, 0.0}, ad{0.0, 0.0};
            const std::size_t base = i * nlev;
            for (std::size_t j = 0; j < nlev; ++j) {
                aw += trace.s_w[base + j] * phase[j];
                ad += dnu[base + j] * phase[j];
            }
            ft.w_hat[ki * nsamp + i] = aw;
            ft.dnu_hat[ki * nsamp + i] = ad;
        }
    });
    return ft;
}

std::vector<std::complex<double>> far_field(const FrequencyTrace& ft, double k,
                                            const std::vector<Vec>& directions,
                                            const SpaceTimeGrid& grid, int jobs) {
    const auto& sphere = grid.sphere_samples();
    const int n = grid.n();
    const std::size_t nsamp = sphere.size();
    const double pi = std::numbers::pi;

    if (ft.nsamples != nsamp || ft.w_hat.size() != ft.k.size() * nsamp ||
        ft.dnu_hat.size() != ft.w_hat.size())
        throw ConfigError("far_field: frequency trace does not match the grid");
    if (!(k > 0.0))
        throw ConfigError("far_field: k must be positive");
    std::size_t ki = ft.k.size();
    for (std::size_t i = 0; i < ft.k.size(); ++i)
        if (std::abs(ft.k[i] - k) <= 1e-12 * std::max(1.0, std::abs(k))) {
            ki = i;
            break;
        }
    if (ki == ft.k.size())
        throw ConfigError("far_field: k is not stored in the frequency trace");
    if (directions.empty())
        throw ConfigError("far_field: direction list is empty");
    for (const Vec& d : directions) {
        const double len = std::sqrt(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]);
        if (std::abs(len - 1.0) > 1e-9)
            throw ConfigError("far_field: directions must be unit vectors");
        if (n == 2 && d[2] != 0.0)
            throw ConfigError("far_field: 2-D directions must have a zero third slot");
    }

    // Make sure the sphere quadrature resolves the oscillation e^{-ik xhat.y}:
    // at least six sample points per wavelength 2 pi / k along the surface.
    const double spacing = (n == 2) ? 2.0 * pi / static_cast<double>(nsamp)
                                    : std::sqrt(4.0 * pi / static_cast<double>(nsamp));
    const double ppw = (2.0 * pi / k) / spacing;
    if (ppw < 6.0)
        throw ConfigError("far_field: sphere sampling is below six points per wavelength");

    const std::complex<double> ik{0.0, k};
    const std::complex<double> gamma =
        (n == 2) ? std::polar(1.0 / std::sqrt(8.0 * pi * k), pi / 4.0)
                 : std::complex<double>{1.0 / (4.0 * pi), 0.0};

    std::vector<std::complex<double>> out(directions.size());
    parallel_rows(directions.size(), jobs, [&](std::size_t di) {
        const Vec& d = directions[di];
        std::complex<double> acc{0.0, 0.0};
        for (std::size_t i = 0; i < nsamp; ++i) {
            const Vec& y = sphere[i].x;
            const double dy = d[0] * y[0] + d[1] * y[1] + d[2] * y[2];
            const double dnu_dir = d[0] * sphere[i].nu[0] + d[1] * sphere[i].nu[1] +
                                   d[2] * sphere[i].nu[2];
            const std::complex<double> kernel = std::polar(1.0, -k * dy);
            acc += sphere[i].weight *
                   (ft.w_hat[ki * nsamp + i] * (-ik * dnu_dir) - ft.dnu_hat[ki * nsamp + i]) *
                   kernel;
        }
        out[di] = gamma * acc;
    });
    return out;
}

} // namespace fas
