#include "nlkg/probes.hpp"

#include <cmath>
#include <random>

#include "nlkg/errors.hpp"

namespace nlkg {

StateH make_gaussian_probe(const GridPtr& grid, const GaussianProbe& probe) {
    const double sigma = probe.sigma > 0.0 ? probe.sigma : grid->box_length() / 16.0;
    const int n = grid->points();
    const double len = grid->box_length();
    Field profile(grid);
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) {
            // Minimum-image distance keeps the profile periodic for off-centre probes.
            double dx = grid->coordinate(r) - probe.center_x;
            double dy = grid->coordinate(c) - probe.center_y;
            dx -= len * std::round(dx / len);
            dy -= len * std::round(dy / len);
            profile.at(r, c) = std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
        }
    }
    profile = dealias(profile);
    return {probe.amplitude * profile, probe.velocity_amplitude * profile};
}

Field make_random_field(const GridPtr& grid, double cutoff, std::uint64_t seed) {
    if (!(cutoff > 0.0)) throw InvalidInput("make_random_field: cutoff must be positive");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Spectrum spec(grid->spectral_size());
    for (std::size_t m = 0; m < spec.size(); ++m) {
        const double re = normal(rng);
        const double im = normal(rng);
        if (!grid->retained(m)) continue;
        const double env = std::exp(-grid->k_squared(m) / (2.0 * cutoff * cutoff));
        spec[m] = env * Complex(re, im);
    }
    // c2r only reads a Hermitian-consistent half spectrum; project once more
    // so the result is exactly what the transform pair reproduces.
    Field f(grid, grid->inverse(spec));
    return dealias(f);
}

StateH make_random_probe(const GridPtr& grid, const RandomProbe& probe) {
    StateH phi{make_random_field(grid, probe.cutoff, probe.seed),
               probe.with_velocity ? make_random_field(grid, probe.cutoff, probe.seed ^ 0x9e3779b97f4a7c15ULL)
                                   : Field(grid)};
    const double norm = energy_norm(phi);
    if (norm == 0.0) throw InvalidInput("make_random_probe: degenerate random state");
    phi *= probe.norm / norm;
    return phi;
}

bool is_band_limited(const StateH& phi, double tol) {
    const StateH masked{dealias(phi.f), dealias(phi.g)};
    const double norm = energy_norm(phi);
    return energy_norm(phi - masked) <= tol * std::max(norm, 1e-300);
}

}  // namespace nlkg
