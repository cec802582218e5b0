#pragma once

#include <cstdint>

#include "nlkg/spectral.hpp"

namespace nlkg {

// f = amplitude * exp(-|x - center|^2 / (2 sigma^2)), g = velocity_amplitude * same
// profile, both projected onto the dealias mask so that w_phi stays band-limited.
struct GaussianProbe {
    double amplitude = 1.0;
    // Width; <= 0 selects box_length / 16.
    double sigma = 0.0;
    double center_x = 0.0;
    double center_y = 0.0;
    double velocity_amplitude = 0.0;
};

StateH make_gaussian_probe(const GridPtr& grid, const GaussianProbe& probe);

// Random band-limited state: independent normal Fourier coefficients on the
// retained modes with a Gaussian envelope exp(-|k|^2 / (2 k_c^2)), rescaled so
// that ||phi||_H equals `norm`.
struct RandomProbe {
    double norm = 1.0;
    double cutoff = 2.0;
    std::uint64_t seed = 0;
    bool with_velocity = true;
};

StateH make_random_probe(const GridPtr& grid, const RandomProbe& probe);
Field make_random_field(const GridPtr& grid, double cutoff, std::uint64_t seed);

// ||phi - dealias(phi)||_H <= tol * ||phi||_H
bool is_band_limited(const StateH& phi, double tol = 1e-12);

}  // namespace nlkg
