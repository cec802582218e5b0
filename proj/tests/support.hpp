#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "nlkg/probes.hpp"
#include "nlkg/spectral.hpp"

namespace nlkg::testing {

// cos(2 pi (a x + b y) / L + phase) sampled on the grid.
inline Field plane_wave(const GridPtr& grid, int a, int b, double phase = 0.0) {
    Field f(grid);
    const double k0 = 2.0 * std::numbers::pi / grid->box_length();
    for (int r = 0; r < grid->points(); ++r) {
        for (int c = 0; c < grid->points(); ++c) {
            f.at(r, c) = std::cos(k0 * (a * grid->coordinate(r) + b * grid->coordinate(c)) + phase);
        }
    }
    return f;
}

inline Field constant_field(const GridPtr& grid, double v) {
    Field f(grid);
    for (auto& x : f.values()) x = v;
    return f;
}

// Uniform white noise, not band-limited.
inline Field noise_field(const GridPtr& grid, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Field f(grid);
    for (auto& x : f.values()) x = u(rng);
    return f;
}

inline StateH random_state(const GridPtr& grid, std::uint64_t seed, double norm = 1.0) {
    return make_random_probe(grid, RandomProbe{norm, 2.0, seed, true});
}

// Series with frame j = profile(t_j) * field.
template <typename Profile>
FieldSeries separable_series(const Field& field, const TimeWindow& window, Profile profile) {
    FieldSeries s = FieldSeries::zero(field.grid(), window);
    for (int j = 0; j < window.frames(); ++j) s.frames[j] = profile(window.time(j)) * field;
    return s;
}

inline FieldSeries random_series(const GridPtr& grid, const TimeWindow& window, std::uint64_t seed) {
    FieldSeries s = FieldSeries::zero(grid, window);
    for (int j = 0; j < window.frames(); ++j) s.frames[j] = make_random_field(grid, 2.0, seed * 1000 + j);
    return s;
}

inline double max_abs_diff(const Field& a, const Field& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

inline double max_abs(const Field& a) {
    double m = 0.0;
    for (double v : a.values()) m = std::max(m, std::abs(v));
    return m;
}

inline double max_abs_diff(const FieldSeries& a, const FieldSeries& b) {
    double m = 0.0;
    for (std::size_t j = 0; j < a.frames.size(); ++j) m = std::max(m, max_abs_diff(a.frames[j], b.frames[j]));
    return m;
}

inline double max_abs(const FieldSeries& a) {
    double m = 0.0;
    for (const auto& f : a.frames) m = std::max(m, max_abs(f));
    return m;
}

inline double rel_diff(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

inline double state_diff(const StateH& a, const StateH& b) { return energy_norm(a - b); }

}  // namespace nlkg::testing
