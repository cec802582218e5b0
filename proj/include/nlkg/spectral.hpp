#pragma once

#include <vector>

#include "nlkg/grid.hpp"

namespace nlkg {

// Cauchy pair (f, g): position component in H^1, velocity component in L^2.
struct StateH {
    Field f;
    Field g;

    static StateH zero(const GridPtr& grid) { return {Field(grid), Field(grid)}; }
    const GridPtr& grid() const noexcept { return f.grid(); }

    StateH& operator+=(const StateH& other);
    StateH& operator-=(const StateH& other);
    StateH& operator*=(double s);
    StateH& add_scaled(double s, const StateH& other);
};

StateH operator+(StateH a, const StateH& b);
StateH operator-(StateH a, const StateH& b);
StateH operator*(double s, StateH a);

// Uniform time lattice t_j = -T + j dt, dt = 2T/steps, j = 0..steps.
class TimeWindow {
public:
    TimeWindow(double half_width, int steps);

    double half_width() const noexcept { return half_width_; }
    int steps() const noexcept { return steps_; }
    int frames() const noexcept { return steps_ + 1; }
    double dt() const noexcept { return 2.0 * half_width_ / steps_; }
    double time(int j) const noexcept;
    // Composite trapezoid weight of node j over [-T, T].
    double weight(int j) const noexcept { return (j == 0 || j == steps_) ? 0.5 * dt() : dt(); }

    bool operator==(const TimeWindow&) const = default;

private:
    double half_width_;
    int steps_;
};

// One real field per lattice time.
struct FieldSeries {
    TimeWindow window;
    std::vector<Field> frames;

    static FieldSeries zero(const GridPtr& grid, const TimeWindow& window);
    const GridPtr& grid() const noexcept { return frames.front().grid(); }

    FieldSeries& operator+=(const FieldSeries& other);
    FieldSeries& operator-=(const FieldSeries& other);
    FieldSeries& operator*=(double s);
    FieldSeries& add_scaled(double s, const FieldSeries& other);
};

FieldSeries operator+(FieldSeries a, const FieldSeries& b);
FieldSeries operator-(FieldSeries a, const FieldSeries& b);
FieldSeries operator*(double s, FieldSeries a);

void require_compatible(const FieldSeries& a, const FieldSeries& b);

// Fourier multiplier (1 + |k|^2)^{s/2}.
Field apply_omega_power(const Field& field, double s);

// 2/3-rule projection. The mask is an orthogonal projector in L2.
Field dealias(const Field& field);
FieldSeries dealias(const FieldSeries& series);

// (w_phi(t), d/dt w_phi(t)) for the free Klein-Gordon flow.
StateH free_propagate(const StateH& phi, double t);

// w_phi sampled at every lattice time.
FieldSeries free_series(const StateH& phi, const TimeWindow& window);

// Retarded Duhamel integral from -T with composite trapezoid quadrature:
// (Gamma G)(t_j) = int_{-T}^{t_j} sin((t_j - s) omega)/omega G(s) ds.
FieldSeries duhamel(const FieldSeries& forcing);

// <omega f1, omega f2> + <g1, g2>.
double inner_product_H(const StateH& a, const StateH& b);
double energy_norm(const StateH& phi);

// J psi = (-omega^{-2} g, f), the matrix (0 -omega^{-2}; 1 0).
StateH apply_J(const StateH& psi);

// int_{-T}^{T} <G(t), w_psi(t)>_{L2} dt (trapezoid).
double pairing_spacetime(const FieldSeries& forcing, const StateH& psi);

// int_{-T}^{T} (-omega^{-1} sin(t omega) G(t), cos(t omega) G(t)) dt (trapezoid).
StateH output_integral(const FieldSeries& forcing);

// Frame-wise grid products. No mask is applied: products form an exact
// commutative ring, and the mask is applied where a product becomes a forcing.
Field pointwise_product(const Field& a, const Field& b);
FieldSeries pointwise_product(const FieldSeries& a, const FieldSeries& b);
FieldSeries pointwise_power(const FieldSeries& a, int exponent);

// Trapezoid-in-time, cell-sum-in-space integral of a series.
double spacetime_integral(const FieldSeries& series);
// Same quadrature applied to the product a*b.
double spacetime_inner(const FieldSeries& a, const FieldSeries& b);
// Discrete space-time L2 norm.
double spacetime_norm(const FieldSeries& series);
// max_j ||series(t_j)||_{L2}
double sup_l2(const FieldSeries& series);

}  // namespace nlkg
