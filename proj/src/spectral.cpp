#include "nlkg/spectral.hpp"

#include <cmath>

#include "nlkg/errors.hpp"

namespace nlkg {

namespace {

void require_finite(const Field& f, const char* where) {
    if (!f.all_finite()) throw InvalidInput(std::string(where) + ": non-finite field values");
}

void require_same_grid(const StateH& a, const StateH& b) {
    nlkg::require_same_grid(a.f, a.g);
    nlkg::require_same_grid(a.f, b.f);
    nlkg::require_same_grid(b.f, b.g);
}

// Multiply a spectrum in place by a real per-mode symbol.
template <typename Symbol>
void scale_modes(Spectrum& s, Symbol&& symbol) {
    for (std::size_t m = 0; m < s.size(); ++m) s[m] *= symbol(m);
}

std::vector<Spectrum> forward_all(const FieldSeries& series) {
    std::vector<Spectrum> out;
    out.reserve(series.frames.size());
    for (const auto& frame : series.frames) out.push_back(frame.grid()->forward(frame.values()));
    return out;
}

}  // namespace

// --- StateH -----------------------------------------------------------------

StateH& StateH::operator+=(const StateH& o) {
    f += o.f;
    g += o.g;
    return *this;
}
StateH& StateH::operator-=(const StateH& o) {
    f -= o.f;
    g -= o.g;
    return *this;
}
StateH& StateH::operator*=(double s) {
    f *= s;
    g *= s;
    return *this;
}
StateH& StateH::add_scaled(double s, const StateH& o) {
    f.add_scaled(s, o.f);
    g.add_scaled(s, o.g);
    return *this;
}
StateH operator+(StateH a, const StateH& b) { return a += b; }
StateH operator-(StateH a, const StateH& b) { return a -= b; }
StateH operator*(double s, StateH a) { return a *= s; }

// --- TimeWindow -------------------------------------------------------------

TimeWindow::TimeWindow(double half_width, int steps) : half_width_(half_width), steps_(steps) {
    if (!(half_width > 0.0) || !std::isfinite(half_width)) {
        throw InvalidInput("TimeWindow: half_width must be positive");
    }
    if (steps < 8 || steps % 2 != 0) throw InvalidInput("TimeWindow: steps must be even and >= 8");
}

double TimeWindow::time(int j) const noexcept {
    // Symmetric evaluation so that t_{steps/2} is exactly 0 and t_steps is exactly T.
    return half_width_ * (2.0 * j - steps_) / steps_;
}

// --- FieldSeries ------------------------------------------------------------

FieldSeries FieldSeries::zero(const GridPtr& grid, const TimeWindow& window) {
    return {window, std::vector<Field>(window.frames(), Field(grid))};
}

void require_compatible(const FieldSeries& a, const FieldSeries& b) {
    if (!(a.window == b.window)) throw InvalidInput("field series on different time windows");
    if (a.frames.size() != b.frames.size()) throw InvalidInput("field series frame count mismatch");
    if (!a.frames.empty()) require_same_grid(a.frames.front(), b.frames.front());
}

FieldSeries& FieldSeries::operator+=(const FieldSeries& o) {
    require_compatible(*this, o);
    for (std::size_t j = 0; j < frames.size(); ++j) frames[j] += o.frames[j];
    return *this;
}
FieldSeries& FieldSeries::operator-=(const FieldSeries& o) {
    require_compatible(*this, o);
    for (std::size_t j = 0; j < frames.size(); ++j) frames[j] -= o.frames[j];
    return *this;
}
FieldSeries& FieldSeries::operator*=(double s) {
    for (auto& fr : frames) fr *= s;
    return *this;
}
FieldSeries& FieldSeries::add_scaled(double s, const FieldSeries& o) {
    require_compatible(*this, o);
    for (std::size_t j = 0; j < frames.size(); ++j) frames[j].add_scaled(s, o.frames[j]);
    return *this;
}
FieldSeries operator+(FieldSeries a, const FieldSeries& b) { return a += b; }
FieldSeries operator-(FieldSeries a, const FieldSeries& b) { return a -= b; }
FieldSeries operator*(double s, FieldSeries a) { return a *= s; }

// --- multipliers --------------------------------------------------------------

Field apply_omega_power(const Field& field, double s) {
    require_finite(field, "apply_omega_power");
    const auto& grid = *field.grid();
    Spectrum spec = grid.forward(field.values());
    const auto k2 = grid.k_squared_table();
    scale_modes(spec, [&](std::size_t m) { return std::pow(1.0 + k2[m], 0.5 * s); });
    return Field(field.grid(), grid.inverse(spec));
}

Field dealias(const Field& field) {
    const auto& grid = *field.grid();
    Spectrum spec = grid.forward(field.values());
    scale_modes(spec, [&](std::size_t m) { return grid.retained(m) ? 1.0 : 0.0; });
    return Field(field.grid(), grid.inverse(spec));
}

FieldSeries dealias(const FieldSeries& series) {
    FieldSeries out{series.window, {}};
    out.frames.reserve(series.frames.size());
    for (const auto& fr : series.frames) out.frames.push_back(dealias(fr));
    return out;
}

StateH free_propagate(const StateH& phi, double t) {
    require_same_grid(phi.f, phi.g);
    require_finite(phi.f, "free_propagate");
    require_finite(phi.g, "free_propagate");
    const auto& grid = *phi.grid();
    const Spectrum fh = grid.forward(phi.f.values());
    const Spectrum gh = grid.forward(phi.g.values());
    Spectrum pos(fh.size());
    Spectrum vel(fh.size());
    for (std::size_t m = 0; m < fh.size(); ++m) {
        const double mu = grid.mu(m);
        const double c = std::cos(t * mu);
        const double s = std::sin(t * mu);
        pos[m] = c * fh[m] + (s / mu) * gh[m];
        vel[m] = -mu * s * fh[m] + c * gh[m];
    }
    return {Field(phi.grid(), grid.inverse(pos)), Field(phi.grid(), grid.inverse(vel))};
}

FieldSeries free_series(const StateH& phi, const TimeWindow& window) {
    require_same_grid(phi.f, phi.g);
    require_finite(phi.f, "free_series");
    require_finite(phi.g, "free_series");
    const auto& grid = *phi.grid();
    const Spectrum fh = grid.forward(phi.f.values());
    const Spectrum gh = grid.forward(phi.g.values());
    FieldSeries out{window, {}};
    out.frames.reserve(window.frames());
    Spectrum pos(fh.size());
    for (int j = 0; j < window.frames(); ++j) {
        const double t = window.time(j);
        for (std::size_t m = 0; m < fh.size(); ++m) {
            const double mu = grid.mu(m);
            pos[m] = std::cos(t * mu) * fh[m] + (std::sin(t * mu) / mu) * gh[m];
        }
        out.frames.emplace_back(phi.grid(), grid.inverse(pos));
    }
    return out;
}

FieldSeries duhamel(const FieldSeries& forcing) {
    const auto& window = forcing.window;
    const auto& gridp = forcing.grid();
    const auto& grid = *gridp;
    const std::size_t modes = grid.spectral_size();
    const double dt = window.dt();
    const auto spectra = forward_all(forcing);

    // Per mode: Gamma G(t_j) = [sin(t_j mu) C_j - cos(t_j mu) S_j] / mu with
    // C_j, S_j the trapezoid sums of cos(t mu) G, sin(t mu) G over [t_0, t_j].
    // `run_c`/`run_s` hold the sums with full interior weights and a half weight at t_0.
    Spectrum run_c(modes, Complex{});
    Spectrum run_s(modes, Complex{});
    FieldSeries out{window, {}};
    out.frames.reserve(window.frames());
    out.frames.emplace_back(gridp);
    Spectrum frame(modes);
    for (int j = 0; j < window.frames(); ++j) {
        const double t = window.time(j);
        const double w_prev = (j == 0) ? 0.5 * dt : dt;
        for (std::size_t m = 0; m < modes; ++m) {
            const double mu = grid.mu(m);
            const double c = std::cos(t * mu);
            const double s = std::sin(t * mu);
            const Complex gm = spectra[j][m];
            if (j > 0) {
                const Complex cj = run_c[m] + 0.5 * dt * c * gm;
                const Complex sj = run_s[m] + 0.5 * dt * s * gm;
                frame[m] = (s * cj - c * sj) / mu;
            }
            run_c[m] += w_prev * c * gm;
            run_s[m] += w_prev * s * gm;
        }
        if (j > 0) out.frames.emplace_back(gridp, grid.inverse(frame));
    }
    return out;
}

// --- inner products ---------------------------------------------------------

double inner_product_H(const StateH& a, const StateH& b) {
    require_same_grid(a, b);
    return l2_inner(apply_omega_power(a.f, 1.0), apply_omega_power(b.f, 1.0)) + l2_inner(a.g, b.g);
}

double energy_norm(const StateH& phi) { return std::sqrt(inner_product_H(phi, phi)); }

StateH apply_J(const StateH& psi) {
    Field first = apply_omega_power(psi.g, -2.0);
    first *= -1.0;
    return {std::move(first), psi.f};
}

double pairing_spacetime(const FieldSeries& forcing, const StateH& psi) {
    const FieldSeries w = free_series(psi, forcing.window);
    require_compatible(forcing, w);
    double acc = 0.0;
    for (int j = 0; j < forcing.window.frames(); ++j) {
        acc += forcing.window.weight(j) * l2_inner(forcing.frames[j], w.frames[j]);
    }
    return acc;
}

StateH output_integral(const FieldSeries& forcing) {
    const auto& window = forcing.window;
    const auto& gridp = forcing.grid();
    const auto& grid = *gridp;
    const std::size_t modes = grid.spectral_size();
    Spectrum pos(modes, Complex{});
    Spectrum vel(modes, Complex{});
    for (int j = 0; j < window.frames(); ++j) {
        const Spectrum gh = grid.forward(forcing.frames[j].values());
        const double t = window.time(j);
        const double wj = window.weight(j);
        for (std::size_t m = 0; m < modes; ++m) {
            const double mu = grid.mu(m);
            pos[m] -= wj * (std::sin(t * mu) / mu) * gh[m];
            vel[m] += wj * std::cos(t * mu) * gh[m];
        }
    }
    return {Field(gridp, grid.inverse(pos)), Field(gridp, grid.inverse(vel))};
}

// --- products and quadrature --------------------------------------------------

Field pointwise_product(const Field& a, const Field& b) {
    require_same_grid(a, b);
    Field out(a.grid());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] * b[i];
    return out;
}

FieldSeries pointwise_product(const FieldSeries& a, const FieldSeries& b) {
    require_compatible(a, b);
    FieldSeries out{a.window, {}};
    out.frames.reserve(a.frames.size());
    for (std::size_t j = 0; j < a.frames.size(); ++j) out.frames.push_back(pointwise_product(a.frames[j], b.frames[j]));
    return out;
}

FieldSeries pointwise_power(const FieldSeries& a, int exponent) {
    if (exponent < 0) throw InvalidInput("pointwise_power: negative exponent");
    FieldSeries out = a;
    for (auto& fr : out.frames) {
        for (auto& v : fr.values()) {
            double p = 1.0;
            for (int e = 0; e < exponent; ++e) p *= v;
            v = p;
        }
    }
    return out;
}

double spacetime_integral(const FieldSeries& series) {
    double acc = 0.0;
    for (int j = 0; j < series.window.frames(); ++j) {
        double frame_sum = 0.0;
        for (double v : series.frames[j].values()) frame_sum += v;
        acc += series.window.weight(j) * frame_sum;
    }
    return acc * series.grid()->cell_area();
}

double spacetime_inner(const FieldSeries& a, const FieldSeries& b) {
    require_compatible(a, b);
    double acc = 0.0;
    for (int j = 0; j < a.window.frames(); ++j) acc += a.window.weight(j) * l2_inner(a.frames[j], b.frames[j]);
    return acc;
}

double spacetime_norm(const FieldSeries& series) { return std::sqrt(spacetime_inner(series, series)); }

double sup_l2(const FieldSeries& series) {
    double best = 0.0;
    for (const auto& fr : series.frames) best = std::max(best, l2_norm(fr));
    return best;
}

}  // namespace nlkg
