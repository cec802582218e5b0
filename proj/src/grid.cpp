#include "nlkg/grid.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>

#include "nlkg/errors.hpp"

namespace nlkg {

namespace {
// The FFTW planner is not re-entrant; execution with the new-array API is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace

struct Grid2D::Plans {
    fftw_plan r2c = nullptr;
    fftw_plan c2r = nullptr;
};

Grid2D::Grid2D(int points_per_dim, double box_length)
    : n_(points_per_dim), length_(box_length), plans_(std::make_unique<Plans>()) {
    if (n_ < 8 || (n_ & (n_ - 1)) != 0) {
        throw InvalidInput("Grid2D: points_per_dim must be a power of two >= 8");
    }
    if (!(box_length > 0.0) || !std::isfinite(box_length)) {
        throw InvalidInput("Grid2D: box_length must be positive and finite");
    }

    const std::size_t ns = spectral_size();
    const int cols = spectral_columns();
    const double k0 = 2.0 * std::numbers::pi / length_;
    k2_.resize(ns);
    mu_.resize(ns);
    mask_.resize(ns);
    for (int r = 0; r < n_; ++r) {
        const int mr = mode_row(r);
        for (int c = 0; c < cols; ++c) {
            const int mc = mode_col(c);
            const std::size_t idx = static_cast<std::size_t>(r) * cols + c;
            const double kx = k0 * mr;
            const double ky = k0 * mc;
            k2_[idx] = kx * kx + ky * ky;
            mu_[idx] = std::sqrt(1.0 + k2_[idx]);
            // 2/3 rule: keep |m| <= n/3 along each axis.
            mask_[idx] = (3 * std::abs(mr) <= n_ && 3 * mc <= n_) ? 1 : 0;
        }
    }

    std::vector<double> real_buf(size());
    std::vector<Complex> spec_buf(ns);
    auto* in = real_buf.data();
    auto* out = reinterpret_cast<fftw_complex*>(spec_buf.data());
    std::lock_guard lock(planner_mutex());
    plans_->r2c = fftw_plan_dft_r2c_2d(n_, n_, in, out, FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans_->c2r = fftw_plan_dft_c2r_2d(n_, n_, out, in, FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (plans_->r2c == nullptr || plans_->c2r == nullptr) {
        throw Error("Grid2D: FFTW planning failed");
    }
}

Grid2D::~Grid2D() {
    std::lock_guard lock(planner_mutex());
    if (plans_->r2c != nullptr) fftw_destroy_plan(plans_->r2c);
    if (plans_->c2r != nullptr) fftw_destroy_plan(plans_->c2r);
}

std::shared_ptr<const Grid2D> Grid2D::create(int points_per_dim, double box_length) {
    return std::make_shared<const Grid2D>(points_per_dim, box_length);
}

Spectrum Grid2D::forward(std::span<const double> values) const {
    if (values.size() != size()) throw InvalidInput("Grid2D::forward: size mismatch");
    // r2c does not modify its input, but the FFTW signature is non-const.
    std::vector<double> in(values.begin(), values.end());
    Spectrum out(spectral_size());
    fftw_execute_dft_r2c(plans_->r2c, in.data(), reinterpret_cast<fftw_complex*>(out.data()));
    return out;
}

std::vector<double> Grid2D::inverse(const Spectrum& spectrum) const {
    if (spectrum.size() != spectral_size()) throw InvalidInput("Grid2D::inverse: size mismatch");
    // c2r destroys its input.
    Spectrum in = spectrum;
    std::vector<double> out(size());
    fftw_execute_dft_c2r(plans_->c2r, reinterpret_cast<fftw_complex*>(in.data()), out.data());
    const double scale = 1.0 / static_cast<double>(size());
    for (auto& v : out) v *= scale;
    return out;
}

Field::Field(GridPtr grid) : grid_(std::move(grid)) {
    if (!grid_) throw InvalidInput("Field: null grid");
    values_.assign(grid_->size(), 0.0);
}

Field::Field(GridPtr grid, std::vector<double> values) : grid_(std::move(grid)), values_(std::move(values)) {
    if (!grid_) throw InvalidInput("Field: null grid");
    if (values_.size() != grid_->size()) throw InvalidInput("Field: value count does not match grid");
}

void require_same_grid(const Field& a, const Field& b) {
    if (!a.grid() || !b.grid() || !a.grid()->same_as(*b.grid())) {
        throw InvalidInput("fields live on different grids");
    }
}

Field& Field::operator+=(const Field& other) {
    require_same_grid(*this, other);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
    return *this;
}

Field& Field::operator-=(const Field& other) {
    require_same_grid(*this, other);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
    return *this;
}

Field& Field::operator*=(double scale) {
    for (auto& v : values_) v *= scale;
    return *this;
}

Field& Field::add_scaled(double scale, const Field& other) {
    require_same_grid(*this, other);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += scale * other.values_[i];
    return *this;
}

bool Field::all_finite() const noexcept {
    for (double v : values_) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

Field operator+(Field a, const Field& b) { return a += b; }
Field operator-(Field a, const Field& b) { return a -= b; }
Field operator*(double s, Field a) { return a *= s; }

double l2_inner(const Field& a, const Field& b) {
    require_same_grid(a, b);
    double acc = 0.0;
    const auto av = a.values();
    const auto bv = b.values();
    for (std::size_t i = 0; i < av.size(); ++i) acc += av[i] * bv[i];
    return acc * a.grid()->cell_area();
}

double l2_norm(const Field& f) { return std::sqrt(l2_inner(f, f)); }

}  // namespace nlkg
