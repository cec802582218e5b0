#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace nlkg {

using Complex = std::complex<double>;

// Half-plane spectrum of a real field in FFTW r2c layout:
// points x (points/2 + 1) entries, row-major.
using Spectrum = std::vector<Complex>;

// Periodic square box [-L/2, L/2)^2 sampled on points x points nodes.
//
// Holds the FFT plans and the per-mode tables that every spectral operation
// reads: |k|^2, the symbol mu(k) = sqrt(1 + |k|^2) of omega = sqrt(1 - Laplacian),
// and the 2/3-rule dealias mask. Everything is immutable after construction,
// so a single grid may be shared between threads.
class Grid2D {
public:
    Grid2D(int points_per_dim, double box_length);
    ~Grid2D();

    Grid2D(const Grid2D&) = delete;
    Grid2D& operator=(const Grid2D&) = delete;

    static std::shared_ptr<const Grid2D> create(int points_per_dim, double box_length);

    int points() const noexcept { return n_; }
    double box_length() const noexcept { return length_; }
    double spacing() const noexcept { return length_ / n_; }
    // Area element for the L2 quadrature.
    double cell_area() const noexcept { return spacing() * spacing(); }

    std::size_t size() const noexcept { return static_cast<std::size_t>(n_) * n_; }
    std::size_t spectral_size() const noexcept { return static_cast<std::size_t>(n_) * (n_ / 2 + 1); }
    int spectral_columns() const noexcept { return n_ / 2 + 1; }

    // Physical coordinate of node index i along either axis.
    double coordinate(int i) const noexcept { return -0.5 * length_ + i * spacing(); }

    // Signed integer mode numbers of spectral entry (row, col).
    int mode_row(int row) const noexcept { return row <= n_ / 2 ? row : row - n_; }
    int mode_col(int col) const noexcept { return col; }

    double k_squared(std::size_t mode) const noexcept { return k2_[mode]; }
    double mu(std::size_t mode) const noexcept { return mu_[mode]; }
    bool retained(std::size_t mode) const noexcept { return mask_[mode] != 0; }

    std::span<const double> k_squared_table() const noexcept { return k2_; }
    std::span<const double> mu_table() const noexcept { return mu_; }

    // Unnormalised forward transform.
    Spectrum forward(std::span<const double> values) const;
    // Inverse transform including the 1/points^2 normalisation.
    std::vector<double> inverse(const Spectrum& spectrum) const;

    bool same_as(const Grid2D& other) const noexcept {
        return this == &other || (n_ == other.n_ && length_ == other.length_);
    }

private:
    int n_;
    double length_;
    std::vector<double> k2_;
    std::vector<double> mu_;
    std::vector<unsigned char> mask_;
    struct Plans;
    std::unique_ptr<Plans> plans_;
};

using GridPtr = std::shared_ptr<const Grid2D>;

// Real scalar field sampled on a grid.
class Field {
public:
    Field() = default;
    explicit Field(GridPtr grid);
    Field(GridPtr grid, std::vector<double> values);

    const GridPtr& grid() const noexcept { return grid_; }
    std::span<const double> values() const noexcept { return values_; }
    std::span<double> values() noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }

    double& operator[](std::size_t i) noexcept { return values_[i]; }
    double operator[](std::size_t i) const noexcept { return values_[i]; }
    double& at(int row, int col) noexcept { return values_[static_cast<std::size_t>(row) * grid_->points() + col]; }
    double at(int row, int col) const noexcept {
        return values_[static_cast<std::size_t>(row) * grid_->points() + col];
    }

    Field& operator+=(const Field& other);
    Field& operator-=(const Field& other);
    Field& operator*=(double scale);
    // this += scale * other
    Field& add_scaled(double scale, const Field& other);

    bool all_finite() const noexcept;

private:
    GridPtr grid_;
    std::vector<double> values_;
};

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator*(double s, Field a);

// Throws InvalidInput unless both fields live on the same grid.
void require_same_grid(const Field& a, const Field& b);

double l2_inner(const Field& a, const Field& b);
double l2_norm(const Field& f);

}  // namespace nlkg
