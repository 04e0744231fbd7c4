#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace ch3 {

class Grid;
using GridPtr = std::shared_ptr<const Grid>;

/// Uniform periodic grid on [-L, L) with n nodes (n a power of two, n >= 16).
/// Nodes are x_i = -L + i*dx with dx = 2L/n; the Fourier bins of the real
/// transform carry wavenumbers k_j = pi*j/L for j = 0..n/2.
///
/// A Grid is immutable after construction and safe to share across threads;
/// FFT plans are created once (planner access serialized) and executed on
/// per-call buffers.
class Grid {
  public:
    ~Grid();
    Grid(const Grid&) = delete;
    Grid& operator=(const Grid&) = delete;

    std::size_t size() const { return n_; }
    double half_width() const { return half_width_; }
    double spacing() const { return dx_; }
    double node(std::size_t i) const { return nodes_[i]; }
    std::span<const double> nodes() const { return nodes_; }

    /// Wavenumbers of the real-transform bins, k_j = pi*j/L, j = 0..n/2.
    std::span<const double> wavenumbers() const { return wavenumbers_; }
    std::size_t spectrum_size() const { return n_ / 2 + 1; }

    /// Highest bin kept by the 2/3 dealiasing rule (bins above n/3 are zeroed).
    std::size_t dealias_cutoff() const { return n_ / 3; }

    /// Unnormalized real-to-complex transform (bin j multiplies e^{i k_j (x+L)}/n).
    std::vector<std::complex<double>> forward(std::span<const double> values) const;
    /// Inverse of forward(), scaled by 1/n.
    std::vector<double> inverse(std::span<const std::complex<double>> spectrum) const;

  private:
    Grid(std::size_t n, double half_width);
    friend GridPtr make_grid(std::size_t n, double half_width);

    std::size_t n_;
    double half_width_;
    double dx_;
    std::vector<double> nodes_;
    std::vector<double> wavenumbers_;
    void* plan_forward_;
    void* plan_inverse_;
};

/// Build a grid. Throws std::invalid_argument unless n is a power of two
/// >= 16 and L > 0.
GridPtr make_grid(std::size_t n, double half_width);

/// Real samples of one function on a shared grid.
struct Field {
    GridPtr grid;
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
    double operator[](std::size_t i) const { return values[i]; }
    double& operator[](std::size_t i) { return values[i]; }
};

Field make_field(GridPtr grid);
Field sample_function(GridPtr grid, const std::function<double(double)>& f);

// ---------------------------------------------------------------------------
// Field arithmetic (value semantics, same-grid operands)
// ---------------------------------------------------------------------------

Field operator+(const Field& a, const Field& b);
Field operator-(const Field& a, const Field& b);
Field operator*(double s, const Field& a);
Field pointwise(const Field& a, const Field& b);  // a*b at each node
Field& axpy(Field& y, double a, const Field& x);  // y += a*x

// ---------------------------------------------------------------------------
// Spectral operators
// ---------------------------------------------------------------------------

/// Spectral derivative d/dx; exact for band-limited inputs (Nyquist zeroed).
Field diff(const Field& f);

/// Solve (1 - d^2/dx^2) g = f, the Fourier multiplier 1/(1+k^2).
Field helmholtz_inverse(const Field& f);

/// Apply (1 - d^2/dx^2), the multiplier (1+k^2).
Field helmholtz_apply(const Field& f);

/// G*f (or dG/dx * f with derivative=true) for the kernel G = 1/2 e^{-|x|},
/// evaluated as a Fourier multiplier on the periodic grid. When the field does
/// not decay below ~1e-12 at the domain edges the periodization is unreliable;
/// the optional flag is set and a note goes to stderr.
Field green_convolve(const Field& f, bool derivative = false,
                     bool* boundary_warning = nullptr);

/// Direct O(n^2) trapezoid sum of the same convolution on the truncated line
/// (no periodization), with Euler-Maclaurin corrections for the kernel kink at
/// x = y. Serves as the ground-truth oracle for green_convolve.
Field quadrature_convolve(const Field& f, bool derivative = false);

/// Zero spectrum bins above n/3 (2/3 rule).
Field dealias(const Field& f);

/// Trapezoid quadrature over the period, dx * sum(values).
double integrate(const Field& f);
/// Trapezoid inner product dx * sum(a_i b_i).
double inner(const Field& a, const Field& b);

double max_abs(const Field& f);
double min_value(const Field& f);
bool all_finite(const Field& f);

/// Translate along x by s: samples of the band-limited interpolant at x - s.
Field shift(const Field& f, double s);

/// Reflect about x = b: samples of the interpolant at 2b - x.
Field reflect(const Field& f, double b);

}  // namespace ch3
