#include "ch3/grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace ch3 {

namespace {

// FFTW's planner is not thread-safe; executing plans on distinct buffers is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

struct AlignedBuffer {
    double* real = nullptr;
    fftw_complex* cplx = nullptr;
    explicit AlignedBuffer(std::size_t n_real, std::size_t n_cplx) {
        if (n_real) real = fftw_alloc_real(n_real);
        if (n_cplx) cplx = fftw_alloc_complex(n_cplx);
    }
    ~AlignedBuffer() {
        if (real) fftw_free(real);
        if (cplx) fftw_free(cplx);
    }
    AlignedBuffer(const AlignedBuffer&) = delete;
    AlignedBuffer& operator=(const AlignedBuffer&) = delete;
};

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

void require_same_grid(const Field& a, const Field& b) {
    if (a.grid != b.grid)
        throw std::invalid_argument("fields live on different grids");
}

}  // namespace

Grid::Grid(std::size_t n, double half_width)
    : n_(n), half_width_(half_width), dx_(2.0 * half_width / static_cast<double>(n)) {
    nodes_.resize(n_);
    for (std::size_t i = 0; i < n_; ++i)
        nodes_[i] = -half_width_ + static_cast<double>(i) * dx_;
    wavenumbers_.resize(n_ / 2 + 1);
    for (std::size_t j = 0; j < wavenumbers_.size(); ++j)
        wavenumbers_[j] = std::numbers::pi * static_cast<double>(j) / half_width_;

    AlignedBuffer proto(n_, n_ / 2 + 1);
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan_forward_ = fftw_plan_dft_r2c_1d(static_cast<int>(n_), proto.real, proto.cplx,
                                         FFTW_ESTIMATE);
    plan_inverse_ = fftw_plan_dft_c2r_1d(static_cast<int>(n_), proto.cplx, proto.real,
                                         FFTW_ESTIMATE);
    if (!plan_forward_ || !plan_inverse_)
        throw std::runtime_error("fftw plan creation failed");
}

Grid::~Grid() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(static_cast<fftw_plan>(plan_forward_));
    fftw_destroy_plan(static_cast<fftw_plan>(plan_inverse_));
}

GridPtr make_grid(std::size_t n, double half_width) {
    if (!is_power_of_two(n) || n < 16)
        throw std::invalid_argument("grid size must be a power of two >= 16");
    if (!(half_width > 0.0))
        throw std::invalid_argument("grid half-width must be positive");
    return GridPtr(new Grid(n, half_width));
}

std::vector<std::complex<double>> Grid::forward(std::span<const double> values) const {
    if (values.size() != n_)
        throw std::invalid_argument("forward: value count does not match grid");
    AlignedBuffer buf(n_, n_ / 2 + 1);
    std::copy(values.begin(), values.end(), buf.real);
    fftw_execute_dft_r2c(static_cast<fftw_plan>(plan_forward_), buf.real, buf.cplx);
    std::vector<std::complex<double>> out(n_ / 2 + 1);
    for (std::size_t j = 0; j < out.size(); ++j)
        out[j] = {buf.cplx[j][0], buf.cplx[j][1]};
    return out;
}

std::vector<double> Grid::inverse(std::span<const std::complex<double>> spectrum) const {
    if (spectrum.size() != n_ / 2 + 1)
        throw std::invalid_argument("inverse: spectrum size does not match grid");
    AlignedBuffer buf(n_, n_ / 2 + 1);
    for (std::size_t j = 0; j < spectrum.size(); ++j) {
        buf.cplx[j][0] = spectrum[j].real();
        buf.cplx[j][1] = spectrum[j].imag();
    }
    fftw_execute_dft_c2r(static_cast<fftw_plan>(plan_inverse_), buf.cplx, buf.real);
    std::vector<double> out(n_);
    const double scale = 1.0 / static_cast<double>(n_);
    for (std::size_t i = 0; i < n_; ++i) out[i] = buf.real[i] * scale;
    return out;
}

Field make_field(GridPtr grid) {
    Field f;
    f.values.assign(grid->size(), 0.0);
    f.grid = std::move(grid);
    return f;
}

Field sample_function(GridPtr grid, const std::function<double(double)>& fn) {
    Field f = make_field(grid);
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = fn(f.grid->node(i));
    return f;
}

Field operator+(const Field& a, const Field& b) {
    require_same_grid(a, b);
    Field out = a;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += b[i];
    return out;
}

Field operator-(const Field& a, const Field& b) {
    require_same_grid(a, b);
    Field out = a;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] -= b[i];
    return out;
}

Field operator*(double s, const Field& a) {
    Field out = a;
    for (double& v : out.values) v *= s;
    return out;
}

Field pointwise(const Field& a, const Field& b) {
    require_same_grid(a, b);
    Field out = a;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] *= b[i];
    return out;
}

Field& axpy(Field& y, double a, const Field& x) {
    require_same_grid(y, x);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
    return y;
}

Field diff(const Field& f) {
    const Grid& g = *f.grid;
    auto spec = g.forward(f.values);
    auto k = g.wavenumbers();
    for (std::size_t j = 0; j < spec.size(); ++j)
        spec[j] *= std::complex<double>(0.0, k[j]);
    spec.back() = 0.0;  // Nyquist has no well-defined odd derivative
    Field out;
    out.grid = f.grid;
    out.values = g.inverse(spec);
    return out;
}

Field helmholtz_inverse(const Field& f) {
    const Grid& g = *f.grid;
    auto spec = g.forward(f.values);
    auto k = g.wavenumbers();
    for (std::size_t j = 0; j < spec.size(); ++j) spec[j] /= 1.0 + k[j] * k[j];
    Field out;
    out.grid = f.grid;
    out.values = g.inverse(spec);
    return out;
}

Field helmholtz_apply(const Field& f) {
    const Grid& g = *f.grid;
    auto spec = g.forward(f.values);
    auto k = g.wavenumbers();
    for (std::size_t j = 0; j < spec.size(); ++j) spec[j] *= 1.0 + k[j] * k[j];
    Field out;
    out.grid = f.grid;
    out.values = g.inverse(spec);
    return out;
}

Field green_convolve(const Field& f, bool derivative, bool* boundary_warning) {
    const Grid& g = *f.grid;
    const std::size_t n = g.size();
    const double edge = std::max(std::abs(f[0]), std::abs(f[n - 1]));
    const bool warn = edge > 1e-12 * std::max(1.0, max_abs(f));
    if (boundary_warning) *boundary_warning = warn;
    if (warn)
        std::fprintf(stderr,
                     "green_convolve: field does not decay at the domain edges "
                     "(|f| = %.3e); periodization error may dominate\n",
                     edge);
    auto spec = g.forward(f.values);
    auto k = g.wavenumbers();
    for (std::size_t j = 0; j < spec.size(); ++j) {
        const double denom = 1.0 + k[j] * k[j];
        if (derivative)
            spec[j] *= std::complex<double>(0.0, k[j]) / denom;
        else
            spec[j] /= denom;
    }
    if (derivative) spec.back() = 0.0;
    Field out;
    out.grid = f.grid;
    out.values = g.inverse(spec);
    return out;
}

namespace {

// Periodic-index central differences used only for the Euler-Maclaurin kink
// corrections in quadrature_convolve.
double at_wrapped(const std::vector<double>& v, std::size_t i, long off) {
    const long n = static_cast<long>(v.size());
    long idx = (static_cast<long>(i) + off) % n;
    if (idx < 0) idx += n;
    return v[static_cast<std::size_t>(idx)];
}

double fd1(const std::vector<double>& v, std::size_t i, double h) {
    auto at = [&](long off) { return at_wrapped(v, i, off); };
    // 6th-order central first derivative
    return (-at(-3) + 9.0 * at(-2) - 45.0 * at(-1) + 45.0 * at(1) - 9.0 * at(2) + at(3)) /
           (60.0 * h);
}

double fd2(const std::vector<double>& v, std::size_t i, double h) {
    auto at = [&](long off) { return at_wrapped(v, i, off); };
    return (at(1) - 2.0 * at(0) + at(-1)) / (h * h);
}

double fd3(const std::vector<double>& v, std::size_t i, double h) {
    auto at = [&](long off) { return at_wrapped(v, i, off); };
    return (at(2) - 2.0 * at(1) + 2.0 * at(-1) - at(-2)) / (2.0 * h * h * h);
}

}  // namespace

Field quadrature_convolve(const Field& f, bool derivative) {
    const Grid& g = *f.grid;
    const std::size_t n = g.size();
    const double h = g.spacing();

    // Kernel depends only on |i - j|; tabulate once.
    std::vector<double> kernel(n);
    for (std::size_t d = 0; d < n; ++d)
        kernel[d] = 0.5 * std::exp(-h * static_cast<double>(d));

    Field out = make_field(f.grid);
    const double h2 = h * h / 12.0;
    const double h4 = h * h * h * h / 720.0;
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        if (!derivative) {
            for (std::size_t j = 0; j < n; ++j)
                acc += kernel[i >= j ? i - j : j - i] * f[j];
            acc *= h;
            // Trapezoid across the kernel kink at y = x_i: the integrand's
            // first/third derivative jumps are -f and -(f + 3 f'').
            acc += -h2 * f[i] + h4 * (f[i] + 3.0 * fd2(f.values, i, h));
        } else {
            for (std::size_t j = 0; j < i; ++j) acc -= kernel[i - j] * f[j];
            for (std::size_t j = i + 1; j < n; ++j) acc += kernel[j - i] * f[j];
            acc *= h;
            // dG/dx kernel jumps by 1 at y = x_i (node value sgn(0)=0).
            const double f1 = fd1(f.values, i, h);
            acc += h2 * f1 - h4 * (3.0 * f1 + fd3(f.values, i, h));
        }
        out[i] = acc;
    }
    return out;
}

Field dealias(const Field& f) {
    const Grid& g = *f.grid;
    auto spec = g.forward(f.values);
    for (std::size_t j = g.dealias_cutoff() + 1; j < spec.size(); ++j) spec[j] = 0.0;
    Field out;
    out.grid = f.grid;
    out.values = g.inverse(spec);
    return out;
}

double integrate(const Field& f) {
    double s = 0.0;
    for (double v : f.values) s += v;
    return s * f.grid->spacing();
}

double inner(const Field& a, const Field& b) {
    require_same_grid(a, b);
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s * a.grid->spacing();
}

double max_abs(const Field& f) {
    double m = 0.0;
    for (double v : f.values) m = std::max(m, std::abs(v));
    return m;
}

double min_value(const Field& f) {
    double m = f.values.empty() ? 0.0 : f[0];
    for (double v : f.values) m = std::min(m, v);
    return m;
}

bool all_finite(const Field& f) {
    for (double v : f.values)
        if (!std::isfinite(v)) return false;
    return true;
}

Field shift(const Field& f, double s) {
    const Grid& g = *f.grid;
    auto spec = g.forward(f.values);
    auto k = g.wavenumbers();
    for (std::size_t j = 0; j + 1 < spec.size(); ++j)
        spec[j] *= std::exp(std::complex<double>(0.0, -k[j] * s));
    spec.back() = 0.0;
    Field out;
    out.grid = f.grid;
    out.values = g.inverse(spec);
    return out;
}

Field reflect(const Field& f, double b) {
    const Grid& g = *f.grid;
    auto spec = g.forward(f.values);
    auto k = g.wavenumbers();
    const double c = b + g.half_width();  // phase relative to the first node
    for (std::size_t j = 0; j + 1 < spec.size(); ++j)
        spec[j] = std::conj(spec[j]) * std::exp(std::complex<double>(0.0, -2.0 * k[j] * c));
    spec.back() = 0.0;
    Field out;
    out.grid = f.grid;
    out.values = g.inverse(spec);
    return out;
}

}  // namespace ch3
