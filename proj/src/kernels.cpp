#include "ch3/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace ch3 {

namespace {

// Left/right exponential masses of the defining integral for the J_N weight:
//   A(x) = Int_{-inf}^{x} e^{y-x} / J_N(y) dy,
//   B(x) = Int_{x}^{inf} e^{x-y} / J_N(y) dy.
// Then f = J_N (A+B) and the derivative variant is J_N (B-A).
struct Masses {
    double A, B;
};

Masses jn_masses(double alpha, double N, double x) {
    const double beta = 1.0 - alpha;
    Masses m{};
    if (x <= -N) {
        m.A = std::exp(-alpha * N);
        m.B = std::exp(-alpha * N) * (1.0 - std::exp(x + N)) +
              std::exp(x) * (std::expm1(beta * N) / beta + 1.0);
    } else if (x <= 0.0) {
        m.A = std::exp(-x - N - alpha * N) +
              std::exp(-x) * (std::exp((1.0 + alpha) * x) - std::exp(-(1.0 + alpha) * N)) /
                  (1.0 + alpha);
        m.B = (std::exp(alpha * x) - std::exp(x)) / beta + std::exp(x);
    } else {
        m.A = std::exp(-x - (1.0 + alpha) * N) +
              std::exp(-x) * (1.0 - std::exp(-(1.0 + alpha) * N)) / (1.0 + alpha) +
              (1.0 - std::exp(-x));
        m.B = 1.0;
    }
    return m;
}

double jn_weight(double alpha, double N, double x) {
    if (x < -N) return std::exp(alpha * N);
    if (x <= 0.0) return std::exp(-alpha * x);
    return 1.0;
}

double jn_product(double alpha, double N, double x, bool derivative) {
    const Masses m = jn_masses(alpha, N, x);
    const double w = jn_weight(alpha, N, x);
    return derivative ? w * (m.B - m.A) : w * (m.A + m.B);
}

// Adaptive Simpson on one smooth piece.
double simpson_adaptive(const std::function<double(double)>& f, double a, double b, double fa,
                        double fm, double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return simpson_adaptive(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_adaptive(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double integrate_piece(const std::function<double(double)>& f, double a, double b, double tol) {
    if (b <= a) return 0.0;
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_adaptive(f, a, b, fa, fm, fb, whole, tol, 48);
}

double golden_max(const std::function<double(double)>& f, double a, double b, double tol_x) {
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > tol_x) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = f(x1);
        }
    }
    return 0.5 * (a + b);
}

struct RegionMax {
    double value = -1.0;
    double arg = 0.0;
};

RegionMax maximize(const std::function<double(double)>& f, double a, double b,
                   std::size_t samples) {
    RegionMax best;
    const double h = (b - a) / static_cast<double>(samples);
    for (std::size_t i = 0; i <= samples; ++i) {
        const double x = a + h * static_cast<double>(i);
        const double v = f(x);
        if (v > best.value) {
            best.value = v;
            best.arg = x;
        }
    }
    const double lo = std::max(a, best.arg - h), hi = std::min(b, best.arg + h);
    const double xr = golden_max(f, lo, hi, 1e-10);
    const double vr = f(xr);
    if (vr > best.value) {
        best.value = vr;
        best.arg = xr;
    }
    return best;
}

}  // namespace

void validate(const WeightSpec& spec) {
    if (!(spec.alpha > 0.0) || !(spec.alpha < 1.0))
        throw std::invalid_argument("weight exponent must lie strictly inside (0, 1)");
    if (spec.N < 1) throw std::invalid_argument("weight junction N must be a positive integer");
}

double weight_eval(const WeightSpec& spec, double x) {
    validate(spec);
    const double N = static_cast<double>(spec.N);
    if (spec.form == WeightForm::J_N) return jn_weight(spec.alpha, N, x);
    return jn_weight(spec.alpha, N, -x);  // phi_N is the mirror image
}

double kernel_product_exact(const WeightSpec& spec, double x, bool derivative) {
    validate(spec);
    const double N = static_cast<double>(spec.N);
    if (spec.form == WeightForm::J_N) return jn_product(spec.alpha, N, x, derivative);
    const double mirrored = jn_product(spec.alpha, N, -x, derivative);
    return derivative ? -mirrored : mirrored;
}

double kernel_product_quadrature(const WeightSpec& spec, double x, bool derivative) {
    validate(spec);
    // The outer weight (up to e^{aN}) is folded into the integrand so the
    // quadrature tolerance applies to the product itself.
    const double wx = weight_eval(spec, x);
    auto integrand = [&](double y) {
        return wx * std::exp(-std::abs(x - y)) / weight_eval(spec, y);
    };
    // The kernel localizes the integral around x; e^{-50} is far below the
    // 1e-12 quadrature tolerance. Pieces are cut at every integrand kink, and
    // at x itself so the sgn(y-x) factor of the derivative variant is constant
    // on each piece.
    const double lo = x - 50.0, hi = x + 50.0;
    std::vector<double> cuts = {lo, hi, x};
    const double j0 = spec.form == WeightForm::J_N ? -static_cast<double>(spec.N) : 0.0;
    const double j1 = spec.form == WeightForm::J_N ? 0.0 : static_cast<double>(spec.N);
    for (double c : {j0, j1})
        if (c > lo && c < hi) cuts.push_back(c);
    std::sort(cuts.begin(), cuts.end());
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double piece = integrate_piece(integrand, cuts[i], cuts[i + 1], 1e-12);
        const double sign = derivative ? (0.5 * (cuts[i] + cuts[i + 1]) > x ? 1.0 : -1.0) : 1.0;
        total += sign * piece;
    }
    return total;
}

double kernel_sup_closed_form(double alpha, int N) {
    const double beta = 1.0 - alpha;
    const double s = std::exp(-beta * static_cast<double>(N));
    return 1.0 + s + (1.0 - s) / beta;
}

std::vector<KernelScanResult> lemma32_scan(double alpha, std::span<const int> N_list,
                                           WeightForm form, bool derivative) {
    if (!(alpha > 0.0) || !(alpha < 1.0))
        throw std::invalid_argument("lemma32_scan: alpha must lie strictly inside (0, 1)");

    std::vector<KernelScanResult> results;
    for (int N : N_list) {
        WeightSpec spec{form, alpha, N};
        validate(spec);
        auto f = [&](double x) {
            const double v = kernel_product_exact(spec, x, derivative);
            return derivative ? std::abs(v) : v;
        };
        const double Nd = static_cast<double>(N);
        // Region boundaries for J_N; mirrored for phi_N. The unbounded sides
        // are truncated where e^{-|x|} tails put the product within 1e-20 of
        // its limit.
        std::array<std::pair<double, double>, 3> regions;
        if (form == WeightForm::J_N)
            regions = {{{-Nd - 60.0, -Nd}, {-Nd, 0.0}, {0.0, 60.0}}};
        else
            regions = {{{-60.0, 0.0}, {0.0, Nd}, {Nd, Nd + 60.0}}};

        KernelScanResult r;
        r.spec = spec;
        for (std::size_t c = 0; c < 3; ++c) {
            const RegionMax m = maximize(f, regions[c].first, regions[c].second, 10000);
            r.per_case_sups[c] = m.value;
            if (m.value > r.sup_value) {
                r.sup_value = m.value;
                r.arg_sup = m.arg;
            }
        }
        r.uniform_bound_used = 1.0 + 1.0 / (1.0 - alpha);
        results.push_back(r);
    }
    return results;
}

}  // namespace ch3
