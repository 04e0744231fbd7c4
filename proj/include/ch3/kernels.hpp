#pragma once

#include <array>
#include <span>
#include <vector>

namespace ch3 {

/// Piecewise-exponential weights used in the weighted convolution estimates.
///   J_N:   e^{aN} on (-inf,-N),  e^{-ax} on [-N,0],  1 on (0,inf)
///   phi_N: 1 on (-inf,0),        e^{ax} on [0,N],    e^{aN} on (N,inf)
/// phi_N is the mirror image of J_N. The exponent must satisfy a in (0,1).
enum class WeightForm { J_N, phi_N };

struct WeightSpec {
    WeightForm form = WeightForm::J_N;
    double alpha = 0.5;
    int N = 1;
};

void validate(const WeightSpec& spec);  // throws std::invalid_argument

double weight_eval(const WeightSpec& spec, double x);

/// The weighted kernel product
///   f(x) = 2 * weight(x) * (G * weight^{-1})(x) = weight(x) Int e^{-|x-y|}/weight(y) dy,
/// assembled from exact piecewise-exponential primitives. With derivative=true
/// the kernel e^{-|x-y|} is replaced by sgn(y-x) e^{-|x-y|}, i.e. the result is
/// 2 * weight(x) * (dG/dx * weight^{-1})(x); its magnitude never exceeds the
/// plain product.
double kernel_product_exact(const WeightSpec& spec, double x, bool derivative = false);

/// Independent oracle: adaptive Simpson quadrature of the defining integral,
/// split at the integrand kinks.
double kernel_product_quadrature(const WeightSpec& spec, double x, bool derivative = false);

struct KernelScanResult {
    WeightSpec spec;
    double sup_value = 0.0;                  // sup_x of the (|.| for derivative) product
    double arg_sup = 0.0;                    // where the sup is attained
    std::array<double, 3> per_case_sups{};   // per piecewise region, left to right
    double uniform_bound_used = 0.0;         // certified N-uniform bound 1 + 1/(1-a)
};

/// Maximize the weighted product over x for each N: dense sampling per region
/// plus golden-section refinement near the junctions. The certified uniform
/// bound is the monotone N->inf limit of the exact supremum.
std::vector<KernelScanResult> lemma32_scan(double alpha, std::span<const int> N_list,
                                           WeightForm form = WeightForm::J_N,
                                           bool derivative = false);

/// Exact closed form of the supremum of the plain product (attained at the
/// inner junction): 1 + e^{-(1-a)N} + (1 - e^{-(1-a)N})/(1-a).
double kernel_sup_closed_form(double alpha, int N);

}  // namespace ch3
