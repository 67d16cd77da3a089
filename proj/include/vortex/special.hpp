#pragma once

#include <cmath>
#include <complex>
#include <string>

#include "vortex/errors.hpp"
#include "vortex/geometry.hpp"

namespace vortex {

using complex_t = std::complex<double>;

namespace detail {
/// Radius around poles/zeros inside which K evaluation is refused.
inline constexpr double pole_exclusion_radius = 1e-8;
}  // namespace detail

/// Smallest n >= 1 with rho^n/(1-rho) < tol. Throws truncation_error (with the
/// required term count) if that n exceeds policy.max_terms.
inline int truncation_length(double rho, double tol, const TruncationPolicy& policy = {}) {
    if (!(rho > 0.0) || !(rho < 1.0))
        throw domain_error("truncation_length: rho must lie in (0,1)");
    if (!(tol > 0.0)) throw domain_error("truncation_length: tol must be positive");
    const double threshold = tol * (1.0 - rho);
    double power = rho;  // rho^n
    for (long n = 1; n <= 100000000L; ++n) {
        if (power < threshold) {
            if (n > policy.max_terms)
                throw truncation_error(
                    "truncation_length: required " + std::to_string(n) + " terms, cap is " +
                        std::to_string(policy.max_terms),
                    n);
            return static_cast<int>(n);
        }
        power *= rho;
    }
    throw truncation_error("truncation_length: tolerance unreachable in double precision", -1);
}

namespace detail {

inline void check_annulus_domain(complex_t zeta, double rho, const char* who) {
    if (zeta == complex_t(0.0, 0.0)) throw domain_error(std::string(who) + ": zeta must be nonzero");
    const double r = std::abs(zeta);
    if (!(r > rho) || !(r < 1.0 / rho))
        throw domain_error(std::string(who) + ": |zeta| must lie in (rho, 1/rho), got " +
                           std::to_string(r) + " at rho = " + std::to_string(rho));
}

}  // namespace detail

/// The product Ptilde(zeta) = prod_{n>=1} (1 - rho^n zeta)(1 - rho^n / zeta):
/// the prime function with its (1 - zeta) factor removed. Zero-free on the
/// open annulus rho < |zeta| < 1/rho.
inline complex_t eval_Ptilde(complex_t zeta, double rho, const TruncationPolicy& policy = {}) {
    detail::check_annulus_domain(zeta, rho, "eval_Ptilde");
    const int terms = truncation_length(rho, policy.tol, policy);
    const complex_t inv = 1.0 / zeta;
    complex_t acc(1.0, 0.0);
    double rn = 1.0;
    for (int n = 1; n <= terms; ++n) {
        rn *= rho;
        acc *= (1.0 - rn * zeta) * (1.0 - rn * inv);
    }
    return acc;
}

/// The prime function P(zeta) = (1 - zeta) * Ptilde(zeta). Simple zeros at
/// zeta = rho^k for every integer k (only zeta = 1 lies in the open annulus).
inline complex_t eval_P(complex_t zeta, double rho, const TruncationPolicy& policy = {}) {
    return (1.0 - zeta) * eval_Ptilde(zeta, rho, policy);
}

/// Ktilde(zeta) = zeta * Ptilde'(zeta)/Ptilde(zeta)
///             = sum_{n>=1} [ -rho^n zeta/(1 - rho^n zeta) + rho^n/(zeta - rho^n) ].
/// Analytic on the open annulus (its poles rho^{+-n} lie outside).
inline complex_t eval_Ktilde(complex_t zeta, double rho, const TruncationPolicy& policy = {}) {
    detail::check_annulus_domain(zeta, rho, "eval_Ktilde");
    const double r = std::abs(zeta);
    if (r <= rho * (1.0 + detail::pole_exclusion_radius) ||
        r >= (1.0 - detail::pole_exclusion_radius) / rho)
        throw singularity_error("eval_Ktilde: zeta within the pole exclusion band at |zeta| ~ rho^{+-1}");
    const int terms = truncation_length(rho, policy.tol, policy);
    complex_t acc(0.0, 0.0);
    double rn = 1.0;
    for (int n = 1; n <= terms; ++n) {
        rn *= rho;
        acc += -rn * zeta / (1.0 - rn * zeta) + rn / (zeta - rn);
    }
    return acc;
}

/// K(zeta) = zeta P'(zeta)/P(zeta) = zeta/(zeta - 1) + Ktilde(zeta).
/// The series form is used directly (never numerical differentiation of P).
inline complex_t eval_K(complex_t zeta, double rho, const TruncationPolicy& policy = {}) {
    if (std::abs(zeta - complex_t(1.0, 0.0)) < detail::pole_exclusion_radius)
        throw singularity_error("eval_K: zeta within the exclusion radius of the pole at 1");
    return zeta / (zeta - 1.0) + eval_Ktilde(zeta, rho, policy);
}

}  // namespace vortex
