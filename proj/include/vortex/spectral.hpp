#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "vortex/errors.hpp"
#include "vortex/geometry.hpp"

namespace vortex {

/// Real trigonometric polynomial
///   f(s) = mean + sum_{j=1}^{J} a_j cos(js) + b_j sin(js)
/// with its collocation grid size M (uniform nodes s_i = 2 pi i / M).
/// Curves in the cosine-only space have all sin_coeffs zero; the projected
/// subspaces used by the solver additionally have the j = 1 coefficients zero.
struct FourierCurve {
    std::vector<double> cos_coeffs;  ///< a_j, j = 1..J at index j-1
    std::vector<double> sin_coeffs;  ///< b_j, j = 1..J at index j-1
    double mean = 0.0;
    int grid_size = 0;               ///< M (even, M >= 4J)

    int modes() const { return static_cast<int>(cos_coeffs.size()); }
};

/// Zero curve with J retained modes on an M-point grid.
inline FourierCurve zero_curve(int J, int M) {
    if (J < 0 || M < 4 || M % 2 != 0) throw config_error("zero_curve: need even M >= 4 and J >= 0");
    FourierCurve c;
    c.cos_coeffs.assign(static_cast<std::size_t>(J), 0.0);
    c.sin_coeffs.assign(static_cast<std::size_t>(J), 0.0);
    c.grid_size = M;
    return c;
}

namespace detail {

/// cos/sin of 2 pi d / M for d = 0..M-1 with the exact mirror symmetries
/// cos(M-d) = cos(d), sin(M-d) = -sin(d) enforced (the assemblies rely on
/// exact cancellation of the antisymmetric parts).
struct TrigTable {
    int M = 0;
    std::vector<double> cos_d, sin_d;

    explicit TrigTable(int M_) : M(M_), cos_d(M_), sin_d(M_) {
        cos_d[0] = 1.0;
        sin_d[0] = 0.0;
        for (int d = 1; d <= M / 2; ++d) {
            const double ang = two_pi * d / M;
            cos_d[d] = std::cos(ang);
            sin_d[d] = std::sin(ang);
        }
        if (M % 2 == 0) sin_d[M / 2] = 0.0;
        for (int d = M / 2 + 1; d < M; ++d) {
            cos_d[d] = cos_d[M - d];
            sin_d[d] = -sin_d[M - d];
        }
    }
};

}  // namespace detail

/// Discrete Fourier analysis of M uniform samples on [0, 2pi): returns the
/// trigonometric interpolant's coefficients, retaining J modes
/// (default M/4, per the M >= 4J aliasing policy; J <= M/2 - 1 always).
inline FourierCurve analyze(const std::vector<double>& samples, int J = -1) {
    const int M = static_cast<int>(samples.size());
    if (M < 4 || M % 2 != 0) throw config_error("analyze: need an even number of samples, at least 4");
    if (J < 0) J = M / 4;
    if (J > M / 2 - 1) throw config_error("analyze: J must be at most M/2 - 1");
    const detail::TrigTable t(M);
    FourierCurve c = zero_curve(J, M);
    double mean = 0.0;
    for (int i = 0; i < M; ++i) mean += samples[i];
    c.mean = mean / M;
    for (int j = 1; j <= J; ++j) {
        double ca = 0.0, cb = 0.0;
        int d = 0;
        for (int i = 0; i < M; ++i) {
            ca += samples[i] * t.cos_d[d];
            cb += samples[i] * t.sin_d[d];
            d += j;
            if (d >= M) d -= M;
        }
        c.cos_coeffs[j - 1] = 2.0 * ca / M;
        c.sin_coeffs[j - 1] = 2.0 * cb / M;
    }
    return c;
}

/// Evaluate the trigonometric polynomial at an arbitrary point s.
inline double synthesize(const FourierCurve& c, double s) {
    double acc = c.mean;
    for (int j = 1; j <= c.modes(); ++j)
        acc += c.cos_coeffs[j - 1] * std::cos(j * s) + c.sin_coeffs[j - 1] * std::sin(j * s);
    return acc;
}

/// Evaluate on the curve's own M-point grid (table-exact, O(M J)).
inline std::vector<double> synthesize_grid(const FourierCurve& c) {
    const int M = c.grid_size;
    if (M < 4) throw config_error("synthesize_grid: curve has no grid size");
    const detail::TrigTable t(M);
    std::vector<double> out(static_cast<std::size_t>(M), c.mean);
    for (int j = 1; j <= c.modes(); ++j) {
        const double a = c.cos_coeffs[j - 1];
        const double b = c.sin_coeffs[j - 1];
        if (a == 0.0 && b == 0.0) continue;
        int d = 0;
        for (int i = 0; i < M; ++i) {
            out[i] += a * t.cos_d[d] + b * t.sin_d[d];
            d += j;
            if (d >= M) d -= M;
        }
    }
    return out;
}

/// Sobolev norm (sum over both families of |c_j|^2 j^{2k})^{1/2}; the mean is
/// excluded (the solver's spaces are mean-free).
inline double sobolev_norm(const FourierCurve& c, int k) {
    if (k < 0) throw config_error("sobolev_norm: k must be nonnegative");
    double acc = 0.0;
    for (int j = 1; j <= c.modes(); ++j) {
        const double a = c.cos_coeffs[j - 1];
        const double b = c.sin_coeffs[j - 1];
        acc += (a * a + b * b) * std::pow(static_cast<double>(j), 2.0 * k);
    }
    return std::sqrt(acc);
}

/// Termwise derivative: cos(js) -> -j sin(js), sin(js) -> j cos(js).
inline FourierCurve derivative(const FourierCurve& c) {
    FourierCurve d = c;
    d.mean = 0.0;
    for (int j = 1; j <= c.modes(); ++j) {
        d.cos_coeffs[j - 1] = static_cast<double>(j) * c.sin_coeffs[j - 1];
        d.sin_coeffs[j - 1] = -static_cast<double>(j) * c.cos_coeffs[j - 1];
    }
    return d;
}

/// Projection dropping the first mode (j = 1) in both families; idempotent.
inline FourierCurve project_drop_first(FourierCurve c) {
    if (c.modes() >= 1) {
        c.cos_coeffs[0] = 0.0;
        c.sin_coeffs[0] = 0.0;
    }
    return c;
}

/// Coefficient-space u + t*v (grids must match; modes are merged).
inline FourierCurve add_scaled(const FourierCurve& u, double t, const FourierCurve& v) {
    if (u.grid_size != v.grid_size) throw config_error("add_scaled: grid sizes differ");
    FourierCurve out = zero_curve(std::max(u.modes(), v.modes()), u.grid_size);
    out.mean = u.mean + t * v.mean;
    for (int j = 0; j < u.modes(); ++j) {
        out.cos_coeffs[j] = u.cos_coeffs[j];
        out.sin_coeffs[j] = u.sin_coeffs[j];
    }
    for (int j = 0; j < v.modes(); ++j) {
        out.cos_coeffs[j] += t * v.cos_coeffs[j];
        out.sin_coeffs[j] += t * v.sin_coeffs[j];
    }
    return out;
}

/// Coefficient-space t*u.
inline FourierCurve scaled(const FourierCurve& u, double t) {
    FourierCurve out = u;
    out.mean *= t;
    for (auto& a : out.cos_coeffs) a *= t;
    for (auto& b : out.sin_coeffs) b *= t;
    return out;
}

}  // namespace vortex
