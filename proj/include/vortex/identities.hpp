#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "vortex/contour.hpp"
#include "vortex/special.hpp"

namespace vortex {

/// One named identity check: the measured worst error over the check's grid
/// against the tolerance it is required to meet.
struct IdentityCheck {
    std::string name;
    double max_error = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

namespace detail {

inline IdentityCheck make_check(std::string name, double err, double tol) {
    IdentityCheck c;
    c.name = std::move(name);
    c.max_error = err;
    c.tolerance = tol;
    c.pass = err <= tol;
    return c;
}

}  // namespace detail

/// Battery of the analytic identities the special-function and quadrature
/// layers are required to satisfy. Deterministic grids; every check reports
/// its worst error. Used by the CLI `identities` subcommand and the tests.
inline std::vector<IdentityCheck> identity_battery(double rho, const TruncationPolicy& policy = {}) {
    if (!(rho > 0.0) || !(rho < 1.0)) throw domain_error("identity_battery: rho must lie in (0,1)");
    std::vector<IdentityCheck> out;
    const double tol_exact = 1e-12;
    const double tol_chain = 10.0 * std::max(policy.tol, 1e-13);

    // deterministic grid with 1 < |zeta| < 1/rho, kept away from zeta = 1 and
    // the real-axis poles, so that rho*zeta and 1/zeta stay inside (rho, 1/rho)
    std::vector<complex_t> grid;
    const double radii[3] = {std::pow(rho, -0.25), 1.0 / std::sqrt(rho), 0.5 * (1.0 + 1.0 / rho)};
    for (double r : radii)
        for (int k = 1; k <= 13; ++k) {
            const double th = pi * k / 7.0;
            grid.push_back({r * std::cos(th), r * std::sin(th)});
        }

    {
        const complex_t k = eval_K({-1.0, 0.0}, rho, policy);
        out.push_back(detail::make_check("K(-1) = 1/2", std::abs(k - complex_t{0.5, 0.0}), tol_exact));
    }
    {
        double e1 = 0.0, e2 = 0.0;
        for (const complex_t& z : grid) {
            const complex_t kz = eval_K(z, rho, policy);
            const complex_t krz = eval_K(rho * z, rho, policy);
            const complex_t kinv = eval_K(1.0 / z, rho, policy);
            e1 = std::max(e1, std::abs(krz - kz + 1.0));
            e2 = std::max(e2, std::abs(kinv + krz));
        }
        out.push_back(detail::make_check("K(rho z) = K(z) - 1", e1, tol_chain));
        out.push_back(detail::make_check("K(1/z) = -K(rho z)", e2, tol_chain));
    }
    {
        double e = 0.0;
        for (int k = 1; k <= 17; ++k) {
            const double th = pi * k / 9.0;
            const complex_t z{std::cos(th), std::sin(th)};
            e = std::max(e, std::abs(eval_K(z, rho, policy) + eval_K(std::conj(z), rho, policy) - 1.0));
        }
        out.push_back(detail::make_check("K(z) + K(conj z) = 1 on |z| = 1", e, tol_chain));
    }
    {
        double e = 0.0;
        for (const complex_t& z : grid)
            e = std::max(e, std::abs(eval_P(1.0 / z, rho, policy) + eval_P(z, rho, policy) / z));
        out.push_back(detail::make_check("P(1/z) = -P(z)/z", e, tol_chain));
        out.push_back(detail::make_check("P(1) = 0", std::abs(eval_P({1.0, 0.0}, rho, policy)), 0.0));
    }
    {
        TruncationPolicy finer = policy;
        finer.tol = policy.tol * 1e-3;
        double e = 0.0;
        for (const complex_t& z : grid) {
            e = std::max(e, std::abs(eval_P(z, rho, policy) - eval_P(z, rho, finer)));
            e = std::max(e, std::abs(eval_K(z, rho, policy) - eval_K(z, rho, finer)));
        }
        out.push_back(detail::make_check("truncation self-consistency", e, tol_chain));
    }
    {
        // Fourier coefficients of the circulant log-kernel weights: the full
        // kernel log(1/(4 sin^2(t/2))) integrates cos(mt) to 1/m, its half
        // log(1/(2 sin(t/2))) to 1/(2m)
        const int m_grid = 256;
        const detail::TrigTable t(m_grid);
        const std::vector<double> w = detail::log_kernel_weights(m_grid, t);
        double e_full = 0.0, e_half = 0.0;
        for (int m = 1; m <= m_grid / 2 - 1; ++m) {
            double acc = 0.0;
            for (int d = 0; d < m_grid; ++d)
                acc += w[d] * std::cos(two_pi * m * d / m_grid);
            e_full = std::max(e_full, std::abs(acc - 1.0 / m));
            e_half = std::max(e_half, std::abs(0.5 * acc - 0.5 / m));
        }
        out.push_back(detail::make_check("log-kernel weights: cos(mt) -> 1/m", e_full, tol_exact));
        out.push_back(detail::make_check("half log-kernel weights: cos(mt) -> 1/(2m)", e_half, tol_exact));
    }
    return out;
}

}  // namespace vortex
