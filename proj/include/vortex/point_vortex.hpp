#pragma once

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "vortex/errors.hpp"
#include "vortex/geometry.hpp"
#include "vortex/green.hpp"

namespace vortex {

/// N point vortices on the torus with circulations kappa_n (plus the implicit
/// uniform background making total vorticity zero).
struct VortexConfiguration {
    std::vector<TorusPoint> centers;
    std::vector<double> circulations;
    TorusGeometry geometry;
};

struct EquilibriumReport {
    std::vector<std::complex<double>> residuals;
    double max_abs = 0.0;
    bool centralized = false;
    int hessian_rank = 0;
};

namespace detail {

inline void validate_configuration(const VortexConfiguration& cfg, const char* who) {
    const std::size_t n = cfg.centers.size();
    if (n == 0 || cfg.circulations.size() != n)
        throw config_error(std::string(who) + ": need N >= 1 centers with matching circulations");
    for (std::size_t m = 0; m < n; ++m)
        for (std::size_t k = m + 1; k < n; ++k) {
            const Vec2 w = min_image_displacement(cfg.centers[m], cfg.centers[k], cfg.geometry);
            if (w.norm() < 1e-8)
                throw singularity_error(std::string(who) + ": centers " + std::to_string(m) + " and " +
                                        std::to_string(k) + " coincide");
        }
}

}  // namespace detail

/// Interaction energy (Hamiltonian)
///   W_N = sum_{m<n} kappa_m kappa_n G(x_m, x_n) + (1/2) sum_m kappa_m^2 H(x_m, x_m),
/// whose critical points are the point-vortex equilibria. The diagonal H value
/// is the Robin constant (position-independent).
inline double kirchhoff_routh(const VortexConfiguration& cfg) {
    detail::validate_configuration(cfg, "kirchhoff_routh");
    const std::size_t n = cfg.centers.size();
    double acc = 0.0;
    for (std::size_t m = 0; m < n; ++m)
        for (std::size_t k = m + 1; k < n; ++k)
            acc += cfg.circulations[m] * cfg.circulations[k] *
                   green_eval(cfg.centers[m], cfg.centers[k], cfg.geometry);
    double self = 0.0;
    for (double kap : cfg.circulations) self += kap * kap;
    return acc + 0.5 * self * robin_constant(cfg.geometry.rho, cfg.geometry.policy);
}

/// Equilibrium residuals
///   f_m = sum_{n != m} kappa_n [ (1/2pi) K(nu_m/nu_n) - 1/(4pi)
///                                + log|nu_m/nu_n| / (2pi log rho) ],
/// evaluated with the min-image displacement representative per pair (the
/// value is representative-independent through the K quasi-periodicity).
/// All f_m vanish exactly at equilibria. The third coefficient follows the
/// differentiation of the Green function; the finite-difference gradient of
/// W_N adjudicates it in the tests.
inline std::vector<std::complex<double>> equilibrium_residual(const VortexConfiguration& cfg) {
    detail::validate_configuration(cfg, "equilibrium_residual");
    const std::size_t n = cfg.centers.size();
    const double h = cfg.geometry.height;
    std::vector<std::complex<double>> f(n, {0.0, 0.0});
    for (std::size_t m = 0; m < n; ++m) {
        std::complex<double> acc(0.0, 0.0);
        for (std::size_t k = 0; k < n; ++k) {
            if (k == m) continue;
            const Vec2 w = min_image_displacement(cfg.centers[m], cfg.centers[k], cfg.geometry);
            const complex_t ratio = std::exp(-w.y) * complex_t(std::cos(w.x), std::sin(w.x));
            const complex_t kval = eval_K(ratio, cfg.geometry.rho, cfg.geometry.policy);
            // log|ratio| = -w2 and log rho = -h
            acc += cfg.circulations[k] *
                   (kval / two_pi - complex_t(1.0 / (4.0 * pi), 0.0) + complex_t(w.y / (two_pi * h), 0.0));
        }
        f[m] = acc;
    }
    return f;
}

/// Velocity of vortex m under the Hamiltonian flow:
///   kappa_m v_m = (-dW/dx2, +dW/dx1) at x_m,  grad W = kappa_m sum kappa_n grad_1 G.
inline Vec2 vortex_velocity(const VortexConfiguration& cfg, int m) {
    detail::validate_configuration(cfg, "vortex_velocity");
    const std::size_t n = cfg.centers.size();
    if (m < 0 || static_cast<std::size_t>(m) >= n) throw config_error("vortex_velocity: index out of range");
    Vec2 g{0.0, 0.0};
    for (std::size_t k = 0; k < n; ++k) {
        if (static_cast<std::size_t>(m) == k) continue;
        const Vec2 w = min_image_displacement(cfg.centers[m], cfg.centers[k], cfg.geometry);
        const double r2 = w.norm2();
        const Vec2 grad_g = -1.0 / (two_pi * r2) * w + grad_regular_part_displacement(w, cfg.geometry) +
                            (1.0 / cfg.geometry.area) * w;
        g = g + cfg.circulations[k] * grad_g;
    }
    return {-g.y, g.x};
}

/// True iff sum x_{n1} = N pi and sum x_{n2} = N height/2 within tol, using
/// fundamental-cell representatives.
inline bool is_centralized(const VortexConfiguration& cfg, double tol) {
    double s1 = 0.0, s2 = 0.0;
    for (const TorusPoint& p : cfg.centers) {
        const TorusPoint c = canonical(p, cfg.geometry);
        s1 += c.x1;
        s2 += c.x2;
    }
    const double n = static_cast<double>(cfg.centers.size());
    return std::abs(s1 - n * pi) <= tol && std::abs(s2 - 0.5 * n * cfg.geometry.height) <= tol;
}

/// Numerical rank of the 2N x 2N central finite-difference Hessian of W_N
/// (step 1e-4): singular values above tol times the largest. Translation
/// invariance forces rank <= 2N - 2.
inline int hessian_rank(const VortexConfiguration& cfg, double tol = 1e-6) {
    detail::validate_configuration(cfg, "hessian_rank");
    const int n2 = 2 * static_cast<int>(cfg.centers.size());
    const double step = 1e-4;
    auto shifted = [&](int coord, double delta) {
        VortexConfiguration c = cfg;
        if (coord % 2 == 0)
            c.centers[coord / 2].x1 += delta;
        else
            c.centers[coord / 2].x2 += delta;
        return c;
    };
    auto shifted2 = [&](int ci, double di, int cj, double dj) {
        VortexConfiguration c = cfg;
        auto apply = [&](int coord, double delta) {
            if (coord % 2 == 0)
                c.centers[coord / 2].x1 += delta;
            else
                c.centers[coord / 2].x2 += delta;
        };
        apply(ci, di);
        apply(cj, dj);
        return c;
    };
    Eigen::MatrixXd hess(n2, n2);
    const double w0 = kirchhoff_routh(cfg);
    for (int i = 0; i < n2; ++i) {
        hess(i, i) = (kirchhoff_routh(shifted(i, step)) - 2.0 * w0 + kirchhoff_routh(shifted(i, -step))) /
                     (step * step);
        for (int j = i + 1; j < n2; ++j) {
            const double v = (kirchhoff_routh(shifted2(i, step, j, step)) -
                              kirchhoff_routh(shifted2(i, step, j, -step)) -
                              kirchhoff_routh(shifted2(i, -step, j, step)) +
                              kirchhoff_routh(shifted2(i, -step, j, -step))) /
                             (4.0 * step * step);
            hess(i, j) = v;
            hess(j, i) = v;
        }
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(hess);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0) return 0;
    const double cutoff = tol * sv(0);
    int rank = 0;
    for (int i = 0; i < sv.size(); ++i)
        if (sv(i) > cutoff && sv(i) > 0.0) ++rank;
    return rank;
}

namespace detail {

/// Translate all centers so the centralized sums hold exactly, then fold into
/// the fundamental cell. Leaves every pairwise displacement (and hence the
/// residual) unchanged.
inline void centralize_in_place(VortexConfiguration& cfg) {
    double s1 = 0.0, s2 = 0.0;
    for (const TorusPoint& p : cfg.centers) {
        const TorusPoint c = canonical(p, cfg.geometry);
        s1 += c.x1;
        s2 += c.x2;
    }
    const double n = static_cast<double>(cfg.centers.size());
    const double d1 = (n * pi - s1) / n;
    const double d2 = (0.5 * n * cfg.geometry.height - s2) / n;
    for (TorusPoint& p : cfg.centers) {
        p.x1 += d1;
        p.x2 += d2;
        p = canonical(p, cfg.geometry);
    }
}

}  // namespace detail

/// Newton root-finder for the equilibrium residuals under the centralized
/// constraint: the 2N residual components plus the two constraint rows are
/// solved in the least-squares sense over the 2N center coordinates
/// (the constraints pin the two translation null directions). Line search by
/// halving (max 30), at most 50 iterations; an input already at a root is
/// returned after the exact centralizing translation only.
inline VortexConfiguration find_equilibrium(VortexConfiguration cfg, double tol) {
    detail::validate_configuration(cfg, "find_equilibrium");
    if (!(tol > 0.0)) throw config_error("find_equilibrium: tol must be positive");
    const int n = static_cast<int>(cfg.centers.size());
    const int rows = 2 * n + 2;
    const int cols = 2 * n;

    auto residual_vector = [&](const VortexConfiguration& c) {
        Eigen::VectorXd r(rows);
        const auto f = equilibrium_residual(c);
        for (int m = 0; m < n; ++m) {
            r(2 * m) = f[m].real();
            r(2 * m + 1) = f[m].imag();
        }
        double s1 = 0.0, s2 = 0.0;
        for (const TorusPoint& p : c.centers) {
            const TorusPoint q = canonical(p, c.geometry);
            s1 += q.x1;
            s2 += q.x2;
        }
        r(2 * n) = s1 - n * pi;
        r(2 * n + 1) = s2 - 0.5 * n * c.geometry.height;
        return r;
    };
    auto max_abs_f = [&](const VortexConfiguration& c) {
        double mx = 0.0;
        for (const auto& fm : equilibrium_residual(c)) mx = std::max(mx, std::abs(fm));
        return mx;
    };

    if (max_abs_f(cfg) <= tol) {  // already a root: adjust the gauge only
        detail::centralize_in_place(cfg);
        return cfg;
    }

    const double fd = 1e-6;
    for (int iter = 0; iter < 50; ++iter) {
        Eigen::VectorXd r0 = residual_vector(cfg);
        Eigen::MatrixXd jac(rows, cols);
        for (int c = 0; c < cols; ++c) {
            VortexConfiguration pert = cfg;
            if (c % 2 == 0)
                pert.centers[c / 2].x1 += fd;
            else
                pert.centers[c / 2].x2 += fd;
            jac.col(c) = (residual_vector(pert) - r0) / fd;
        }
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(jac);
        if (qr.rank() < cols)
            throw rank_error("find_equilibrium: Jacobian rank-deficient beyond the translation pair");
        const Eigen::VectorXd step_full = qr.solve(-r0);
        double lambda = 1.0;
        const double merit0 = r0.squaredNorm();
        bool accepted = false;
        for (int half = 0; half <= 30; ++half) {
            VortexConfiguration trial = cfg;
            for (int c = 0; c < cols; ++c) {
                if (c % 2 == 0)
                    trial.centers[c / 2].x1 += lambda * step_full(c);
                else
                    trial.centers[c / 2].x2 += lambda * step_full(c);
            }
            if (residual_vector(trial).squaredNorm() < merit0) {
                cfg = trial;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if (!accepted) throw convergence_error("find_equilibrium: line search stalled");
        if (max_abs_f(cfg) <= tol) {
            detail::centralize_in_place(cfg);
            return cfg;
        }
    }
    throw convergence_error("find_equilibrium: no convergence within 50 iterations");
}

/// N unit-circulation vortices in a row: centers (d + 2 pi n / N, h).
inline VortexConfiguration ring_configuration(int N, double d, double h, const TorusGeometry& geom) {
    if (N < 1) throw config_error("ring_configuration: N >= 1 required");
    if (!(d > 0.0) || !(d < two_pi / N))
        throw config_error("ring_configuration: need 0 < d < 2pi/N");
    if (!(h > 0.0) || !(h < geom.height))
        throw config_error("ring_configuration: need 0 < h < -log rho");
    VortexConfiguration cfg{{}, {}, geom};
    for (int n = 0; n < N; ++n) {
        cfg.centers.push_back({d + two_pi * n / N, h});
        cfg.circulations.push_back(1.0);
    }
    return cfg;
}

/// Assemble the full report for a configuration.
inline EquilibriumReport make_equilibrium_report(const VortexConfiguration& cfg, double centralized_tol = 1e-10) {
    EquilibriumReport rep;
    rep.residuals = equilibrium_residual(cfg);
    rep.max_abs = 0.0;
    for (const auto& f : rep.residuals) rep.max_abs = std::max(rep.max_abs, std::abs(f));
    rep.centralized = is_centralized(cfg, centralized_tol);
    rep.hessian_rank = hessian_rank(cfg);
    return rep;
}

}  // namespace vortex
