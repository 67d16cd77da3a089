#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "vortex/contour.hpp"
#include "vortex/errors.hpp"
#include "vortex/geometry.hpp"
#include "vortex/point_vortex.hpp"
#include "vortex/spectral.hpp"

namespace vortex {

/// Continuation grid 0, then 12 geometric steps from 1e-3 to 0.08.
inline std::vector<double> default_eps_grid() {
    std::vector<double> g{0.0};
    const double lo = 1e-3, hi = 0.08;
    for (int k = 0; k < 12; ++k) g.push_back(lo * std::pow(hi / lo, static_cast<double>(k) / 11.0));
    return g;
}

struct SolveSettings {
    double tol_residual = 1e-10;  ///< convergence target in H^{k-1} after dropping the first mode
    int max_newton = 50;
    int M = 256;                  ///< collocation nodes
    int J = 32;                   ///< highest retained unknown mode
    int k = 3;                    ///< Sobolev index of the solution space
    std::vector<double> eps_grid = default_eps_grid();
    double fd_step = 1e-6;        ///< Jacobian finite-difference step in coefficient space
    bool independent_negative_branch = false;  ///< solve eps < 0 through the half-turn conjugate
};

struct SingleSolution {
    double gamma = 0.0;
    FourierCurve u;
    int newton_iterations = 0;
    double residual_norm = 0.0;
};

struct MultiSolution {
    std::vector<TorusPoint> centers;
    std::vector<FourierCurve> curves;
    int newton_iterations = 0;
    double residual_norm = 0.0;
};

/// One accepted continuation state. Single-layer runs fill gamma and one
/// curve; multi-patch runs fill centers and one curve per patch.
struct ContinuationState {
    double eps = 0.0;
    double gamma = 0.0;
    std::vector<TorusPoint> centers;
    std::vector<FourierCurve> curves;
    double residual_norm = 0.0;
    double min_curvature = 0.0;  ///< min over nodes (and patches) of the scaled curvature eps*kappa
    double decay_rate = 0.0;     ///< worst Fourier-decay slope over patches; NaN when unresolved
    int newton_iterations = 0;
};

struct ContinuationRun {
    std::vector<ContinuationState> states;
    bool failed = false;
    double failure_eps = 0.0;
    std::string failure;
};

namespace detail {

inline void validate_settings(const SolveSettings& s) {
    if (!(s.tol_residual > 0.0)) throw config_error("SolveSettings: tol_residual must be positive");
    if (s.max_newton < 1) throw config_error("SolveSettings: max_newton must be at least 1");
    if (s.M < 8 || s.M % 2 != 0) throw config_error("SolveSettings: M must be even, at least 8");
    if (s.J < 2 || s.J > s.M / 4) throw config_error("SolveSettings: need 2 <= J <= M/4");
    if (s.k < 1) throw config_error("SolveSettings: k must be at least 1");
    if (!(s.fd_step > 0.0)) throw config_error("SolveSettings: fd_step must be positive");
    if (s.eps_grid.empty() || s.eps_grid.front() != 0.0)
        throw config_error("SolveSettings: eps grid must start at 0");
    for (std::size_t i = 1; i < s.eps_grid.size(); ++i)
        if (!(s.eps_grid[i] > s.eps_grid[i - 1]))
            throw config_error("SolveSettings: eps grid must be strictly increasing");
}

}  // namespace detail

/// Pointwise curvature of the physical boundary x(s) = center + eps R(s) sigma(s):
///   kappa(s) = (R^2 + 2 R'^2 - R R'') / (eps (R^2 + R'^2)^{3/2}),  R = 1 + eps u.
inline double curvature(const FourierCurve& u, double eps, double s) {
    if (!(eps > 0.0)) throw config_error("curvature: eps must be positive");
    const FourierCurve du = derivative(u);
    const FourierCurve ddu = derivative(du);
    const double r = 1.0 + eps * synthesize(u, s);
    const double rp = eps * synthesize(du, s);
    const double rpp = eps * synthesize(ddu, s);
    if (!(r > 0.0)) throw geometry_error("curvature: boundary self-intersects (R <= 0)");
    const double den = std::pow(r * r + rp * rp, 1.5);
    return (r * r + 2.0 * rp * rp - r * rpp) / (eps * den);
}

/// Minimum over the collocation grid of the scaled curvature eps*kappa(s)
/// (finite at eps = 0, where it equals 1). Positive iff the patch is convex.
inline double min_scaled_curvature(const FourierCurve& u, double eps) {
    const int m = u.grid_size;
    const detail::TrigTable t(m);
    const detail::GridCurve g = detail::make_grid_curve(u, eps, t, "min_scaled_curvature");
    const std::vector<double> rpp_grid = synthesize_grid(derivative(derivative(u)));
    double mn = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m; ++i) {
        const double r = g.r[i], rp = g.rp[i], rpp = eps * rpp_grid[i];
        const double v = (r * r + 2.0 * rp * rp - r * rpp) / std::pow(r * r + rp * rp, 1.5);
        mn = std::min(mn, v);
    }
    return mn;
}

/// Least-squares slope of log|m_j| against log j over the resolved modes
/// (those above the floor max(1e-14, 1e-12 * max_j m_j), m_j = |(a_j, b_j)|).
/// Returns NaN when fewer than three modes resolve (single-mode curves, the
/// trivial state): not enough data for a meaningful rate.
inline double decay_diagnostic(const FourierCurve& u) {
    double mx = 0.0;
    for (int j = 1; j <= u.modes(); ++j)
        mx = std::max(mx, std::hypot(u.cos_coeffs[j - 1], u.sin_coeffs[j - 1]));
    const double floor_v = std::max(1e-14, 1e-12 * mx);
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int count = 0;
    for (int j = 1; j <= u.modes(); ++j) {
        const double mj = std::hypot(u.cos_coeffs[j - 1], u.sin_coeffs[j - 1]);
        if (mj <= floor_v) continue;
        const double x = std::log(static_cast<double>(j));
        const double y = std::log(mj);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++count;
    }
    if (count < 3) return std::numeric_limits<double>::quiet_NaN();
    const double det = count * sxx - sx * sx;
    if (det <= 0.0) return std::numeric_limits<double>::quiet_NaN();
    return (count * sxy - sx * sy) / det;
}

namespace detail {

/// Cosine-only curve from the Newton unknowns a_2..a_J (a_1 pinned to zero).
inline FourierCurve curve_from_unknowns(const Eigen::VectorXd& x, int J, int M) {
    FourierCurve u = zero_curve(J, M);
    for (int j = 2; j <= J; ++j) u.cos_coeffs[j - 1] = x(j - 2);
    return u;
}

/// Half-turn conjugation in coefficient space: u(s) -> u(s + pi) flips the
/// sign of the odd modes.
inline FourierCurve half_turn(const FourierCurve& u) {
    FourierCurve out = u;
    for (int j = 1; j <= u.modes(); ++j)
        if (j % 2 == 1) {
            out.cos_coeffs[j - 1] = -out.cos_coeffs[j - 1];
            out.sin_coeffs[j - 1] = -out.sin_coeffs[j - 1];
        }
    return out;
}

/// gamma* and the residual curve at gamma* from a single assembly at gamma=1:
/// the residual is affine in gamma through the background part.
struct EliminatedResidual {
    double gamma = 0.0;
    FourierCurve curve;
};

inline EliminatedResidual eliminate_gamma(const ContourResidual& at_unit_gamma) {
    const double c1 = at_unit_gamma.parts[3].sin_coeffs.empty() ? 0.0 : at_unit_gamma.parts[3].sin_coeffs[0];
    const double total1 = at_unit_gamma.total.sin_coeffs[0];
    const double c0 = total1 - c1;
    if (!(std::abs(c1) > 1e-13 * std::max(1.0, std::abs(c0))))
        throw convergence_error("solve_gamma: residual is insensitive to gamma (degenerate background coefficient)");
    EliminatedResidual out;
    out.gamma = -c0 / c1;
    out.curve = add_scaled(at_unit_gamma.total, out.gamma - 1.0, at_unit_gamma.parts[3]);
    return out;
}

/// Single-layer residual evaluation with nested gamma elimination; optionally
/// conjugated through the half turn (the independent negative-eps branch:
/// F~(u) := -S F(|eps|, S u) with S the half-turn shift, whose roots are the
/// half-turn images of the positive-branch roots).
template <class Assemble>
EliminatedResidual eval_single(const Assemble& assemble, const FourierCurve& u, bool conjugate) {
    if (!conjugate) return eliminate_gamma(assemble(u));
    EliminatedResidual r = eliminate_gamma(assemble(half_turn(u)));
    r.curve = scaled(half_turn(r.curve), -1.0);
    return r;
}

}  // namespace detail

/// The gamma for which the sin(s) coefficient of the assembled residual
/// vanishes; the residual is affine in gamma, so one assembly suffices.
inline double solve_gamma(const SingleLayerProblem& p, const FourierCurve& u) {
    SingleLayerProblem p1 = p;
    p1.gamma = 1.0;
    return detail::eliminate_gamma(assemble_single(p1, u)).gamma;
}

/// Newton solve of the single-layer problem at p.eps: cosine coefficients
/// a_2..a_J are the unknowns, gamma is eliminated inside every residual
/// evaluation, the Newton matrix is a centered finite-difference Jacobian over
/// frozen-kernel re-assemblies (exact to first order in the boundary motion),
/// preconditioned by the exact diagonal (j-1)/2 of the disk linearization.
/// Negative p.eps is solved at |eps|; by the half-turn reflection the
/// negative branch carries the same cosine coefficients and the same gamma,
/// which is what is returned (set independent_negative_branch to instead run
/// Newton on the conjugated operator and obtain the equivalent root
/// independently).
inline SingleSolution solve_single(const SingleLayerProblem& p, const SolveSettings& settings,
                                   const FourierCurve* warm_start = nullptr) {
    detail::validate_settings(settings);
    SingleLayerProblem work = p;
    const bool mirrored = p.eps < 0.0;
    work.eps = std::abs(p.eps);
    work.gamma = 1.0;
    const bool conjugate = mirrored && settings.independent_negative_branch;

    const int J = settings.J, M = settings.M;
    const int n_unknowns = J - 1;
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n_unknowns);
    if (warm_start) {
        for (int j = 2; j <= J; ++j)
            if (j - 1 <= warm_start->modes()) x(j - 2) = warm_start->cos_coeffs[j - 1];
    }

    auto exact_cached = [&](const FourierCurve& u) { return assemble_single_cached(work, u); };
    auto residual_rows = [&](const FourierCurve& curve_total) {
        Eigen::VectorXd r(n_unknowns);
        for (int j = 2; j <= J; ++j) r(j - 2) = curve_total.sin_coeffs[j - 1];
        return r;
    };
    auto projected_norm = [&](const FourierCurve& curve_total) {
        return sobolev_norm(project_drop_first(curve_total), settings.k - 1);
    };

    SingleSolution sol;
    FourierCurve u = detail::curve_from_unknowns(x, J, M);

    // current state: exact assembly with recorded kernel data
    auto [res, cache] = exact_cached(conjugate ? detail::half_turn(u) : u);
    detail::EliminatedResidual cur = detail::eliminate_gamma(res);
    if (conjugate) cur.curve = scaled(detail::half_turn(cur.curve), -1.0);
    double norm = projected_norm(cur.curve);

    for (int iter = 0; iter < settings.max_newton; ++iter) {
        if (norm <= settings.tol_residual) break;

        // frozen-kernel centered differences; gamma re-eliminated per column
        auto frozen_eval = [&](const Eigen::VectorXd& xx) {
            FourierCurve uu = detail::curve_from_unknowns(xx, J, M);
            if (conjugate) uu = detail::half_turn(uu);
            ContourResidual rr = assemble_single_frozen(work, uu, cache);
            detail::EliminatedResidual er = detail::eliminate_gamma(rr);
            if (conjugate) er.curve = scaled(detail::half_turn(er.curve), -1.0);
            return residual_rows(er.curve);
        };
        Eigen::MatrixXd jac(n_unknowns, n_unknowns);
        for (int c = 0; c < n_unknowns; ++c) {
            Eigen::VectorXd xp = x, xm = x;
            xp(c) += settings.fd_step;
            xm(c) -= settings.fd_step;
            jac.col(c) = (frozen_eval(xp) - frozen_eval(xm)) / (2.0 * settings.fd_step);
        }
        Eigen::VectorXd r0 = residual_rows(cur.curve);
        // left preconditioning by the inverse disk diagonal (j-1)/2
        for (int row = 0; row < n_unknowns; ++row) {
            const double scale_row = 2.0 / (row + 1);  // 1 / ((j-1)/2), j = row + 2
            jac.row(row) *= scale_row;
            r0(row) *= scale_row;
        }
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(jac);
        if (qr.rank() < n_unknowns)
            throw rank_error("solve_single: Newton matrix is rank-deficient");
        const Eigen::VectorXd step = qr.solve(-r0);

        bool accepted = false;
        double lambda = 1.0;
        for (int half = 0; half <= 30; ++half) {
            const Eigen::VectorXd xt = x + lambda * step;
            FourierCurve ut = detail::curve_from_unknowns(xt, J, M);
            auto [res_t, cache_t] = exact_cached(conjugate ? detail::half_turn(ut) : ut);
            detail::EliminatedResidual trial = detail::eliminate_gamma(res_t);
            if (conjugate) trial.curve = scaled(detail::half_turn(trial.curve), -1.0);
            const double norm_t = projected_norm(trial.curve);
            if (norm_t < norm || norm_t <= settings.tol_residual) {
                x = xt;
                u = ut;
                cur = trial;
                cache = std::move(cache_t);
                norm = norm_t;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        sol.newton_iterations = iter + 1;
        if (!accepted) throw convergence_error("solve_single: line search stalled");
    }
    if (norm > settings.tol_residual)
        throw convergence_error("solve_single: no convergence within max_newton iterations");

    sol.gamma = cur.gamma;
    sol.u = u;
    sol.residual_norm = norm;
    return sol;
}

/// Adjust the centers so the first-mode (sin s and cos s) coefficients of all
/// patch residuals vanish, under the exact centralized constraint. Gauss-
/// Newton in the 2N center coordinates with the two constraint rows appended;
/// every step is followed by the exact centralizing translation (the residual
/// is translation-invariant). Curves are held fixed.
inline std::vector<TorusPoint> solve_centers(const MultiPatchProblem& p,
                                             const std::vector<FourierCurve>& us,
                                             const SolveSettings& settings) {
    detail::validate_settings(settings);
    const int n = static_cast<int>(p.centers.size());
    MultiPatchProblem work = p;

    auto centralize = [&](std::vector<TorusPoint>& centers) {
        double s1 = 0.0, s2 = 0.0;
        for (const TorusPoint& c : centers) {
            const TorusPoint q = canonical(c, work.geometry);
            s1 += q.x1;
            s2 += q.x2;
        }
        const double d1 = (n * pi - s1) / n;
        const double d2 = (0.5 * n * work.geometry.height - s2) / n;
        for (TorusPoint& c : centers) {
            c.x1 += d1;
            c.x2 += d2;
            c = canonical(c, work.geometry);
        }
    };
    centralize(work.centers);

    auto first_mode_rows = [&](const std::vector<ContourResidual>& rs) {
        Eigen::VectorXd r(2 * n);
        for (int m = 0; m < n; ++m) {
            r(2 * m) = rs[m].total.sin_coeffs[0];
            r(2 * m + 1) = rs[m].total.cos_coeffs[0];
        }
        return r;
    };

    for (int iter = 0; iter <= settings.max_newton; ++iter) {
        auto [rs, cache] = assemble_multi_cached(work, us);
        Eigen::VectorXd r0 = first_mode_rows(rs);
        if (r0.lpNorm<Eigen::Infinity>() <= settings.tol_residual) return work.centers;
        if (iter == settings.max_newton) break;

        Eigen::MatrixXd jac(2 * n + 2, 2 * n);
        Eigen::VectorXd rhs(2 * n + 2);
        rhs.head(2 * n) = r0;
        rhs(2 * n) = 0.0;  // constraints hold exactly after centralize
        rhs(2 * n + 1) = 0.0;
        for (int c = 0; c < 2 * n; ++c) {
            auto shift = [&](double delta) {
                MultiPatchProblem pp = work;
                if (c % 2 == 0)
                    pp.centers[c / 2].x1 += delta;
                else
                    pp.centers[c / 2].x2 += delta;
                return first_mode_rows(assemble_multi_frozen(pp, us, cache));
            };
            jac.col(c).head(2 * n) =
                (shift(settings.fd_step) - shift(-settings.fd_step)) / (2.0 * settings.fd_step);
            jac(2 * n, c) = (c % 2 == 0) ? 1.0 : 0.0;
            jac(2 * n + 1, c) = (c % 2 == 0) ? 0.0 : 1.0;
        }
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(jac);
        if (qr.rank() < 2 * n)
            throw rank_error("solve_centers: center system rank-deficient beyond the translation pair");
        const Eigen::VectorXd step = qr.solve(-rhs);

        const double merit0 = r0.squaredNorm();
        bool accepted = false;
        double lambda = 1.0;
        for (int half = 0; half <= 30; ++half) {
            MultiPatchProblem trial = work;
            for (int c = 0; c < 2 * n; ++c) {
                if (c % 2 == 0)
                    trial.centers[c / 2].x1 += lambda * step(c);
                else
                    trial.centers[c / 2].x2 += lambda * step(c);
            }
            centralize(trial.centers);
            const Eigen::VectorXd rt = first_mode_rows(assemble_multi(trial, us));
            if (rt.squaredNorm() < merit0 || rt.lpNorm<Eigen::Infinity>() <= settings.tol_residual) {
                work.centers = trial.centers;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if (!accepted) throw convergence_error("solve_centers: line search stalled");
    }
    throw convergence_error("solve_centers: no convergence within max_newton iterations");
}

/// Newton solve of the multi-patch problem: unknowns are both coefficient
/// families, modes 2..J, of every patch curve; the centers are re-solved by
/// solve_centers inside every residual evaluation and held frozen along the
/// Jacobian columns (inexact Newton; the coupling is O(eps) and the line
/// search guards the step). Convergence is the worst patch's projected
/// H^{k-1} residual norm.
inline MultiSolution solve_multi(const MultiPatchProblem& p, const SolveSettings& settings,
                                 const std::vector<FourierCurve>* warm_curves = nullptr,
                                 const std::vector<TorusPoint>* warm_centers = nullptr) {
    detail::validate_settings(settings);
    const int n = static_cast<int>(p.centers.size());
    const int J = settings.J, M = settings.M;
    const int per_patch = 2 * (J - 1);
    const int dim = n * per_patch;

    MultiPatchProblem work = p;
    if (warm_centers) work.centers = *warm_centers;

    Eigen::VectorXd x = Eigen::VectorXd::Zero(dim);
    if (warm_curves) {
        for (int m = 0; m < n; ++m)
            for (int j = 2; j <= J; ++j) {
                if (j - 1 <= (*warm_curves)[m].modes()) {
                    x(m * per_patch + (j - 2)) = (*warm_curves)[m].cos_coeffs[j - 1];
                    x(m * per_patch + (J - 1) + (j - 2)) = (*warm_curves)[m].sin_coeffs[j - 1];
                }
            }
    }

    auto curves_from = [&](const Eigen::VectorXd& xx) {
        std::vector<FourierCurve> us;
        us.reserve(static_cast<std::size_t>(n));
        for (int m = 0; m < n; ++m) {
            FourierCurve u = zero_curve(J, M);
            for (int j = 2; j <= J; ++j) {
                u.cos_coeffs[j - 1] = xx(m * per_patch + (j - 2));
                u.sin_coeffs[j - 1] = xx(m * per_patch + (J - 1) + (j - 2));
            }
            us.push_back(std::move(u));
        }
        return us;
    };
    auto stacked_rows = [&](const std::vector<ContourResidual>& rs) {
        Eigen::VectorXd r(dim);
        for (int m = 0; m < n; ++m)
            for (int j = 2; j <= J; ++j) {
                r(m * per_patch + (j - 2)) = rs[m].total.sin_coeffs[j - 1];
                r(m * per_patch + (J - 1) + (j - 2)) = rs[m].total.cos_coeffs[j - 1];
            }
        return r;
    };
    auto worst_norm = [&](const std::vector<ContourResidual>& rs) {
        double w = 0.0;
        for (const ContourResidual& r : rs)
            w = std::max(w, sobolev_norm(project_drop_first(r.total), settings.k - 1));
        return w;
    };

    MultiSolution sol;
    std::vector<FourierCurve> us = curves_from(x);
    work.centers = solve_centers(work, us, settings);
    auto [rs, cache] = assemble_multi_cached(work, us);
    double norm = worst_norm(rs);

    for (int iter = 0; iter < settings.max_newton; ++iter) {
        if (norm <= settings.tol_residual) break;

        Eigen::MatrixXd jac(dim, dim);
        for (int c = 0; c < dim; ++c) {
            Eigen::VectorXd xp = x, xm = x;
            xp(c) += settings.fd_step;
            xm(c) -= settings.fd_step;
            const Eigen::VectorXd rp = stacked_rows(assemble_multi_frozen(work, curves_from(xp), cache));
            const Eigen::VectorXd rm = stacked_rows(assemble_multi_frozen(work, curves_from(xm), cache));
            jac.col(c) = (rp - rm) / (2.0 * settings.fd_step);
        }
        Eigen::VectorXd r0 = stacked_rows(rs);
        for (int m = 0; m < n; ++m) {
            const double kappa_scale = pi / p.circulations[m];
            for (int j = 2; j <= J; ++j) {
                const double row_scale = kappa_scale * 2.0 / (j - 1);
                jac.row(m * per_patch + (j - 2)) *= row_scale;
                r0(m * per_patch + (j - 2)) *= row_scale;
                jac.row(m * per_patch + (J - 1) + (j - 2)) *= row_scale;
                r0(m * per_patch + (J - 1) + (j - 2)) *= row_scale;
            }
        }
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(jac);
        if (qr.rank() < dim) throw rank_error("solve_multi: Newton matrix is rank-deficient");
        const Eigen::VectorXd step = qr.solve(-r0);

        bool accepted = false;
        double lambda = 1.0;
        for (int half = 0; half <= 30; ++half) {
            const Eigen::VectorXd xt = x + lambda * step;
            std::vector<FourierCurve> ut = curves_from(xt);
            MultiPatchProblem trial = work;
            trial.centers = solve_centers(trial, ut, settings);
            auto [rs_t, cache_t] = assemble_multi_cached(trial, ut);
            const double norm_t = worst_norm(rs_t);
            if (norm_t < norm || norm_t <= settings.tol_residual) {
                x = xt;
                us = std::move(ut);
                work.centers = trial.centers;
                rs = std::move(rs_t);
                cache = std::move(cache_t);
                norm = norm_t;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        sol.newton_iterations = iter + 1;
        if (!accepted) throw convergence_error("solve_multi: line search stalled");
    }
    if (norm > settings.tol_residual)
        throw convergence_error("solve_multi: no convergence within max_newton iterations");

    sol.centers = work.centers;
    sol.curves = us;
    sol.residual_norm = norm;
    return sol;
}

/// Warm-started continuation of the single-layer family along the eps grid.
/// The first grid point must be 0 (the trivial root). Solve failure ends the
/// run; the states already accepted are returned with the failure recorded.
inline ContinuationRun continue_in_eps(const SingleLayerProblem& p, const SolveSettings& settings) {
    detail::validate_settings(settings);
    ContinuationRun run;
    const FourierCurve* warm = nullptr;
    FourierCurve last;
    for (double eps : settings.eps_grid) {
        SingleLayerProblem pe = p;
        pe.eps = eps;
        try {
            const SingleSolution sol = solve_single(pe, settings, warm);
            ContinuationState st;
            st.eps = eps;
            st.gamma = sol.gamma;
            st.curves = {sol.u};
            st.residual_norm = sol.residual_norm;
            st.min_curvature = min_scaled_curvature(sol.u, eps);
            st.decay_rate = decay_diagnostic(sol.u);
            st.newton_iterations = sol.newton_iterations;
            run.states.push_back(std::move(st));
            last = run.states.back().curves[0];
            warm = &last;
        } catch (const error& e) {
            run.failed = true;
            run.failure_eps = eps;
            run.failure = e.what();
            break;
        }
    }
    return run;
}

/// Multi-patch continuation; curves and centers are both warm-started.
inline ContinuationRun continue_in_eps(const MultiPatchProblem& p, const SolveSettings& settings) {
    detail::validate_settings(settings);
    ContinuationRun run;
    std::vector<FourierCurve> warm_curves;
    std::vector<TorusPoint> warm_centers = p.centers;
    bool have_warm = false;
    for (double eps : settings.eps_grid) {
        MultiPatchProblem pe = p;
        pe.eps = eps;
        try {
            const MultiSolution sol =
                solve_multi(pe, settings, have_warm ? &warm_curves : nullptr, &warm_centers);
            ContinuationState st;
            st.eps = eps;
            st.centers = sol.centers;
            st.curves = sol.curves;
            st.residual_norm = sol.residual_norm;
            double mc = std::numeric_limits<double>::infinity();
            double worst_decay = std::numeric_limits<double>::quiet_NaN();
            for (const FourierCurve& u : sol.curves) {
                mc = std::min(mc, min_scaled_curvature(u, eps));
                const double dr = decay_diagnostic(u);
                if (!std::isnan(dr) && (std::isnan(worst_decay) || dr > worst_decay)) worst_decay = dr;
            }
            st.min_curvature = mc;
            st.decay_rate = worst_decay;
            st.newton_iterations = sol.newton_iterations;
            run.states.push_back(std::move(st));
            warm_curves = run.states.back().curves;
            warm_centers = run.states.back().centers;
            have_warm = true;
        } catch (const error& e) {
            run.failed = true;
            run.failure_eps = eps;
            run.failure = e.what();
            break;
        }
    }
    return run;
}

}  // namespace vortex
