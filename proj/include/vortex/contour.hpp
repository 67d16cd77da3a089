#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "vortex/errors.hpp"
#include "vortex/geometry.hpp"
#include "vortex/green.hpp"
#include "vortex/spectral.hpp"

namespace vortex {

/// Row of N identical patches of scale eps at centers (d + 2 pi n / N, h),
/// boundaries x(s) = center + eps R(s) (cos s, sin s) with R = 1 + eps u(s),
/// against a uniform background of total circulation gamma.
struct SingleLayerProblem {
    int patches = 1;        ///< N
    double d = 0.0;         ///< row offset, 0 < d < 2 pi / N
    double h = 0.0;         ///< row height, 0 < h < -log rho
    double gamma = 0.0;     ///< background circulation
    double eps = 0.0;       ///< patch scale, >= 0 (0 selects the analytic disk limit)
    TorusGeometry geometry;
};

/// N patches of scale eps at arbitrary centers with circulations kappa_n;
/// the compensating background is determined by sum kappa_n.
struct MultiPatchProblem {
    std::vector<TorusPoint> centers;
    std::vector<double> circulations;
    double eps = 0.0;
    TorusGeometry geometry;
};

/// Residual of the steady contour-dynamics equation sampled at the M
/// collocation nodes and analyzed into Fourier coefficients. parts holds the
/// four mechanisms: [0] same-patch log kernel, [1] other-patch log kernel,
/// [2] regular part of the Green function, [3] background/center term.
struct ContourResidual {
    FourierCurve total;
    std::array<FourierCurve, 4> parts;
};

/// Frozen first-order kernel data recorded during an assembly: per (pair,
/// node i, node j) the displacement argument, the regular part with its
/// gradient, and the log term with its gradient factor. Assemblies replayed
/// against the cache agree with exact assemblies to first order in the curve
/// motion, which makes centered differences of the replay match the exact
/// directional derivative to quadrature precision at a tiny fraction of the
/// cost (the kernel evaluations dominate the assembly).
struct AssemblyCache {
    int pairs = 0;
    int grid = 0;
    std::vector<double> rows;         ///< 7 doubles per (pair, i, j): p1 p2 H g1 g2 loginv invsq
};

namespace detail {

inline constexpr std::size_t kernel_row_stride = 7;

inline void validate_single(const SingleLayerProblem& p) {
    if (p.patches < 1) throw config_error("assemble_single: need at least one patch");
    if (!(p.d > 0.0) || !(p.d < two_pi / p.patches))
        throw config_error("assemble_single: need 0 < d < 2pi/N");
    if (!(p.h > 0.0) || !(p.h < p.geometry.height))
        throw config_error("assemble_single: need 0 < h < -log rho");
    if (!(p.eps >= 0.0)) throw config_error("assemble_single: eps must be >= 0");
}

inline void validate_multi(const MultiPatchProblem& p) {
    const std::size_t n = p.centers.size();
    if (n == 0 || p.circulations.size() != n)
        throw config_error("assemble_multi: need N >= 1 centers with matching circulations");
    if (!(p.eps >= 0.0)) throw config_error("assemble_multi: eps must be >= 0");
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b) {
            const double dist = min_image_displacement(p.centers[a], p.centers[b], p.geometry).norm();
            if (!(dist > 4.0 * p.eps))
                throw geometry_error("assemble_multi: centers " + std::to_string(a) + " and " +
                                     std::to_string(b) + " closer than 4 eps");
        }
}

inline void validate_curve(const FourierCurve& u, const char* who) {
    const int m = u.grid_size;
    if (m < 8 || m % 2 != 0) throw config_error(std::string(who) + ": curve needs an even grid, at least 8 nodes");
    if (u.modes() > m / 4)
        throw config_error(std::string(who) + ": curve modes exceed the alias-free cap M/4");
}

/// Grid samples of R = 1 + eps u and R' = eps u' (plus R cos s, R sin s).
struct GridCurve {
    std::vector<double> r, rp, rc, rs;
};

inline GridCurve make_grid_curve(const FourierCurve& u, double eps, const TrigTable& t, const char* who) {
    const int m = u.grid_size;
    GridCurve g;
    g.r = synthesize_grid(u);
    g.rp = synthesize_grid(derivative(u));
    g.rc.resize(m);
    g.rs.resize(m);
    for (int i = 0; i < m; ++i) {
        g.r[i] = 1.0 + eps * g.r[i];
        g.rp[i] = eps * g.rp[i];
        if (!(g.r[i] > 0.0)) throw geometry_error(std::string(who) + ": boundary self-intersects (R <= 0)");
        g.rc[i] = g.r[i] * t.cos_d[i];
        g.rs[i] = g.r[i] * t.sin_d[i];
    }
    return g;
}

/// Circulant quadrature weights for the even kernel log(1/(4 sin^2(tau/2))):
/// W_d = (2/M) sum_{p=1}^{M/2-1} cos(2 pi p d / M) / p. Ordinary averaging
/// against these weights integrates trigonometric polynomials of degree
/// < M/2 against the kernel exactly (mean coefficient 0, cos(p tau) -> 1/p).
inline std::vector<double> log_kernel_weights(int m, const TrigTable& t) {
    std::vector<double> w(static_cast<std::size_t>(m));
    for (int d = 0; d < m; ++d) {
        double acc = 0.0;
        int idx = 0;
        for (int p = 1; p <= m / 2 - 1; ++p) {
            idx += d;
            if (idx >= m) idx -= m;
            acc += t.cos_d[idx] / p;
        }
        w[d] = 2.0 * acc / m;
    }
    return w;
}

/// Kernel source evaluating the torus Green function pieces directly;
/// optionally records the frozen first-order data. Both kernels return the
/// difference against the value at the pair's base displacement, computed in
/// fused ratio form: the differences are O(eps) and subtracting two separately
/// rounded O(1) evaluations would put a 1/eps floor under the residual.
class ExactKernels {
  public:
    ExactKernels(const TorusGeometry& geom, AssemblyCache* record) : geom_(&geom), record_(record) {}

    /// log(1/|base + disp|) - log(1/|base|)
    double log_inverse_diff(std::size_t row, const Vec2& base, const Vec2& disp) const {
        const double v = -log_ratio_magnitude(base.x, base.y, disp.x, disp.y);
        if (record_) {
            const double px = base.x + disp.x, py = base.y + disp.y;
            double* r = &record_->rows[row * kernel_row_stride];
            r[0] = px;
            r[1] = py;
            r[5] = v;
            r[6] = 1.0 / (px * px + py * py);
        }
        return v;
    }

    /// H(base + disp) - H(base)
    double regular_diff(std::size_t row, const Vec2& base, const Vec2& disp) const {
        const double v = regular_part_difference(base, disp, *geom_);
        if (record_) {
            const Vec2 pv{base.x + disp.x, base.y + disp.y};
            const Vec2 g = grad_regular_part_displacement(pv, *geom_);
            double* r = &record_->rows[row * kernel_row_stride];
            r[0] = pv.x;
            r[1] = pv.y;
            r[2] = v;
            r[3] = g.x;
            r[4] = g.y;
        }
        return v;
    }

  private:
    const TorusGeometry* geom_;
    AssemblyCache* record_;
};

/// Kernel source replaying a cache to first order in the displacement motion.
/// The recorded values already carry the base-displacement subtraction, so the
/// replay only adds the gradient term at the recorded anchor.
class FrozenKernels {
  public:
    explicit FrozenKernels(const AssemblyCache& cache) : cache_(&cache) {}

    double log_inverse_diff(std::size_t row, const Vec2& base, const Vec2& disp) const {
        const double* r = &cache_->rows[row * kernel_row_stride];
        const double px = base.x + disp.x, py = base.y + disp.y;
        return r[5] - (r[0] * (px - r[0]) + r[1] * (py - r[1])) * r[6];
    }

    double regular_diff(std::size_t row, const Vec2& base, const Vec2& disp) const {
        const double* r = &cache_->rows[row * kernel_row_stride];
        const double px = base.x + disp.x, py = base.y + disp.y;
        return r[2] + r[3] * (px - r[0]) + r[4] * (py - r[1]);
    }

  private:
    const AssemblyCache* cache_;
};

}  // namespace detail

/// Exact derivative of the residual at (eps = 0, disk): cosine mode j maps to
/// ((j-1)/2) sin(js), sine mode j to -((j-1)/2) cos(js).
inline FourierCurve linearized_at_disk(const FourierCurve& v) {
    FourierCurve out = zero_curve(v.modes(), v.grid_size);
    for (int j = 1; j <= v.modes(); ++j) {
        const double factor = 0.5 * (j - 1);
        out.sin_coeffs[j - 1] = factor * v.cos_coeffs[j - 1];
        out.cos_coeffs[j - 1] = -factor * v.sin_coeffs[j - 1];
    }
    return out;
}

namespace detail {

/// eps = 0 single-layer branch: the residual with the 1/eps factors cancelled
/// analytically. The same-patch part reduces to the exact diagonal map and the
/// remaining parts to first-mode terms built from the Green function pieces at
/// the inter-patch offsets.
inline ContourResidual single_disk_limit(const SingleLayerProblem& p, const FourierCurve& u) {
    const int m = u.grid_size;
    const int n_pat = p.patches;
    const int j_out = m / 4;
    ContourResidual res;

    FourierCurve f1 = linearized_at_disk(u);
    f1.cos_coeffs.resize(static_cast<std::size_t>(j_out), 0.0);
    f1.sin_coeffs.resize(static_cast<std::size_t>(j_out), 0.0);
    res.parts[0] = f1;

    FourierCurve f2 = zero_curve(j_out, m), f3 = zero_curve(j_out, m), f4 = zero_curve(j_out, m);
    for (int n = 1; n < n_pat; ++n) {
        const double a = two_pi * n / n_pat;
        f2.sin_coeffs[0] -= 1.0 / (2.0 * a);
        const Vec2 g = grad_regular_part_displacement({-a, 0.0}, p.geometry);
        f3.sin_coeffs[0] -= pi * g.x;
        f3.cos_coeffs[0] += pi * g.y;
    }
    f4.sin_coeffs[0] = p.gamma * (n_pat - 1) * pi / (n_pat * p.geometry.area);
    res.parts[1] = f2;
    res.parts[2] = f3;
    res.parts[3] = f4;

    res.total = zero_curve(j_out, m);
    for (int q = 0; q < 4; ++q) {
        for (int j = 0; j < j_out; ++j) {
            res.total.cos_coeffs[j] += res.parts[q].cos_coeffs[j];
            res.total.sin_coeffs[j] += res.parts[q].sin_coeffs[j];
        }
    }
    return res;
}

template <class Kernels>
ContourResidual assemble_single_core(const SingleLayerProblem& p, const FourierCurve& u, const Kernels& kern) {
    validate_single(p);
    validate_curve(u, "assemble_single");
    if (p.eps == 0.0) return single_disk_limit(p, u);

    const int m = u.grid_size;
    const int n_pat = p.patches;
    const double eps = p.eps;
    const TrigTable t(m);
    const GridCurve g = make_grid_curve(u, eps, t, "assemble_single");
    const std::vector<double> w = log_kernel_weights(m, t);

    std::vector<double> half(static_cast<std::size_t>(m), 1.0);
    for (int dd = 1; dd < m; ++dd) half[dd] = std::sin(pi * dd / m);

    std::vector<double> f1(m), f2(m), f3(m), f4(m), nij(m);
    const double back = (n_pat - 1) * pi / n_pat;
    for (int i = 0; i < m; ++i) {
        // same-patch log kernel: circulant weights for the periodic log part,
        // trapezoid rule for the smooth remainder with the diagonal filled by
        // its analytic limit -log(R'^2 + R^2)
        double acc_w = 0.0, acc_r = 0.0;
        for (int j = 0; j < m; ++j) {
            const int dd = i - j >= 0 ? i - j : i - j + m;
            const double v = (g.r[i] * g.r[j] + g.rp[i] * g.rp[j]) * t.sin_d[dd] +
                             (g.r[i] * g.rp[j] - g.rp[i] * g.r[j]) * t.cos_d[dd];
            nij[j] = v;
            double q;
            if (dd == 0) {
                q = g.rp[i];
            } else {
                q = (g.r[i] - g.r[j]) / (2.0 * half[dd]);
            }
            acc_w += w[dd] * v;
            acc_r += -std::log(q * q + g.r[i] * g.r[j]) * v;
        }
        f1[i] = (acc_w + acc_r / m) / (2.0 * eps * g.r[i]);

        // other-patch log kernel and the regular part, both centered on their
        // values at the patch offsets (the centering terms integrate to zero
        // exactly because sum_j N_ij = 0)
        double acc2 = 0.0, acc3 = 0.0;
        for (int n = 0; n < n_pat; ++n) {
            const Vec2 base{-two_pi * n / n_pat, 0.0};
            const std::size_t rowbase = (static_cast<std::size_t>(n) * m + i) * m;
            for (int j = 0; j < m; ++j) {
                if (j == i) continue;  // N_ii = 0 on the shared curve
                const Vec2 dv{eps * (g.rc[i] - g.rc[j]), eps * (g.rs[i] - g.rs[j])};
                if (n > 0) acc2 += kern.log_inverse_diff(rowbase + j, base, dv) * nij[j];
                acc3 += kern.regular_diff(rowbase + j, base, dv) * nij[j];
            }
        }
        f2[i] = acc2 / (m * eps * g.r[i]);
        f3[i] = two_pi * acc3 / (m * eps * g.r[i]);

        f4[i] = p.gamma / p.geometry.area *
                (eps * g.rp[i] - back * (g.rp[i] * t.cos_d[i] / g.r[i] - t.sin_d[i]));
    }

    ContourResidual res;
    res.parts[0] = analyze(f1);
    res.parts[1] = analyze(f2);
    res.parts[2] = analyze(f3);
    res.parts[3] = analyze(f4);
    res.total = zero_curve(res.parts[0].modes(), m);
    for (int q = 0; q < 4; ++q)
        for (int j = 0; j < res.total.modes(); ++j) {
            res.total.cos_coeffs[j] += res.parts[q].cos_coeffs[j];
            res.total.sin_coeffs[j] += res.parts[q].sin_coeffs[j];
        }
    return res;
}

/// eps = 0 multi-patch branch (see single_disk_limit); the first-mode terms
/// are built from the Green function pieces at the min-image center offsets.
inline std::vector<ContourResidual> multi_disk_limit(const MultiPatchProblem& p,
                                                     const std::vector<FourierCurve>& us) {
    const int n_pat = static_cast<int>(p.centers.size());
    const int m = us[0].grid_size;
    const int j_out = m / 4;
    std::vector<ContourResidual> out(static_cast<std::size_t>(n_pat));
    for (int mm = 0; mm < n_pat; ++mm) {
        ContourResidual& res = out[mm];
        FourierCurve f1 = scaled(linearized_at_disk(us[mm]), p.circulations[mm] / pi);
        f1.cos_coeffs.resize(static_cast<std::size_t>(j_out), 0.0);
        f1.sin_coeffs.resize(static_cast<std::size_t>(j_out), 0.0);
        res.parts[0] = f1;
        FourierCurve f2 = zero_curve(j_out, m), f3 = zero_curve(j_out, m), f4 = zero_curve(j_out, m);
        for (int n = 0; n < n_pat; ++n) {
            if (n == mm) continue;
            const double kap = p.circulations[n];
            const Vec2 wv = min_image_displacement(p.centers[mm], p.centers[n], p.geometry);
            const double r2 = wv.norm2();
            f2.sin_coeffs[0] += kap * wv.x / (two_pi * r2);
            f2.cos_coeffs[0] -= kap * wv.y / (two_pi * r2);
            const Vec2 gr = grad_regular_part_displacement(wv, p.geometry);
            f3.sin_coeffs[0] -= kap * gr.x;
            f3.cos_coeffs[0] += kap * gr.y;
            f4.sin_coeffs[0] -= kap * wv.x / p.geometry.area;
            f4.cos_coeffs[0] += kap * wv.y / p.geometry.area;
        }
        res.parts[1] = f2;
        res.parts[2] = f3;
        res.parts[3] = f4;
        res.total = zero_curve(j_out, m);
        for (int q = 0; q < 4; ++q)
            for (int j = 0; j < j_out; ++j) {
                res.total.cos_coeffs[j] += res.parts[q].cos_coeffs[j];
                res.total.sin_coeffs[j] += res.parts[q].sin_coeffs[j];
            }
    }
    return out;
}

template <class Kernels>
std::vector<ContourResidual> assemble_multi_core(const MultiPatchProblem& p,
                                                 const std::vector<FourierCurve>& us, const Kernels& kern) {
    validate_multi(p);
    const int n_pat = static_cast<int>(p.centers.size());
    if (static_cast<int>(us.size()) != n_pat)
        throw config_error("assemble_multi: one boundary curve per patch required");
    for (const FourierCurve& u : us) {
        validate_curve(u, "assemble_multi");
        if (u.grid_size != us[0].grid_size)
            throw config_error("assemble_multi: all curves must share one grid size");
    }
    if (p.eps == 0.0) return multi_disk_limit(p, us);

    const int m = us[0].grid_size;
    const double eps = p.eps;
    const TrigTable t(m);
    std::vector<detail::GridCurve> g;
    g.reserve(static_cast<std::size_t>(n_pat));
    for (const FourierCurve& u : us) g.push_back(make_grid_curve(u, eps, t, "assemble_multi"));
    const std::vector<double> w = log_kernel_weights(m, t);
    std::vector<double> half(static_cast<std::size_t>(m), 1.0);
    for (int dd = 1; dd < m; ++dd) half[dd] = std::sin(pi * dd / m);

    // fixed min-image displacement representative per ordered pair
    std::vector<Vec2> offs(static_cast<std::size_t>(n_pat) * n_pat, Vec2{0.0, 0.0});
    for (int mm = 0; mm < n_pat; ++mm)
        for (int n = 0; n < n_pat; ++n)
            if (n != mm)
                offs[static_cast<std::size_t>(mm) * n_pat + n] =
                    min_image_displacement(p.centers[mm], p.centers[n], p.geometry);

    std::vector<ContourResidual> out(static_cast<std::size_t>(n_pat));
    std::vector<double> f1(m), f2(m), f3(m), f4(m), nij(m);
    for (int mm = 0; mm < n_pat; ++mm) {
        const detail::GridCurve& gm = g[mm];
        double s0 = 0.0, s1 = 0.0, s2 = 0.0;
        for (int n = 0; n < n_pat; ++n) {
            s0 += p.circulations[n];
            if (n != mm) {
                const Vec2& wv = offs[static_cast<std::size_t>(mm) * n_pat + n];
                s1 += p.circulations[n] * wv.x;
                s2 += p.circulations[n] * wv.y;
            }
        }
        for (int i = 0; i < m; ++i) {
            // same-patch log kernel
            double acc_w = 0.0, acc_r = 0.0;
            for (int j = 0; j < m; ++j) {
                const int dd = i - j >= 0 ? i - j : i - j + m;
                const double v = (gm.r[i] * gm.r[j] + gm.rp[i] * gm.rp[j]) * t.sin_d[dd] +
                                 (gm.r[i] * gm.rp[j] - gm.rp[i] * gm.r[j]) * t.cos_d[dd];
                const double q = dd == 0 ? gm.rp[i] : (gm.r[i] - gm.r[j]) / (2.0 * half[dd]);
                acc_w += w[dd] * v;
                acc_r += -std::log(q * q + gm.r[i] * gm.r[j]) * v;
            }
            f1[i] = p.circulations[mm] * (acc_w + acc_r / m) / (two_pi * eps * gm.r[i]);

            double acc2 = 0.0, acc3 = 0.0;
            for (int n = 0; n < n_pat; ++n) {
                const detail::GridCurve& gn = g[n];
                const std::size_t pair = static_cast<std::size_t>(mm) * n_pat + n;
                const Vec2& wv = offs[pair];
                const std::size_t rowbase = (pair * m + i) * m;
                const double kap = p.circulations[n];
                for (int j = 0; j < m; ++j) {
                    if (n == mm && j == i) continue;  // N_ii = 0 on the same curve
                    const double v = (gm.r[i] * gn.r[j] + gm.rp[i] * gn.rp[j]) * t.sin_d[(i - j >= 0 ? i - j : i - j + m)] +
                                     (gm.r[i] * gn.rp[j] - gm.rp[i] * gn.r[j]) * t.cos_d[(i - j >= 0 ? i - j : i - j + m)];
                    const Vec2 dv{eps * (gm.rc[i] - gn.rc[j]), eps * (gm.rs[i] - gn.rs[j])};
                    if (n != mm) acc2 += kap * kern.log_inverse_diff(rowbase + j, wv, dv) * v;
                    acc3 += kap * kern.regular_diff(rowbase + j, wv, dv) * v;
                }
            }
            f2[i] = acc2 / (pi * m * eps * gm.r[i]);
            f3[i] = 2.0 * acc3 / (m * eps * gm.r[i]);

            f4[i] = (s0 * eps * gm.rp[i] + s1 * (gm.rp[i] * t.cos_d[i] / gm.r[i] - t.sin_d[i]) +
                     s2 * (gm.rp[i] * t.sin_d[i] / gm.r[i] + t.cos_d[i])) /
                    p.geometry.area;
        }
        ContourResidual& res = out[mm];
        res.parts[0] = analyze(f1);
        res.parts[1] = analyze(f2);
        res.parts[2] = analyze(f3);
        res.parts[3] = analyze(f4);
        res.total = zero_curve(res.parts[0].modes(), m);
        for (int q = 0; q < 4; ++q)
            for (int j = 0; j < res.total.modes(); ++j) {
                res.total.cos_coeffs[j] += res.parts[q].cos_coeffs[j];
                res.total.sin_coeffs[j] += res.parts[q].sin_coeffs[j];
            }
    }
    return out;
}

}  // namespace detail

/// Assemble the single-layer residual F(eps, gamma, R) at the collocation
/// nodes of u and return its Fourier coefficients (modes up to M/4).
inline ContourResidual assemble_single(const SingleLayerProblem& p, const FourierCurve& u) {
    return detail::assemble_single_core(p, u, detail::ExactKernels(p.geometry, nullptr));
}

/// Assemble and simultaneously record the frozen first-order kernel data at u.
inline std::pair<ContourResidual, AssemblyCache> assemble_single_cached(const SingleLayerProblem& p,
                                                                        const FourierCurve& u) {
    AssemblyCache cache;
    if (p.eps > 0.0) {
        cache.pairs = p.patches;
        cache.grid = u.grid_size;
        cache.rows.assign(detail::kernel_row_stride * static_cast<std::size_t>(p.patches) * u.grid_size *
                              u.grid_size,
                          0.0);
    }
    ContourResidual res = detail::assemble_single_core(p, u, detail::ExactKernels(p.geometry, p.eps > 0.0 ? &cache : nullptr));
    return {std::move(res), std::move(cache)};
}

/// Re-assemble against a recorded cache (kernels replayed to first order in
/// the boundary motion). Exact at the recording curve; first-order accurate
/// nearby. The eps = 0 branch ignores the cache (it is already closed-form).
inline ContourResidual assemble_single_frozen(const SingleLayerProblem& p, const FourierCurve& u,
                                              const AssemblyCache& cache) {
    if (p.eps == 0.0) return detail::assemble_single_core(p, u, detail::ExactKernels(p.geometry, nullptr));
    if (cache.grid != u.grid_size || cache.pairs != p.patches)
        throw config_error("assemble_single_frozen: cache does not match the problem discretization");
    return detail::assemble_single_core(p, u, detail::FrozenKernels(cache));
}

/// Assemble the residual of every patch of a multi-patch configuration.
inline std::vector<ContourResidual> assemble_multi(const MultiPatchProblem& p,
                                                   const std::vector<FourierCurve>& us) {
    return detail::assemble_multi_core(p, us, detail::ExactKernels(p.geometry, nullptr));
}

inline std::pair<std::vector<ContourResidual>, AssemblyCache> assemble_multi_cached(
    const MultiPatchProblem& p, const std::vector<FourierCurve>& us) {
    AssemblyCache cache;
    const int n_pat = static_cast<int>(p.centers.size());
    if (p.eps > 0.0 && n_pat > 0 && !us.empty()) {
        cache.pairs = n_pat * n_pat;
        cache.grid = us[0].grid_size;
        cache.rows.assign(detail::kernel_row_stride * static_cast<std::size_t>(cache.pairs) * cache.grid *
                              cache.grid,
                          0.0);
    }
    std::vector<ContourResidual> res = detail::assemble_multi_core(
        p, us, detail::ExactKernels(p.geometry, p.eps > 0.0 ? &cache : nullptr));
    return {std::move(res), std::move(cache)};
}

inline std::vector<ContourResidual> assemble_multi_frozen(const MultiPatchProblem& p,
                                                          const std::vector<FourierCurve>& us,
                                                          const AssemblyCache& cache) {
    if (p.eps == 0.0) return detail::assemble_multi_core(p, us, detail::ExactKernels(p.geometry, nullptr));
    const int n_pat = static_cast<int>(p.centers.size());
    if (us.empty() || cache.grid != us[0].grid_size || cache.pairs != n_pat * n_pat)
        throw config_error("assemble_multi_frozen: cache does not match the problem discretization");
    return detail::assemble_multi_core(p, us, detail::FrozenKernels(cache));
}

/// Directional derivative of the single-layer residual at u in direction v.
/// eps_fd > 0 selects centered differences of full assemblies; eps_fd = 0 the
/// analytic path: exact at eps = 0 (the branch is affine), otherwise centered
/// differences over the frozen-kernel replay, which carries the exact
/// first-order kernel motion.
inline FourierCurve gateaux(const SingleLayerProblem& p, const FourierCurve& u, const FourierCurve& v,
                            double eps_fd) {
    if (eps_fd < 0.0) throw config_error("gateaux: eps_fd must be >= 0");
    if (eps_fd > 0.0) {
        const ContourResidual plus = assemble_single(p, add_scaled(u, eps_fd, v));
        const ContourResidual minus = assemble_single(p, add_scaled(u, -eps_fd, v));
        return scaled(add_scaled(plus.total, -1.0, minus.total), 0.5 / eps_fd);
    }
    if (p.eps == 0.0) return linearized_at_disk(v);
    const auto [base, cache] = assemble_single_cached(p, u);
    (void)base;
    const double step = 1e-6;
    const ContourResidual plus = assemble_single_frozen(p, add_scaled(u, step, v), cache);
    const ContourResidual minus = assemble_single_frozen(p, add_scaled(u, -step, v), cache);
    return scaled(add_scaled(plus.total, -1.0, minus.total), 0.5 / step);
}

/// Multi-patch directional derivative; vs gives one direction per patch.
inline std::vector<FourierCurve> gateaux(const MultiPatchProblem& p, const std::vector<FourierCurve>& us,
                                         const std::vector<FourierCurve>& vs, double eps_fd) {
    if (eps_fd < 0.0) throw config_error("gateaux: eps_fd must be >= 0");
    if (us.size() != vs.size()) throw config_error("gateaux: one direction per curve required");
    auto combine = [&](const std::vector<FourierCurve>& a, double tt) {
        std::vector<FourierCurve> out;
        out.reserve(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) out.push_back(add_scaled(a[i], tt, vs[i]));
        return out;
    };
    std::vector<FourierCurve> result;
    if (eps_fd > 0.0) {
        const auto plus = assemble_multi(p, combine(us, eps_fd));
        const auto minus = assemble_multi(p, combine(us, -eps_fd));
        result.reserve(us.size());
        for (std::size_t i = 0; i < us.size(); ++i)
            result.push_back(scaled(add_scaled(plus[i].total, -1.0, minus[i].total), 0.5 / eps_fd));
        return result;
    }
    if (p.eps == 0.0) {
        result.reserve(us.size());
        for (std::size_t i = 0; i < us.size(); ++i)
            result.push_back(scaled(linearized_at_disk(vs[i]), p.circulations[i] / pi));
        return result;
    }
    const auto [base, cache] = assemble_multi_cached(p, us);
    (void)base;
    const double step = 1e-6;
    const auto plus = assemble_multi_frozen(p, combine(us, step), cache);
    const auto minus = assemble_multi_frozen(p, combine(us, -step), cache);
    result.reserve(us.size());
    for (std::size_t i = 0; i < us.size(); ++i)
        result.push_back(scaled(add_scaled(plus[i].total, -1.0, minus[i].total), 0.5 / step));
    return result;
}

}  // namespace vortex
