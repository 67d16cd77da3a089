#pragma once

#include <cmath>
#include <numbers>

#include "vortex/errors.hpp"

namespace vortex {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Controls truncation of the infinite products/series: the chosen term count
/// n satisfies rho^n/(1-rho) < tol; exceeding max_terms is an error.
struct TruncationPolicy {
    double tol = 1e-14;
    int max_terms = 10000;
};

/// The flat torus (0,2pi) x (0,-log rho) with area |D| = -2pi log rho.
/// Immutable after construction.
struct TorusGeometry {
    double rho;
    double height;  ///< -log rho
    double area;    ///< 2pi * height
    TruncationPolicy policy;

    static constexpr double width = two_pi;

    explicit TorusGeometry(double rho_, TruncationPolicy policy_ = {})
        : rho(rho_), height(-std::log(rho_)), area(-two_pi * std::log(rho_)), policy(policy_) {
        if (!(rho > 0.0) || !(rho < 1.0))
            throw config_error("TorusGeometry: rho must lie in (0,1), got " + std::to_string(rho_));
        if (!(policy.tol > 0.0))
            throw config_error("TorusGeometry: truncation tolerance must be positive");
    }
};

/// A point on the torus. The stored representative is whatever the caller
/// supplied; operations that need the fundamental-cell representative
/// canonicalize explicitly. (Boundary representatives such as x2 = -log rho
/// are meaningful to to_annulus and must not be folded eagerly.)
struct TorusPoint {
    double x1 = 0.0;
    double x2 = 0.0;
};

/// Minimal 2-vector used for displacements and gradients.
struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double a) const { return {a * x, a * y}; }
    Vec2 operator-() const { return {-x, -y}; }
    double dot(Vec2 o) const { return x * o.x + y * o.y; }
    double norm2() const { return x * x + y * y; }
    double norm() const { return std::hypot(x, y); }
};

inline Vec2 operator*(double a, Vec2 v) { return {a * v.x, a * v.y}; }

/// Fold a coordinate into [0, period).
inline double fold_coordinate(double v, double period) {
    double r = v - period * std::floor(v / period);
    if (r >= period) r -= period;  // guards the floor rounding edge
    return r;
}

/// Representative of p in the fundamental cell [0,2pi) x [0,-log rho).
inline TorusPoint canonical(TorusPoint p, const TorusGeometry& geom) {
    return {fold_coordinate(p.x1, two_pi), fold_coordinate(p.x2, geom.height)};
}

/// Representative of the displacement w in the centered cell
/// [-pi,pi) x [-h/2,h/2).
inline Vec2 min_image(Vec2 w, const TorusGeometry& geom) {
    double h = geom.height;
    double w1 = w.x - two_pi * std::floor((w.x + pi) / two_pi);
    double w2 = w.y - h * std::floor((w.y + 0.5 * h) / h);
    if (w1 >= pi) w1 -= two_pi;
    if (w2 >= 0.5 * h) w2 -= h;
    return {w1, w2};
}

/// Displacement x - y reduced to the centered cell.
inline Vec2 min_image_displacement(TorusPoint x, TorusPoint y, const TorusGeometry& geom) {
    return min_image({x.x1 - y.x1, x.x2 - y.x2}, geom);
}

}  // namespace vortex
