#pragma once

// Independent numeric oracles used only by tests. Everything here avoids the
// library code path it cross-checks.

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "av2/sphere.hpp"

namespace av2::test {

// Spherical distance through the stereographic embedding: half the chordal
// distance between the images on the unit 2-sphere.
inline double chordal_half_distance(const SpherePoint& a, const SpherePoint& b) {
    auto embed = [](const SpherePoint& p) -> std::array<double, 3> {
        if (p.is_inf()) return {0.0, 0.0, 1.0};
        const double x = p.value().real(), y = p.value().imag();
        const double n = 1.0 + x * x + y * y;
        return {2.0 * x / n, 2.0 * y / n, (x * x + y * y - 1.0) / n};
    };
    const auto pa = embed(a), pb = embed(b);
    double s = 0.0;
    for (int i = 0; i < 3; ++i) s += (pa[i] - pb[i]) * (pa[i] - pb[i]);
    return 0.5 * std::sqrt(s);
}

// M_alpha(z) through the algebraically simplified closed form
// alpha^2 z / ((alpha^2 - 1) z + 1) in extended precision; bypasses the
// determinant normalization entirely.
inline cx mobius_alpha_closed_form(cx alpha, cx z) {
    using lcx = std::complex<long double>;
    const lcx a(alpha.real(), alpha.imag());
    const lcx zz(z.real(), z.imag());
    const lcx a2 = a * a;
    const lcx v = a2 * zz / ((a2 - lcx(1)) * zz + lcx(1));
    return {static_cast<double>(v.real()), static_cast<double>(v.imag())};
}

// Fourth-order central finite difference of an arbitrary map.
template <typename F>
cx fd_derivative(F&& f, cx z, double h) {
    return (-f(z + 2.0 * h) + 8.0 * f(z + h) - 8.0 * f(z - h) + f(z - 2.0 * h)) / (12.0 * h);
}

// (1/2 pi i) contour integral of f on the circle |z - c| = r (trapezoid rule;
// spectrally accurate for meromorphic integrands).
template <typename F>
cx contour_residue(F&& f, cx c, double r, int n = 512) {
    cx sum(0.0);
    for (int j = 0; j < n; ++j) {
        const double t = 2.0 * std::numbers::pi * j / n;
        const cx e = std::exp(cx(0.0, t));
        sum += f(c + r * e) * r * e;  // f(z) dz/(i dt) collected below
    }
    return sum / static_cast<double>(n);
}

// deterministic sampling helpers
inline cx random_annulus(std::mt19937_64& rng, double r0, double r1) {
    std::uniform_real_distribution<double> rad(r0, r1);
    std::uniform_real_distribution<double> ang(0.0, 2.0 * std::numbers::pi);
    return std::polar(rad(rng), ang(rng));
}

inline cx random_box(std::mt19937_64& rng, double half_w, double half_h) {
    std::uniform_real_distribution<double> xr(-half_w, half_w);
    std::uniform_real_distribution<double> yr(-half_h, half_h);
    return {xr(rng), yr(rng)};
}

}  // namespace av2::test
