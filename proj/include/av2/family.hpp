#pragma once

#include <utility>

#include "av2/sphere.hpp"

namespace av2 {

/// Parameters (alpha, beta) of the map g(z) = M(e^{beta z}) with
/// M = mobius_from_alpha(alpha). Asymptotic values are 0 and
/// lambda = alpha^2/(alpha^2-1); g(0) = 1. The sub-case alpha^2 = 1
/// (lambda = infinity) is the plain exponential e^{beta z}.
struct Av2Params {
    cx alpha{1.0};
    cx beta{0.0, 6.283185307179586476925286766559};

    Av2Params() = default;
    Av2Params(cx alpha_, cx beta_);

    bool is_exponential() const;  // |alpha^2 - 1| < 1e-12
    SpherePoint lambda() const;
};

SpherePoint eval(const Av2Params& p, const SpherePoint& z);

/// dg/dz at finite z; nonzero everywhere (the family has no critical points).
cx deriv(const Av2Params& p, cx z);

/// (0, lambda); lambda is infinity exactly when alpha^2 = 1.
std::pair<SpherePoint, SpherePoint> asymptotic_values(const Av2Params& p);

/// alpha = sqrt(lambda/(lambda-1)) with the library's square-root branch;
/// lambda = infinity gives alpha = 1. Rejects lambda in {0, 1}.
cx alpha_from_lambda(const SpherePoint& lambda);

/// Principal log with Im in (-pi, pi]; the branch every inverse-branch
/// index in the library refers to.
cx principal_log(cx u);

/// Branch-k preimage of w: z_k = (Log(M^{-1}(w)) + 2 pi i k) / beta.
/// w must avoid the omitted values {0, lambda}; w = infinity is legal
/// exactly when lambda is finite (pole preimages).
cx inverse(const Av2Params& p, const SpherePoint& w, int k);

/// Euclidean distance from z to the nearest pole of g (infinite in the
/// exponential sub-case).
double pole_distance(const Av2Params& p, cx z);

/// |S_numeric(g)(z) + beta^2/2| with a finite-difference Schwarzian built
/// from eval() samples only. Fourth-order central stencils; the step is
/// 1e-3 (1+|z|), shrunk near poles to 0.003 * pole distance. Probes within
/// 1e-3 of a pole are rejected.
double schwarzian_residual(const Av2Params& p, cx z);

}  // namespace av2
