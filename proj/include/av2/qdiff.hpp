#pragma once

#include <functional>

#include "av2/family.hpp"

namespace av2 {

/// Integrable quadratic differential phi(z) dz^2 with
/// phi(z) = (sum_j q_j z^j) / prod_i (z - p_i), at worst simple poles at the
/// m-1 finite marked points p_i and at infinity. deg(numerator) <= m-4
/// forces phi = O(|z|^{-3}), which is exactly L^1 integrability over the
/// sphere with simple poles.
struct QuadDiff {
    std::vector<cx> poles;
    std::vector<cx> numerator;  // coefficients q_0 .. q_{m-4}

    QuadDiff(std::vector<cx> poles_, std::vector<cx> numerator_);

    int marked_count() const { return static_cast<int>(poles.size()) + 1; }  // m, with infinity
};

/// Basis element z^j over the given pole set; j in [0, m-4].
QuadDiff basis_qd(const std::vector<cx>& poles, int j);

/// Rational evaluation; probes within 1e-12 of a pole are rejected.
cx eval_qd(const QuadDiff& qd, cx z);

struct QuadOptions {
    double rel_tol = 1e-2;   // self-refinement target for the L^1 norm
    double abs_floor = 0.0;  // settle below this absolute change (noise floor)
    int max_levels = 6;
    int base_radial = 10;    // pole-patch radial resolution at level 0
    int base_angular = 24;   // pole-patch angular resolution at level 0
};

/// ||q|| = int |phi| dx dy over the sphere by two-chart quadrature: an inner
/// disk of radius twice the largest pole modulus meshed in polar cells with
/// graded refinement into each pole, and the outer chart w = 1/z whose
/// integrand |phi(1/w)|/|w|^4 has the same simple-pole grading at w = 0.
/// Cell counts double per level until the value settles to rel_tol.
double l1_norm(const QuadDiff& qd, const QuadOptions& opts = {});

/// L^1 integral of an arbitrary integrand with at worst simple poles at the
/// given centers (used for push-forward norms; l1_norm wraps this).
double integrate_sphere_l1(const std::function<cx(cx)>& f, const std::vector<cx>& centers,
                           const QuadOptions& opts = {});

/// Truncated transfer operator at z:
///   (L phi)(z) = sum_{|k| <= K} phi(w_k) / g'(w_k)^2,  g(w_k) = z.
/// Every preimage shares e^{beta w_k}, hence g'(w_k); the sum collapses to
/// g'(w_0)^{-2} sum_k phi(w_k) and the tail decays like |k|^{-3}.
cx pushforward_eval(const Av2Params& g, const QuadDiff& qd, cx z, int K);

/// A-priori bound on the dropped tail of pushforward_eval (infinite when K
/// is too small for the bound's validity region).
double pushforward_tail_bound(const Av2Params& g, const QuadDiff& qd, cx z, int K);

/// The full (untruncated) transfer sum in closed form: partial fractions of
/// phi turn sum_k 1/(w_0 + 2 pi i k/beta - p) into (beta/2) coth(beta (w_0 -
/// p)/2), so the k-sum resums exactly. Near the asymptotic values the
/// residues cancel (they sum to zero), which is what makes L phi keep simple
/// poles there; the truncated sum loses that cancellation to tail noise.
cx pushforward_exact(const Av2Params& g, const QuadDiff& qd, cx z);

/// ||L q|| / ||q|| with both norms by the same two-chart quadrature. The
/// push-forward's mesh centers are the image marked points together with
/// the asymptotic values. The integrand uses the exact resummation; the
/// truncated route with this K cross-checks it at sample points within the
/// tail bound.
double contraction_ratio(const Av2Params& g, const QuadDiff& qd, int K = 64,
                         const QuadOptions& opts = {});

}  // namespace av2
