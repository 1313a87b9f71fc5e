#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "av2/qdiff.hpp"
#include "av2/thurston.hpp"
#include "support/catalog.hpp"
#include "support/oracles.hpp"

using namespace av2;

namespace {

const std::vector<cx> kTriple{cx(0.0), cx(1.0), cx(-1.0)};

std::vector<cx> solved_poles(const OrbitPortrait& p, SolveReport& rep) {
    rep = solve(p);
    REQUIRE(rep.outcome == SolveOutcome::converged);
    std::vector<cx> poles;
    for (const auto& [label, pos] : rep.config.positions)
        if (pos.is_finite()) poles.push_back(pos.value());
    return poles;
}

}  // namespace

TEST_CASE("eval_qd basics") {
    const QuadDiff qd(kTriple, {cx(1.0)});
    CHECK(std::abs(eval_qd(qd, cx(2.0)) - cx(1.0 / 6.0)) < 1e-15);
    CHECK_THROWS_AS(eval_qd(qd, cx(1.0)), PoleProximity);

    // z^3 phi(z) approaches the top coefficient
    const QuadDiff qd2(kTriple, {cx(0.3, -0.4)});
    const cx far(3e5, 2e5);
    CHECK(std::abs(eval_qd(qd2, far) * far * far * far - cx(0.3, -0.4)) < 1e-5);
}

TEST_CASE("eval_qd residues match a contour oracle") {
    const QuadDiff qd(kTriple, {cx(0.7, 0.2)});
    for (const cx& p : kTriple) {
        cx denom(1.0);
        for (const cx& q : kTriple)
            if (q != p) denom *= p - q;
        const cx algebraic = cx(0.7, 0.2) / denom;
        const cx contour = test::contour_residue([&qd](cx z) { return eval_qd(qd, z); }, p, 0.3);
        CHECK(std::abs(algebraic - contour) < 1e-12);
    }
}

TEST_CASE("QuadDiff validation") {
    CHECK_THROWS_AS(QuadDiff({cx(0.0), cx(1.0)}, {cx(1.0)}), InvalidInput);
    CHECK_THROWS_AS(QuadDiff({cx(0.0), cx(1.0), cx(1.0 + 1e-14)}, {cx(1.0)}), InvalidInput);
    CHECK_THROWS_AS(QuadDiff(kTriple, {}), InvalidInput);
    CHECK_THROWS_AS(QuadDiff(kTriple, {cx(1.0), cx(1.0)}), InvalidInput);  // degree too high

    // the space over m marked points has m-3 basis elements
    CHECK_THROWS_AS(basis_qd(kTriple, 1), InvalidInput);
    CHECK(basis_qd(kTriple, 0).numerator.size() == 1);
    const std::vector<cx> five{cx(0.0), cx(1.0), cx(-1.0), cx(0.0, 2.0)};
    CHECK(basis_qd(five, 1).numerator.size() == 2);
    CHECK_THROWS_AS(basis_qd(five, 2), InvalidInput);
}

TEST_CASE("l1_norm converges under refinement and scales linearly") {
    const QuadDiff qd(kTriple, {cx(1.0)});
    QuadOptions opts;
    const double base = l1_norm(qd, opts);
    CHECK(base > 0.0);
    CHECK(std::isfinite(base));

    QuadOptions fine = opts;
    fine.rel_tol = opts.rel_tol / 2.0;
    const double finer = l1_norm(qd, fine);
    CHECK(std::abs(finer - base) <= 1e-2 * finer);

    const cx scale(3.0, -4.0);
    const QuadDiff scaled(kTriple, {scale});
    CHECK(std::abs(l1_norm(scaled, opts) - 5.0 * base) <= 1e-10 * 5.0 * base);
}

TEST_CASE("l1_norm grows but stays finite as poles approach") {
    double prev = 0.0;
    for (double sep : {1e-1, 1e-2, 1e-3}) {
        const QuadDiff qd({cx(0.0), cx(sep), cx(1.0)}, {cx(1.0)});
        const double n = l1_norm(qd);
        CHECK(std::isfinite(n));
        CHECK(n > prev);
        prev = n;
    }
}

TEST_CASE("pushforward truncation obeys the tail bound") {
    SolveReport rep;
    const auto poles = solved_poles(test::four_point_fixed(), rep);
    const QuadDiff qd = basis_qd(poles, 0);
    const Av2Params g = *rep.params;
    std::mt19937_64 rng(501);
    for (int i = 0; i < 25; ++i) {
        const cx z = test::random_annulus(rng, 0.3, 2.5);
        if (std::abs(z) < 0.05) continue;
        const cx v32 = pushforward_eval(g, qd, z, 32);
        const cx v64 = pushforward_eval(g, qd, z, 64);
        const double bound = pushforward_tail_bound(g, qd, z, 32);
        REQUIRE(std::isfinite(bound));
        CHECK(std::abs(v64 - v32) < 4.0 * bound);
    }
}

TEST_CASE("pushforward collapses to the uniform-derivative form when entire") {
    const Av2Params g(cx(1.0), cx(0.4, 6.1));
    const QuadDiff qd(kTriple, {cx(0.8, 0.1)});
    std::mt19937_64 rng(502);
    const cx two_pi_i(0.0, 2.0 * std::numbers::pi);
    for (int i = 0; i < 20; ++i) {
        const cx z = test::random_annulus(rng, 0.2, 3.0);
        const int K = 48;
        const cx lhs = pushforward_eval(g, qd, z, K);
        // independent route: g'(w_k) = beta z for every preimage of z
        cx sum(0.0);
        const cx w0 = inverse(g, SpherePoint(z), 0);
        for (int k = -K; k <= K; ++k)
            sum += eval_qd(qd, w0 + two_pi_i / g.beta * static_cast<double>(k));
        const cx rhs = sum / (g.beta * z * g.beta * z);
        CHECK(std::abs(lhs - rhs) <= 1e-12 * (1.0 + std::abs(lhs)));
    }
}

TEST_CASE("pushforward is linear") {
    const Av2Params g(cx(1.0), cx(0.4, 6.1));
    const QuadDiff qa(kTriple, {cx(1.0)});
    const QuadDiff qsum(kTriple, {cx(1.0, 2.0)});
    const QuadDiff qpart(kTriple, {cx(0.0, 2.0)});
    std::mt19937_64 rng(503);
    for (int i = 0; i < 20; ++i) {
        const cx z = test::random_annulus(rng, 0.2, 3.0);
        const cx a = pushforward_eval(g, qa, z, 48);
        const cx b = pushforward_eval(g, qpart, z, 48);
        const cx s = pushforward_eval(g, qsum, z, 48);
        CHECK(std::abs(a + b - s) <= 1e-10 * (1.0 + std::abs(s)));
    }
}

TEST_CASE("truncated transfer sums converge to the exact resummation") {
    const Av2Params g(std::sqrt(2.0), cx(0.0, 2.0 * std::numbers::pi));
    const QuadDiff qd({cx(0.0), cx(1.0), cx(2.0)}, {cx(1.0)});
    std::mt19937_64 rng(504);
    for (int i = 0; i < 15; ++i) {
        const cx z = test::random_annulus(rng, 0.3, 3.0);
        if (std::abs(z) < 0.05 || std::abs(z - 2.0) < 0.05) continue;
        const cx exact = pushforward_exact(g, qd, z);
        const double e32 = std::abs(pushforward_eval(g, qd, z, 32) - exact);
        const double e64 = std::abs(pushforward_eval(g, qd, z, 64) - exact);
        CHECK(e32 <= pushforward_tail_bound(g, qd, z, 32));
        CHECK(e64 <= pushforward_tail_bound(g, qd, z, 64));
        if (e64 > 1e-14) CHECK(e64 < e32);
    }
}

TEST_CASE("contraction ratio is below one on solved configurations") {
    SolveReport rep;
    const auto poles = solved_poles(test::four_point_fixed(), rep);
    const QuadDiff qd = basis_qd(poles, 0);
    const double ratio = contraction_ratio(*rep.params, qd, 64);
    CHECK(ratio > 0.0);
    CHECK(ratio < 1.0);
    CHECK(ratio <= 1.0 + 2.0 * 1e-2);

    // stability under K doubling and mesh refinement together
    QuadOptions fine;
    fine.rel_tol = 5e-3;
    const double again = contraction_ratio(*rep.params, qd, 128, fine);
    CHECK(std::abs(again - ratio) <= 1e-2 * std::max(1.0, ratio));
}
