#pragma once

#include <cstdint>
#include <optional>
#include <random>

#include "av2/portrait.hpp"

namespace av2 {

/// Positions of every portrait label on the sphere. zero/one/inf are pinned
/// at 0, 1, infinity; only inf sits at infinity; positions are pairwise
/// distinct in any valid configuration.
struct MarkedConfiguration {
    std::map<std::string, SpherePoint> positions;

    const SpherePoint& at(const std::string& label) const { return positions.at(label); }
};

std::vector<PortraitViolation> validate_configuration(const MarkedConfiguration& config,
                                                      const OrbitPortrait& portrait);

/// Non-forced labels go to radius-2 roots of unity; zero/one/inf are pinned.
MarkedConfiguration auto_configuration(const OrbitPortrait& portrait);

/// Random admissible start: free labels sampled in the annulus 0.7<|z|<3
/// with pairwise spherical separation at least 0.05 (rejection sampling).
MarkedConfiguration random_configuration(const OrbitPortrait& portrait, std::mt19937_64& rng);

struct GeometryReport {
    double min_sep = 0.0;        // min pairwise spherical distance
    double systole_upper = 0.0;  // round-annulus bound pi/mod(A), +inf if vacuous
};

/// min_sep plus the best round-annulus upper bound for the length of the
/// shortest non-peripheral geodesic: annuli {r < |z-c| < R} centered at
/// marked points (and 0) separating the marked set into parts of >= 2
/// points; the bound is pi/mod(A) with mod = log(R/r)/(2 pi).
GeometryReport geometry_monitor(const MarkedConfiguration& config);

/// Spherical separation bound b = M0^{-2}, M0 = exp(2 pi^2 (m-3)/a), valid
/// when every non-peripheral geodesic has hyperbolic length >= a. For m = 3
/// there is no non-peripheral curve and the bound is the convention value 1.
double sg_bound(double a, int m);

struct BetaBound {
    double upper = 0.0;
};

/// |beta| <= 2 pi |eta| / |c_k2 - c_k1| from the winding-number identity.
BetaBound beta_bounds(int eta, double min_orbit_sep);

struct PullbackResult {
    Av2Params params;
    MarkedConfiguration next;
};

/// One marked-point pullback step: fit (alpha_n, beta_n) from the current
/// lambda position and the image of 1, then move every label to the
/// branch-indexed preimage of its successor's position.
PullbackResult pullback_step(const MarkedConfiguration& config, const OrbitPortrait& portrait);

struct IterationDiagnostics {
    int eta = 0;
    double eta_residual = 0.0;
    double min_sep = 0.0;
    double max_disp = 0.0;
    double beta_abs = 0.0;
    double systole_upper = 0.0;
};

struct IterationState {
    int n = 0;
    MarkedConfiguration config;
    std::optional<Av2Params> fitted;  // absent on the initial state
    IterationDiagnostics diag;
};

enum class SolveOutcome { converged, degenerate, max_iterations };

struct SolveReport {
    SolveOutcome outcome = SolveOutcome::max_iterations;
    std::string reason;  // set for degenerate outcomes
    std::optional<Av2Params> params;
    MarkedConfiguration config;
    int n_steps = 0;
    std::vector<IterationState> trace;
};

struct SolveOptions {
    double tol = 1e-11;           // max spherical displacement at convergence
    int max_iter = 200;
    double eps_degenerate = 1e-6; // separation collapse threshold
    int collapse_steps = 3;       // consecutive steps under the threshold
    double beta_blowup_factor = 1e3;
};

/// Thurston iteration on marked configurations. Throws InvalidInput on an
/// invalid portrait; every numerical degeneration is reported in the
/// outcome, never thrown.
SolveReport solve(const OrbitPortrait& portrait, const MarkedConfiguration& init,
                  const SolveOptions& opts = {});
SolveReport solve(const OrbitPortrait& portrait, const SolveOptions& opts = {});

struct RealizationCheck {
    bool ok = false;
    double max_residual = 0.0;   // spherical closure residuals
    double min_sep = 0.0;        // pairwise separation of realized positions
    bool branches_match = false; // implied branch indices equal the portrait's
};

/// Realizes the portrait's orbits by forward iteration of g_{alpha,beta}
/// and checks closure, pairwise distinctness and the implied inverse-branch
/// indices against the portrait.
RealizationCheck check_realization(const OrbitPortrait& portrait, const Av2Params& params,
                                   double tol = 1e-9, double sep_tol = 1e-5);

struct NewtonOptions {
    int max_iter = 120;
    double tol = 1e-12;
};

/// Independent verification oracle: damped Newton (finite-difference
/// Jacobian) on the branch-pinned landing equations of the portrait's
/// singular orbits, unknowns (alpha, beta) (beta alone when lambda is at
/// infinity). Returns the parameters only if the solved map fully realizes
/// the portrait; nullopt means no convergence from this guess.
std::optional<Av2Params> newton_oracle(const OrbitPortrait& portrait, const Av2Params& guess,
                                       const NewtonOptions& opts = {});

}  // namespace av2
