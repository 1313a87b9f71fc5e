#pragma once

#include <map>
#include <string>
#include <vector>

#include "av2/family.hpp"

namespace av2 {

/// Combinatorial input data: a labeled post-singular orbit graph with
/// inverse-branch indices. `successor` is the forward dynamics on the
/// marked set; it is defined for every label except `inf`. `branch_index`
/// is defined for every label except `zero` and `inf` and refers to the
/// library's principal-log branch labeling. `preperiod`/`period` describe
/// the 0-orbit: c_0 = zero, c_1 = one, and {c_{k1+1}, ..., c_{k1+l}} is a
/// cycle. The second asymptotic value is at infinity exactly when
/// `lambda == inf`.
struct OrbitPortrait {
    std::vector<std::string> labels;
    std::map<std::string, std::string> successor;
    std::map<std::string, int> branch_index;
    std::string zero, one, inf, lambda;
    int preperiod = 0;  // k1
    int period = 1;     // l

    bool lambda_at_infinity() const { return lambda == inf; }

    /// 0 for the zero label, the declared index otherwise.
    int effective_branch_index(const std::string& label) const;

    /// Labels c_0 .. c_{k1+l} of the 0-orbit (walks `successor`; assumes a
    /// valid portrait).
    std::vector<std::string> zero_orbit_labels() const;

    /// Labels of the lambda orbit starting at `lambda`, walked until the
    /// first revisit of any earlier label (own or 0-orbit) or until `inf`.
    /// Empty when lambda == inf.
    std::vector<std::string> lambda_orbit_labels() const;

    /// Winding number derived from branch data:
    /// eta = ebi(c_{k1+l}) - ebi(c_{k1}).
    int eta() const;
};

struct PortraitViolation {
    std::string label;  // offending label, may be empty for global rules
    std::string rule;
};

/// Empty list iff the portrait satisfies every structural invariant.
std::vector<PortraitViolation> validate(const OrbitPortrait& portrait);

enum class OrbitStatus { preperiodic, terminated_at_infinity, escaped, undecided };

struct OrbitResult {
    std::vector<SpherePoint> points;
    OrbitStatus status = OrbitStatus::undecided;
    int preperiod = 0;  // cycle start index (0-based into points)
    int period = 0;
    double residual = 0.0;
};

struct OrbitOptions {
    int n_max = 256;
    double tol = 1e-9;           // spherical recurrence tolerance
    double escape_radius = 1e10;
    int max_period = 0;          // 0 = unlimited
};

/// Iterates eval() from `start`. Declares preperiodic(k, l) at the first
/// recurrence confirmed over one full extra cycle; terminated_at_infinity
/// on a pole hit; escaped past the escape radius (a huge iterate of a
/// meromorphic member is a pole hit, only the exponential sub-case truly
/// escapes).
OrbitResult forward_orbit(const Av2Params& p, const SpherePoint& start, const OrbitOptions& opts = {});

struct WindingNumber {
    int eta = 0;
    double residual = 0.0;
};

/// eta = Re(beta (z_k2 - z_k1) / (2 pi i)) rounded; the residual must
/// vanish at any consistent configuration. Residuals >= 1e-6 throw.
WindingNumber winding_number(cx beta, cx z_k1, cx z_k2);

}  // namespace av2
