#include "av2/portrait.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

namespace av2 {

namespace {
const cx kTwoPiI(0.0, 2.0 * std::numbers::pi);
}

int OrbitPortrait::effective_branch_index(const std::string& label) const {
    if (label == zero) return 0;
    return branch_index.at(label);
}

std::vector<std::string> OrbitPortrait::zero_orbit_labels() const {
    std::vector<std::string> orbit{zero};
    const int k2 = preperiod + period;
    for (int i = 0; i < k2; ++i) orbit.push_back(successor.at(orbit.back()));
    return orbit;
}

std::vector<std::string> OrbitPortrait::lambda_orbit_labels() const {
    std::vector<std::string> orbit;
    if (lambda_at_infinity()) return orbit;
    std::set<std::string> seen;
    const auto zo = zero_orbit_labels();
    seen.insert(zo.begin(), zo.end());
    std::string cur = lambda;
    while (!seen.count(cur) && cur != inf) {
        orbit.push_back(cur);
        seen.insert(cur);
        auto it = successor.find(cur);
        if (it == successor.end()) break;
        cur = it->second;
    }
    return orbit;
}

int OrbitPortrait::eta() const {
    const auto zo = zero_orbit_labels();
    return effective_branch_index(zo[preperiod + period]) - effective_branch_index(zo[preperiod]);
}

std::vector<PortraitViolation> validate(const OrbitPortrait& p) {
    std::vector<PortraitViolation> out;
    auto bad = [&out](const std::string& label, const std::string& rule) {
        out.push_back({label, rule});
    };

    if (p.preperiod < 0) bad("", "preperiod must be >= 0");
    if (p.period < 1) bad("", "period must be >= 1");

    std::set<std::string> labels(p.labels.begin(), p.labels.end());
    if (labels.size() != p.labels.size()) bad("", "duplicate labels");
    if (labels.size() < 3) bad("", "at least 3 labels required");
    for (const auto& l : {p.zero, p.one, p.inf, p.lambda})
        if (!labels.count(l)) bad(l, "distinguished label missing from label list");
    if (p.zero == p.one || p.zero == p.inf || p.one == p.inf)
        bad("", "zero, one, inf must be distinct");
    if (p.lambda == p.zero || p.lambda == p.one)
        bad(p.lambda, "lambda cannot coincide with zero or one");
    if (!out.empty()) return out;

    // successor domain: every label except inf, nothing else
    for (const auto& l : p.labels) {
        const bool has = p.successor.count(l) > 0;
        if (l == p.inf && has) bad(l, "inf has no forward orbit");
        if (l != p.inf && !has)
            bad(l, l == p.lambda ? "lambda orbit unspecified" : "successor missing");
    }
    for (const auto& [l, s] : p.successor) {
        if (!labels.count(l)) bad(l, "successor key is not a label");
        if (!labels.count(s)) bad(l, "successor value is not a label");
    }
    if (!out.empty()) return out;

    if (p.successor.at(p.zero) != p.one) bad(p.zero, "successor of zero must be one");

    // omitted values have no preimage in the marked set
    for (const auto& [l, s] : p.successor) {
        if (s == p.zero || s == p.lambda)
            bad(l, "asymptotic value in the image of the marked set");
        if (p.lambda_at_infinity() && s == p.inf)
            bad(l, "asymptotic value in the image of the marked set");
    }

    // branch indices: every label except zero and inf, nothing else
    for (const auto& l : p.labels) {
        const bool has = p.branch_index.count(l) > 0;
        if ((l == p.zero || l == p.inf) && has) bad(l, "branch index not allowed here");
        if (l != p.zero && l != p.inf && !has) bad(l, "branch index missing");
    }
    if (!out.empty()) return out;

    // 0-orbit walk consistent with the declared (k1, l)
    const int k2 = p.preperiod + p.period;
    std::vector<std::string> zo{p.zero};
    for (int i = 0; i < k2; ++i) {
        const auto& cur = zo.back();
        if (cur == p.inf) {
            bad(cur, "zero orbit hits infinity");
            return out;
        }
        zo.push_back(p.successor.at(cur));
    }
    for (int i = 0; i <= k2; ++i)
        for (int j = i + 1; j <= k2; ++j)
            if (zo[i] == zo[j])
                bad(zo[i], (zo[i] == p.zero || zo[i] == p.lambda || zo[i] == p.inf)
                               ? "asymptotic value periodic"
                               : "preperiod/period do not match the orbit graph");
    if (zo.back() == p.inf) {
        bad(zo.back(), "zero orbit hits infinity");
        return out;
    }
    if (out.empty() && p.successor.at(zo[k2]) != zo[p.preperiod + 1])
        bad(zo[k2], "cycle does not close at the declared preperiod/period");
    for (int i = p.preperiod + 1; i <= k2; ++i)
        if (zo[i] == p.zero || zo[i] == p.lambda || zo[i] == p.inf)
            bad(zo[i], "asymptotic value periodic");

    // lambda orbit reaches earlier labels or infinity
    std::set<std::string> reached(zo.begin(), zo.end());
    reached.insert(p.inf);
    if (!p.lambda_at_infinity()) {
        std::string cur = p.lambda;
        std::set<std::string> own;
        while (true) {
            if (reached.count(cur) || (own.count(cur) > 0)) break;
            own.insert(cur);
            auto it = p.successor.find(cur);
            if (it == p.successor.end()) {
                bad(cur, "lambda orbit unspecified");
                break;
            }
            cur = it->second;
        }
        reached.insert(own.begin(), own.end());
    }

    for (const auto& l : p.labels)
        if (!reached.count(l)) bad(l, "label unreachable from the singular orbits");

    return out;
}

OrbitResult forward_orbit(const Av2Params& p, const SpherePoint& start, const OrbitOptions& opts) {
    if (start.is_inf()) throw EssentialSingularity("forward_orbit from the essential singularity");
    OrbitResult r;
    r.points.push_back(start);
    const bool entire = p.is_exponential();
    for (int j = 1; j <= opts.n_max; ++j) {
        const SpherePoint z = eval(p, r.points.back());
        r.points.push_back(z);
        if (z.is_inf()) {
            r.status = entire ? OrbitStatus::escaped : OrbitStatus::terminated_at_infinity;
            return r;
        }
        if (std::abs(z.value()) > opts.escape_radius) {
            // only the entire sub-case escapes dynamically; a huge iterate of
            // a meromorphic member means a pole was hit to working precision
            r.status = entire ? OrbitStatus::escaped : OrbitStatus::terminated_at_infinity;
            return r;
        }
        // recurrence confirmed over one extra full cycle: points k..k+2l
        const int lmax = opts.max_period > 0 ? std::min(opts.max_period, j / 2) : j / 2;
        for (int l = 1; l <= lmax; ++l) {
            const int k = j - 2 * l;
            if (sph_dist(r.points[k], r.points[k + l]) >= opts.tol) continue;
            double dev = 0.0;
            bool ok = true;
            for (int i = 0; i <= l && ok; ++i) {
                const double d = sph_dist(r.points[k + i], r.points[k + l + i]);
                dev = std::max(dev, d);
                ok = d < opts.tol;
            }
            if (ok) {
                r.status = OrbitStatus::preperiodic;
                r.preperiod = k;
                r.period = l;
                r.residual = dev;
                return r;
            }
        }
    }
    r.status = OrbitStatus::undecided;
    return r;
}

WindingNumber winding_number(cx beta, cx z_k1, cx z_k2) {
    const cx t = beta * (z_k2 - z_k1) / kTwoPiI;
    const double n = std::round(t.real());
    const double res = std::abs(t - n);
    if (res >= 1e-6)
        throw InconsistentConfiguration("winding_number: marked points do not close the curve");
    return {static_cast<int>(n), res};
}

}  // namespace av2
