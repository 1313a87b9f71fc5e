#include "av2/qdiff.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace av2 {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double pairwise_sum(const std::vector<double>& v, size_t lo, size_t hi) {
    if (hi - lo <= 8) {
        double s = 0.0;
        for (size_t i = lo; i < hi; ++i) s += v[i];
        return s;
    }
    const size_t mid = lo + (hi - lo) / 2;
    return pairwise_sum(v, lo, mid) + pairwise_sum(v, mid, hi);
}

double pairwise_sum(const std::vector<double>& v) { return pairwise_sum(v, 0, v.size()); }

// Integral of absF over the disk |z - c| <= rho via the substitution
// z = c + rho s^2 e^{i theta}: the Jacobian 2 rho^2 s^3 tames an |z-c|^{-1}
// singularity at the center exactly.
void graded_disk_cells(const std::function<double(cx)>& absF, cx c, double rho, int J, int A,
                       std::vector<double>& out) {
    const double ds = 1.0 / J;
    const double dt = kTwoPi / A;
    for (int m = 0; m < J; ++m) {
        const double s = (m + 0.5) * ds;
        for (int a = 0; a < A; ++a) {
            const double theta = (a + 0.5) * dt;
            const cx z = c + rho * s * s * std::exp(cx(0.0, theta));
            out.push_back(absF(z) * 2.0 * rho * rho * s * s * s * ds * dt);
        }
    }
}

struct Patch {
    cx center;
    double radius;
};

// Polar background cell over the annular sector [r0,r1] x [t0,t1], centered
// at the origin, with the patch disks carved out by recursive splitting.
void background_cell(const std::function<double(cx)>& absF, const std::vector<Patch>& patches,
                     double r0, double r1, double t0, double t1, int depth,
                     std::vector<double>& out) {
    const double rc = 0.5 * (r0 + r1);
    const double tc = 0.5 * (t0 + t1);
    const cx zc = rc * std::exp(cx(0.0, tc));
    double hc = 0.0;
    for (const double r : {r0, r1})
        for (const double t : {t0, tc, t1})
            hc = std::max(hc, std::abs(r * std::exp(cx(0.0, t)) - zc));

    bool needs_split = false;
    for (const Patch& p : patches) {
        const double d = std::abs(zc - p.center);
        if (d + hc < p.radius) return;                       // cell swallowed by the patch
        if (d - hc <= p.radius) { needs_split = true; break; }  // straddles the boundary
        if (d - p.radius < 4.0 * hc) { needs_split = true; break; }  // resolve 1/d growth
    }
    if (needs_split && depth > 0) {
        background_cell(absF, patches, r0, rc, t0, tc, depth - 1, out);
        background_cell(absF, patches, r0, rc, tc, t1, depth - 1, out);
        background_cell(absF, patches, rc, r1, t0, tc, depth - 1, out);
        background_cell(absF, patches, rc, r1, tc, t1, depth - 1, out);
        return;
    }
    for (const Patch& p : patches)
        if (std::abs(zc - p.center) < p.radius) return;  // depth cap: classify by midpoint
    out.push_back(absF(zc) * rc * (r1 - r0) * (t1 - t0));
}

double level_integral(const std::function<double(cx)>& absF, const std::vector<Patch>& patches,
                      double chart_radius, int level, const QuadOptions& opts) {
    std::vector<double> cells;
    const int scale = 1 << level;
    const int J = opts.base_radial * scale;
    const int A = opts.base_angular * scale;
    for (const Patch& p : patches) graded_disk_cells(absF, p.center, p.radius, J, A, cells);

    const int rings = 6 * scale;
    const int sectors = 12 * scale;
    const int depth = 5 + level;
    for (int i = 0; i < rings; ++i)
        for (int a = 0; a < sectors; ++a)
            background_cell(absF, patches, chart_radius * i / rings, chart_radius * (i + 1) / rings,
                            kTwoPi * a / sectors, kTwoPi * (a + 1) / sectors, depth, cells);

    // outer chart w = 1/z: a single graded patch around w = 0
    const auto absG = [&](cx w) { return absF(1.0 / w) / std::norm(w * w); };
    graded_disk_cells(absG, cx(0.0), 1.0 / chart_radius, J, A, cells);

    return pairwise_sum(cells);
}

}  // namespace

QuadDiff::QuadDiff(std::vector<cx> poles_, std::vector<cx> numerator_)
    : poles(std::move(poles_)), numerator(std::move(numerator_)) {
    if (poles.size() < 3) throw InvalidInput("QuadDiff: at least 3 finite poles required (m >= 4)");
    for (size_t i = 0; i < poles.size(); ++i)
        for (size_t j = i + 1; j < poles.size(); ++j)
            if (std::abs(poles[i] - poles[j]) <= 1e-12) throw InvalidInput("QuadDiff: poles collide");
    if (numerator.empty()) throw InvalidInput("QuadDiff: empty numerator");
    if (numerator.size() > poles.size() - 2)
        throw InvalidInput("QuadDiff: numerator degree too high for integrability");
}

QuadDiff basis_qd(const std::vector<cx>& poles, int j) {
    if (j < 0 || j + 3 > static_cast<int>(poles.size()))
        throw InvalidInput("basis_qd: index outside [0, m-4]");
    std::vector<cx> num(static_cast<size_t>(j) + 1, cx(0.0));
    num.back() = cx(1.0);
    return QuadDiff(poles, num);
}

cx eval_qd(const QuadDiff& qd, cx z) {
    cx den(1.0);
    for (const cx& p : qd.poles) {
        const cx d = z - p;
        if (std::abs(d) < 1e-12) throw PoleProximity("eval_qd: probe at a pole");
        den *= d;
    }
    cx num(0.0);
    for (auto it = qd.numerator.rbegin(); it != qd.numerator.rend(); ++it) num = num * z + *it;
    return num / den;
}

double integrate_sphere_l1(const std::function<cx(cx)>& f, const std::vector<cx>& centers,
                           const QuadOptions& opts) {
    double maxc = 1.0;
    for (const cx& c : centers) maxc = std::max(maxc, std::abs(c));
    const double chart_radius = 2.0 * maxc;

    std::vector<Patch> patches;
    for (const cx& c : centers) {
        double nearest = chart_radius - std::abs(c);
        for (const cx& o : centers)
            if (o != c) nearest = std::min(nearest, std::abs(o - c));
        patches.push_back({c, 0.45 * nearest});
    }

    const auto absF = [&f](cx z) { return std::abs(f(z)); };
    double prev = 0.0;
    for (int level = 0; level <= opts.max_levels; ++level) {
        const double cur = level_integral(absF, patches, chart_radius, level, opts);
        if (level > 0 && std::abs(cur - prev) <=
                             std::max(opts.rel_tol * std::abs(cur), opts.abs_floor))
            return cur;
        prev = cur;
    }
    throw QuadratureFailure("integrate_sphere_l1: no settling within the level limit");
}

double l1_norm(const QuadDiff& qd, const QuadOptions& opts) {
    return integrate_sphere_l1([&qd](cx z) { return eval_qd(qd, z); }, qd.poles, opts);
}

cx pushforward_eval(const Av2Params& g, const QuadDiff& qd, cx z, int K) {
    const cx w0 = inverse(g, SpherePoint(z), 0);  // throws on omitted values
    const cx spacing = cx(0.0, kTwoPi) / g.beta;
    cx sum(0.0);
    for (int k = -K; k <= K; ++k) sum += eval_qd(qd, w0 + spacing * static_cast<double>(k));
    const cx gp = deriv(g, w0);
    return sum / (gp * gp);
}

double pushforward_tail_bound(const Av2Params& g, const QuadDiff& qd, cx z, int K) {
    const cx w0 = inverse(g, SpherePoint(z), 0);
    const double b_sp = kTwoPi / std::abs(g.beta);
    double maxpole = 1.0;
    for (const cx& p : qd.poles) maxpole = std::max(maxpole, std::abs(p));
    const double rk = (K + 1) * b_sp - std::abs(w0);
    if (rk <= 2.0 * maxpole) return std::numeric_limits<double>::infinity();

    double cnum = 0.0;
    for (const cx& q : qd.numerator) cnum += std::abs(q);
    const double m = static_cast<double>(qd.marked_count());
    // |phi(w)| <= cnum 2^{m-1} / |w|^3 for |w| >= 2 maxpole
    const double c = cnum * std::pow(2.0, m - 1.0);
    const double tail = 2.0 * c * (1.0 / (rk * rk * rk) + 1.0 / (2.0 * b_sp * rk * rk));
    const double gp = std::abs(deriv(g, w0));
    return tail / (gp * gp);
}

namespace {

// stable coth; saturates to +-1 deep in either half plane
cx coth(cx x) {
    if (std::abs(x.real()) > 20.0) {
        const double s = x.real() > 0.0 ? 1.0 : -1.0;
        return cx(s) + 2.0 * std::exp(-2.0 * s * x);
    }
    return std::cosh(x) / std::sinh(x);
}

std::vector<cx> partial_fraction_residues(const QuadDiff& qd) {
    std::vector<cx> res;
    for (const cx& p : qd.poles) {
        cx num(0.0);
        for (auto it = qd.numerator.rbegin(); it != qd.numerator.rend(); ++it) num = num * p + *it;
        cx den(1.0);
        for (const cx& q : qd.poles)
            if (q != p) den *= p - q;
        res.push_back(num / den);
    }
    return res;
}

}  // namespace

cx pushforward_exact(const Av2Params& g, const QuadDiff& qd, cx z) {
    const cx w0 = inverse(g, SpherePoint(z), 0);
    const auto res = partial_fraction_residues(qd);
    cx sum(0.0);
    for (size_t i = 0; i < qd.poles.size(); ++i)
        sum += res[i] * coth(g.beta * (w0 - qd.poles[i]) / 2.0);
    sum *= g.beta / 2.0;
    const cx gp = deriv(g, w0);
    return sum / (gp * gp);
}

double contraction_ratio(const Av2Params& g, const QuadDiff& qd, int K, const QuadOptions& opts) {
    const double denom = l1_norm(qd, opts);
    // the transfer operator can annihilate a differential outright (aligned
    // pole lattices); changes below the noise floor of ||q|| count as settled
    QuadOptions nopts = opts;
    nopts.abs_floor = std::max(nopts.abs_floor, 1e-10 * denom);

    std::vector<cx> centers{cx(0.0)};
    const SpherePoint lam = g.lambda();
    if (lam.is_finite()) centers.push_back(lam.value());
    for (const cx& p : qd.poles) {
        const SpherePoint img = eval(g, SpherePoint(p));
        // a pole preimage maps to (numerical) infinity; the outer chart owns it
        if (img.is_finite() && std::abs(img.value()) < 1e8) centers.push_back(img.value());
    }
    std::vector<cx> dedup;
    for (const cx& c : centers) {
        bool fresh = true;
        for (const cx& d : dedup)
            if (std::abs(c - d) < 1e-9) fresh = false;
        if (fresh) dedup.push_back(c);
    }

    // the truncated route must agree with the resummation within its tail bound
    for (int i = 0; i < 5; ++i) {
        const cx z = dedup[i % dedup.size()] + std::polar(0.37 + 0.11 * i, 0.7 * i + 0.3);
        double gap;
        try {
            gap = std::abs(pushforward_eval(g, qd, z, K) - pushforward_exact(g, qd, z));
        } catch (const Error&) {
            continue;  // sample fell on an omitted value or pole; not a probe
        }
        if (gap > std::max(4.0 * pushforward_tail_bound(g, qd, z, K), 1e-9))
            throw InconsistentConfiguration("contraction_ratio: truncated and resummed transfer disagree");
    }

    const auto pushed = [&](cx z) -> cx {
        if (std::abs(z) < 1e-13) return cx(0.0);
        if (lam.is_finite() && std::abs(z - lam.value()) < 1e-13) return cx(0.0);
        return pushforward_exact(g, qd, z);
    };
    const double numer = integrate_sphere_l1(pushed, dedup, nopts);
    return numer / denom;
}

}  // namespace av2
