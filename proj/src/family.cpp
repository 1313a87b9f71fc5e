#include "av2/family.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace av2 {

namespace {

constexpr double kExpFlagTol = 1e-12;
constexpr double kExpOverflow = 709.0;   // exp saturates to +inf just above
constexpr double kExpUnderflow = -745.0;

const cx kTwoPiI(0.0, 2.0 * std::numbers::pi);

// e^{beta z} as a sphere point; saturates instead of producing NaN.
SpherePoint exp_point(cx u) {
    if (!std::isfinite(u.real())) return u.real() > 0 ? SpherePoint::infinity() : SpherePoint(cx(0.0));
    if (u.real() > kExpOverflow) return SpherePoint::infinity();
    if (u.real() < kExpUnderflow) return SpherePoint(cx(0.0));
    return SpherePoint(std::exp(u));
}

}  // namespace

Av2Params::Av2Params(cx alpha_, cx beta_) : alpha(alpha_), beta(beta_) {
    if (alpha == cx(0.0)) throw DegenerateParameter("Av2Params: alpha = 0");
    if (beta == cx(0.0)) throw DegenerateParameter("Av2Params: beta = 0");
}

bool Av2Params::is_exponential() const {
    return std::abs(alpha * alpha - 1.0) < kExpFlagTol;
}

SpherePoint Av2Params::lambda() const {
    if (is_exponential()) return SpherePoint::infinity();
    const cx a2 = alpha * alpha;
    return SpherePoint(a2 / (a2 - 1.0));
}

SpherePoint eval(const Av2Params& p, const SpherePoint& z) {
    if (z.is_inf()) throw EssentialSingularity("eval at the essential singularity");
    const SpherePoint w = exp_point(p.beta * z.value());
    if (p.is_exponential()) return w;
    return mobius_apply(mobius_from_alpha(p.alpha), w);
}

cx deriv(const Av2Params& p, cx z) {
    const cx u = p.beta * z;
    if (p.is_exponential()) return p.beta * std::exp(u);
    const cx c = p.alpha - 1.0 / p.alpha;
    const cx d = 1.0 / p.alpha;
    // g' = beta w / (c w + d)^2 with w = e^u; for large |w| switch to the
    // equivalent beta e^{-u} / c^2 to dodge inf/inf.
    if (u.real() > 340.0) return p.beta * std::exp(-u) / (c * c);
    const cx w = std::exp(u);
    const cx den = c * w + d;
    return p.beta * w / (den * den);
}

std::pair<SpherePoint, SpherePoint> asymptotic_values(const Av2Params& p) {
    return {SpherePoint(cx(0.0)), p.lambda()};
}

cx alpha_from_lambda(const SpherePoint& lambda) {
    if (lambda.is_inf()) return cx(1.0);
    const cx l = lambda.value();
    if (l == cx(0.0) || l == cx(1.0))
        throw InvalidAsymptoticValue("alpha_from_lambda: lambda in {0, 1}");
    return principal_sqrt(l / (l - 1.0));
}

cx principal_log(cx u) {
    if (u.imag() == 0.0) u = cx(u.real(), +0.0);  // put the cut on Im = +pi
    return std::log(u);
}

cx inverse(const Av2Params& p, const SpherePoint& w, int k) {
    const SpherePoint lam = p.lambda();
    // reject targets inside a 1e-12 relative band around the omitted values
    if (w.is_finite() && std::abs(w.value()) < 1e-12)
        throw OmittedValue("inverse: preimage of the omitted value 0 requested");
    if (w.is_inf() && lam.is_inf())
        throw OmittedValue("inverse: preimage of the omitted value infinity requested");
    if (w.is_finite() && lam.is_finite() &&
        std::abs(w.value() - lam.value()) < 1e-12 * (1.0 + std::abs(lam.value())))
        throw OmittedValue("inverse: preimage of the omitted value lambda requested");
    SpherePoint u;
    if (p.is_exponential()) {
        u = w;  // M is the identity
    } else {
        u = mobius_apply(mobius_from_alpha(p.alpha).inverse(), w);
    }
    // u avoids 0 and infinity because w avoids {0, lambda}.
    return (principal_log(u.value()) + kTwoPiI * static_cast<double>(k)) / p.beta;
}

double pole_distance(const Av2Params& p, cx z) {
    if (p.is_exponential()) return std::numeric_limits<double>::infinity();
    // Poles sit where e^{beta z} = -1/(alpha^2-1).
    const cx up = -1.0 / (p.alpha * p.alpha - 1.0);
    const cx l0 = principal_log(up);
    const double t = ((p.beta * z - l0) / kTwoPiI).real();
    const double k0 = std::round(t);
    double best = std::numeric_limits<double>::infinity();
    for (int dk = -2; dk <= 2; ++dk) {
        const cx zp = (l0 + kTwoPiI * (k0 + dk)) / p.beta;
        best = std::min(best, std::abs(z - zp));
    }
    return best;
}

double schwarzian_residual(const Av2Params& p, cx z) {
    const double dpole = pole_distance(p, z);
    if (dpole <= 1e-3) throw PoleProximity("schwarzian_residual: probe within 1e-3 of a pole");
    const double h = std::min(1e-3 * (1.0 + std::abs(z)), 0.003 * dpole);

    auto g = [&](cx zz) { return eval(p, SpherePoint(zz)).value(); };
    const cx gm3 = g(z - 3.0 * h), gm2 = g(z - 2.0 * h), gm1 = g(z - h);
    const cx gp1 = g(z + h), gp2 = g(z + 2.0 * h), gp3 = g(z + 3.0 * h);
    const cx g0 = g(z);

    const cx g1 = (-gp2 + 8.0 * gp1 - 8.0 * gm1 + gm2) / (12.0 * h);
    const cx g2 = (-gp2 + 16.0 * gp1 - 30.0 * g0 + 16.0 * gm1 - gm2) / (12.0 * h * h);
    const cx g3 = (gm3 - 8.0 * gm2 + 13.0 * gm1 - 13.0 * gp1 + 8.0 * gp2 - gp3) / (8.0 * h * h * h);

    const cx u = g2 / g1;
    const cx s = g3 / g1 - 1.5 * u * u;
    return std::abs(s + p.beta * p.beta / 2.0);
}

}  // namespace av2
