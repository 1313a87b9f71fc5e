#include "av2/sphere.hpp"

#include <cmath>
#include <limits>

namespace av2 {

SpherePoint::SpherePoint(cx v) : v_(v), inf_(false) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
        v_ = cx(0.0, 0.0);
        inf_ = true;
    }
}

SpherePoint SpherePoint::infinity() {
    SpherePoint p;
    p.inf_ = true;
    return p;
}

cx SpherePoint::value() const {
    if (inf_) throw Error("value() called on the point at infinity");
    return v_;
}

bool SpherePoint::operator==(const SpherePoint& o) const {
    if (inf_ || o.inf_) return inf_ == o.inf_;
    return v_ == o.v_;
}

double sph_dist(const SpherePoint& a, const SpherePoint& b) {
    if (a.is_inf() && b.is_inf()) return 0.0;
    if (a.is_inf() || b.is_inf()) {
        const cx z = a.is_inf() ? b.value() : a.value();
        return 1.0 / std::sqrt(1.0 + std::norm(z));
    }
    const cx z = a.value(), w = b.value();
    return std::abs(z - w) / (std::sqrt(1.0 + std::norm(z)) * std::sqrt(1.0 + std::norm(w)));
}

cx principal_sqrt(cx v) {
    cx s = std::sqrt(v);
    if (s.real() < 0.0 || (s.real() == 0.0 && s.imag() < 0.0)) s = -s;
    return s;
}

MobiusMap::MobiusMap(cx a_, cx b_, cx c_, cx d_) : a(a_), b(b_), c(c_), d(d_) {
    normalize();
}

void MobiusMap::normalize() {
    const cx dt = det();
    if (dt == cx(0.0)) throw DegenerateParameter("Moebius map with zero determinant");
    const cx s = principal_sqrt(dt);
    a /= s;
    b /= s;
    c /= s;
    d /= s;
}

MobiusMap MobiusMap::inverse() const {
    MobiusMap m;
    m.a = d;
    m.b = -b;
    m.c = -c;
    m.d = a;
    return m;  // det unchanged, already normalized
}

SpherePoint mobius_apply(const MobiusMap& m, const SpherePoint& z) {
    if (z.is_inf()) {
        if (m.c == cx(0.0)) return SpherePoint::infinity();
        return SpherePoint(m.a / m.c);
    }
    const cx v = z.value();
    // Large |v|: evaluate in the w = 1/v chart to avoid overflow.
    if (std::abs(v) > 1e140) {
        const cx w = 1.0 / v;
        const cx den = m.c + m.d * w;
        if (den == cx(0.0)) return SpherePoint::infinity();
        return SpherePoint((m.a + m.b * w) / den);
    }
    const cx den = m.c * v + m.d;
    if (den == cx(0.0)) return SpherePoint::infinity();
    return SpherePoint((m.a * v + m.b) / den);
}

MobiusMap compose(const MobiusMap& m1, const MobiusMap& m2) {
    MobiusMap m;
    m.a = m1.a * m2.a + m1.b * m2.c;
    m.b = m1.a * m2.b + m1.b * m2.d;
    m.c = m1.c * m2.a + m1.d * m2.c;
    m.d = m1.c * m2.b + m1.d * m2.d;
    m.normalize();
    return m;
}

MobiusMap mobius_from_alpha(cx alpha) {
    if (alpha == cx(0.0)) throw DegenerateParameter("mobius_from_alpha: alpha = 0");
    MobiusMap m;
    m.a = alpha;
    m.b = cx(0.0);
    m.c = alpha - 1.0 / alpha;
    m.d = 1.0 / alpha;
    m.normalize();  // det is 1 by construction; fixes the +-(a,b,c,d) sign
    return m;
}

}  // namespace av2
