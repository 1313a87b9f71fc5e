#pragma once

#include <complex>

#include "av2/errors.hpp"

namespace av2 {

using cx = std::complex<double>;

/// A point of the Riemann sphere: a finite complex number or the single
/// canonical point at infinity. Non-finite doubles collapse to infinity so
/// every arithmetic path stays total.
class SpherePoint {
public:
    SpherePoint() : v_(0.0, 0.0), inf_(false) {}
    SpherePoint(cx v);  // NOLINT: implicit by design
    SpherePoint(double re, double im) : SpherePoint(cx(re, im)) {}

    static SpherePoint infinity();

    bool is_inf() const { return inf_; }
    bool is_finite() const { return !inf_; }

    // Finite value; throws if the point is infinity.
    cx value() const;

    bool operator==(const SpherePoint& o) const;
    bool operator!=(const SpherePoint& o) const { return !(*this == o); }

private:
    cx v_;
    bool inf_;
};

/// Spherical distance d(z,z') = |z-z'| / (sqrt(1+|z|^2) sqrt(1+|z'|^2)),
/// extended to infinity by its limit 1/sqrt(1+|z|^2). Ranges over [0,1].
double sph_dist(const SpherePoint& a, const SpherePoint& b);

/// Moebius transformation z -> (az+b)/(cz+d), kept determinant-normalized
/// (ad - bc = 1, sign fixed so sqrt(det) has nonnegative real part, ties
/// broken toward nonnegative imaginary part).
struct MobiusMap {
    cx a{1.0}, b{0.0}, c{0.0}, d{1.0};

    MobiusMap() = default;
    MobiusMap(cx a_, cx b_, cx c_, cx d_);

    static MobiusMap identity() { return MobiusMap(); }

    cx det() const { return a * d - b * c; }
    void normalize();

    MobiusMap inverse() const;
};

/// Total on the sphere: poles map to infinity, infinity maps to a/c.
SpherePoint mobius_apply(const MobiusMap& m, const SpherePoint& z);

MobiusMap compose(const MobiusMap& m1, const MobiusMap& m2);

/// M(z) = alpha z / ((alpha - 1/alpha) z + 1/alpha). Fixes 1, sends 0 to 0
/// and infinity to the second asymptotic value alpha^2/(alpha^2-1).
MobiusMap mobius_from_alpha(cx alpha);

/// Principal square root with nonnegative real part, ties broken toward
/// nonnegative imaginary part. Shared branch convention for the library.
cx principal_sqrt(cx v);

}  // namespace av2
