#include "av2/thurston.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>

namespace av2 {

namespace {

const cx kTwoPiI(0.0, 2.0 * std::numbers::pi);
constexpr double kInf = std::numeric_limits<double>::infinity();

std::string join_violations(const std::vector<PortraitViolation>& vs) {
    std::ostringstream os;
    for (size_t i = 0; i < vs.size(); ++i) {
        if (i) os << "; ";
        if (!vs[i].label.empty()) os << vs[i].label << ": ";
        os << vs[i].rule;
    }
    return os.str();
}

// Log(M_alpha^{-1}(w)) with the omitted-value guards of inverse().
cx log_preimage_base(cx alpha, const SpherePoint& w) {
    const bool exponential = std::abs(alpha * alpha - 1.0) < 1e-12;
    if (w.is_finite() && std::abs(w.value()) < 1e-12)
        throw OmittedValue("preimage of the omitted value 0");
    SpherePoint u;
    if (exponential) {
        if (w.is_inf()) throw OmittedValue("preimage of the omitted value infinity");
        u = w;
    } else {
        const cx a2 = alpha * alpha;
        const cx lam = a2 / (a2 - 1.0);
        if (w.is_finite() && std::abs(w.value() - lam) < 1e-12 * (1.0 + std::abs(lam)))
            throw OmittedValue("preimage of the omitted value lambda");
        u = mobius_apply(mobius_from_alpha(alpha).inverse(), w);
    }
    return principal_log(u.value());
}

}  // namespace

std::vector<PortraitViolation> validate_configuration(const MarkedConfiguration& config,
                                                      const OrbitPortrait& portrait) {
    std::vector<PortraitViolation> out;
    for (const auto& l : portrait.labels)
        if (!config.positions.count(l)) out.push_back({l, "position missing"});
    for (const auto& [l, pos] : config.positions) {
        if (std::find(portrait.labels.begin(), portrait.labels.end(), l) == portrait.labels.end())
            out.push_back({l, "position for an unknown label"});
    }
    if (!out.empty()) return out;

    if (config.at(portrait.zero) != SpherePoint(cx(0.0)))
        out.push_back({portrait.zero, "must sit at 0"});
    if (config.at(portrait.one) != SpherePoint(cx(1.0)))
        out.push_back({portrait.one, "must sit at 1"});
    if (!config.at(portrait.inf).is_inf()) out.push_back({portrait.inf, "must sit at infinity"});
    for (const auto& [l, pos] : config.positions)
        if (pos.is_inf() && l != portrait.inf) out.push_back({l, "only inf may sit at infinity"});
    if (!portrait.lambda_at_infinity()) {
        const SpherePoint lp = config.at(portrait.lambda);
        if (lp == SpherePoint(cx(0.0)) || lp == SpherePoint(cx(1.0)))
            out.push_back({portrait.lambda, "lambda position collides with 0 or 1"});
    }
    for (auto i = config.positions.begin(); i != config.positions.end(); ++i)
        for (auto j = std::next(i); j != config.positions.end(); ++j)
            if (sph_dist(i->second, j->second) <= 0.0)
                out.push_back({i->first, "positions collide (" + i->first + ", " + j->first + ")"});
    return out;
}

MarkedConfiguration auto_configuration(const OrbitPortrait& portrait) {
    MarkedConfiguration c;
    c.positions[portrait.zero] = SpherePoint(cx(0.0));
    c.positions[portrait.one] = SpherePoint(cx(1.0));
    c.positions[portrait.inf] = SpherePoint::infinity();
    const double m = static_cast<double>(portrait.labels.size());
    int j = 0;
    for (const auto& l : portrait.labels) {
        if (l == portrait.zero || l == portrait.one || l == portrait.inf) continue;
        const double theta = 2.0 * std::numbers::pi * j / m;
        c.positions[l] = SpherePoint(2.0 * std::exp(cx(0.0, theta)));
        ++j;
    }
    return c;
}

MarkedConfiguration random_configuration(const OrbitPortrait& portrait, std::mt19937_64& rng) {
    MarkedConfiguration c;
    c.positions[portrait.zero] = SpherePoint(cx(0.0));
    c.positions[portrait.one] = SpherePoint(cx(1.0));
    c.positions[portrait.inf] = SpherePoint::infinity();
    std::uniform_real_distribution<double> rad(0.7, 3.0);
    std::uniform_real_distribution<double> ang(0.0, 2.0 * std::numbers::pi);
    for (const auto& l : portrait.labels) {
        if (c.positions.count(l)) continue;
        for (int tries = 0; tries < 1000; ++tries) {
            const SpherePoint cand(rad(rng) * std::exp(cx(0.0, ang(rng))));
            bool clear = true;
            for (const auto& [other, pos] : c.positions)
                if (sph_dist(cand, pos) < 0.05) clear = false;
            if (clear || tries == 999) {
                c.positions[l] = cand;
                break;
            }
        }
    }
    return c;
}

GeometryReport geometry_monitor(const MarkedConfiguration& config) {
    GeometryReport rep;
    rep.min_sep = kInf;
    std::vector<SpherePoint> pts;
    std::vector<cx> finite;
    int n_inf = 0;
    for (const auto& [l, pos] : config.positions) {
        pts.push_back(pos);
        if (pos.is_inf())
            ++n_inf;
        else
            finite.push_back(pos.value());
    }
    for (size_t i = 0; i < pts.size(); ++i)
        for (size_t j = i + 1; j < pts.size(); ++j)
            rep.min_sep = std::min(rep.min_sep, sph_dist(pts[i], pts[j]));

    rep.systole_upper = kInf;
    std::vector<cx> centers = finite;
    if (std::find(centers.begin(), centers.end(), cx(0.0)) == centers.end())
        centers.push_back(cx(0.0));
    for (const cx& c : centers) {
        int at_center = 0;
        std::vector<double> d;
        for (const cx& p : finite) {
            const double dist = std::abs(p - c);
            if (dist == 0.0)
                ++at_center;
            else
                d.push_back(dist);
        }
        std::sort(d.begin(), d.end());
        const int n = static_cast<int>(d.size());
        for (int i = 0; i + 1 < n; ++i) {
            if (d[i + 1] <= d[i]) continue;
            const int inner = at_center + i + 1;
            const int outer = (n - i - 1) + n_inf;
            if (inner < 2 || outer < 2) continue;
            const double bound = 2.0 * std::numbers::pi * std::numbers::pi / std::log(d[i + 1] / d[i]);
            rep.systole_upper = std::min(rep.systole_upper, bound);
        }
    }
    return rep;
}

double sg_bound(double a, int m) {
    if (a <= 0.0) throw DegenerateParameter("sg_bound: a must be positive");
    if (m < 3) throw InvalidInput("sg_bound: m must be at least 3");
    if (m == 3) return 1.0;
    return std::exp(-4.0 * std::numbers::pi * std::numbers::pi * (m - 3) / a);
}

BetaBound beta_bounds(int eta, double min_orbit_sep) {
    if (eta < 1) throw DegenerateParameter("beta_bounds: eta must be >= 1");
    if (!(min_orbit_sep > 0.0)) throw DegenerateParameter("beta_bounds: degenerate separation");
    return {2.0 * std::numbers::pi * eta / min_orbit_sep};
}

PullbackResult pullback_step(const MarkedConfiguration& config, const OrbitPortrait& portrait) {
    cx alpha;
    if (portrait.lambda_at_infinity()) {
        alpha = cx(1.0);
    } else {
        const SpherePoint lp = config.at(portrait.lambda);
        if (lp.is_inf())
            throw InvalidAsymptoticValue("lambda position at infinity for a finite-lambda portrait");
        alpha = alpha_from_lambda(lp);
    }

    const SpherePoint t1 = config.at(portrait.successor.at(portrait.one));
    const cx beta =
        log_preimage_base(alpha, t1) + kTwoPiI * static_cast<double>(portrait.branch_index.at(portrait.one));
    if (beta == cx(0.0)) throw DegenerateParameter("pullback_step: fitted beta = 0");
    const Av2Params params(alpha, beta);

    PullbackResult out{params, {}};
    for (const auto& l : portrait.labels) {
        if (l == portrait.zero) {
            out.next.positions[l] = SpherePoint(cx(0.0));
        } else if (l == portrait.one) {
            out.next.positions[l] = SpherePoint(cx(1.0));
        } else if (l == portrait.inf) {
            out.next.positions[l] = SpherePoint::infinity();
        } else {
            const SpherePoint target = config.at(portrait.successor.at(l));
            out.next.positions[l] = SpherePoint(inverse(params, target, portrait.branch_index.at(l)));
        }
    }

    // the branch convention must reproduce 1 as the preimage of its target
    if (std::abs(inverse(params, t1, portrait.branch_index.at(portrait.one)) - 1.0) > 1e-10)
        throw InconsistentConfiguration("pullback_step: fitted map does not send 1 to its target");
    return out;
}

SolveReport solve(const OrbitPortrait& portrait, const MarkedConfiguration& init,
                  const SolveOptions& opts) {
    if (auto v = validate(portrait); !v.empty())
        throw InvalidInput("invalid portrait: " + join_violations(v));
    if (auto v = validate_configuration(init, portrait); !v.empty())
        throw InvalidInput("invalid configuration: " + join_violations(v));

    const auto zo = portrait.zero_orbit_labels();
    const std::string& ck1 = zo[portrait.preperiod];
    const std::string& ck2 = zo[portrait.preperiod + portrait.period];
    const int eta_p = portrait.eta();

    SolveReport rep;
    rep.config = init;
    {
        IterationState s;
        s.n = 0;
        s.config = init;
        const GeometryReport g = geometry_monitor(init);
        s.diag.eta = eta_p;
        s.diag.min_sep = g.min_sep;
        s.diag.systole_upper = g.systole_upper;
        rep.trace.push_back(std::move(s));
    }

    MarkedConfiguration config = init;
    int collapse_count = 0;
    for (int n = 1; n <= opts.max_iter; ++n) {
        PullbackResult step;
        try {
            step = pullback_step(config, portrait);
        } catch (const Error& e) {
            rep.outcome = SolveOutcome::degenerate;
            rep.reason = e.what();
            rep.n_steps = n;
            rep.config = config;
            return rep;
        }

        const GeometryReport g = geometry_monitor(step.next);
        double max_disp = 0.0;
        for (const auto& l : portrait.labels)
            max_disp = std::max(max_disp, sph_dist(config.at(l), step.next.at(l)));

        IterationState s;
        s.n = n;
        s.config = step.next;
        s.fitted = step.params;
        s.diag.min_sep = g.min_sep;
        s.diag.systole_upper = g.systole_upper;
        s.diag.max_disp = max_disp;
        s.diag.beta_abs = std::abs(step.params.beta);
        try {
            const WindingNumber wn =
                winding_number(step.params.beta, step.next.at(ck1).value(), step.next.at(ck2).value());
            s.diag.eta = wn.eta;
            s.diag.eta_residual = wn.residual;
        } catch (const Error& e) {
            rep.trace.push_back(std::move(s));
            rep.outcome = SolveOutcome::degenerate;
            rep.reason = e.what();
            rep.n_steps = n;
            rep.config = step.next;
            return rep;
        }
        rep.trace.push_back(s);

        if (g.min_sep < opts.eps_degenerate)
            ++collapse_count;
        else
            collapse_count = 0;
        if (collapse_count >= opts.collapse_steps) {
            rep.outcome = SolveOutcome::degenerate;
            rep.reason = "geometry collapse";
            rep.params = step.params;
            rep.n_steps = n;
            rep.config = step.next;
            return rep;
        }
        if (std::abs(eta_p) >= 1 && config.at(ck1).is_finite() && config.at(ck2).is_finite()) {
            const double dc = std::abs(config.at(ck2).value() - config.at(ck1).value());
            if (dc > 0.0 &&
                std::abs(step.params.beta) >
                    opts.beta_blowup_factor * beta_bounds(std::abs(eta_p), dc).upper) {
                rep.outcome = SolveOutcome::degenerate;
                rep.reason = "beta blowup";
                rep.params = step.params;
                rep.n_steps = n;
                rep.config = step.next;
                return rep;
            }
        }

        config = step.next;
        rep.params = step.params;
        rep.config = config;
        rep.n_steps = n;
        // a stationary but collapsed configuration is not a solution; let the
        // collapse counter classify it
        if (max_disp < opts.tol && g.min_sep >= opts.eps_degenerate) {
            rep.outcome = SolveOutcome::converged;
            return rep;
        }
    }
    rep.outcome = SolveOutcome::max_iterations;
    return rep;
}

SolveReport solve(const OrbitPortrait& portrait, const SolveOptions& opts) {
    return solve(portrait, auto_configuration(portrait), opts);
}

namespace {

// Positions of every label realized by forward iteration of g; nullopt if
// an orbit leaves the finite plane before its combinatorial closure.
std::optional<std::map<std::string, SpherePoint>> realize_positions(const OrbitPortrait& portrait,
                                                                    const Av2Params& params) {
    std::map<std::string, SpherePoint> pos;
    pos[portrait.inf] = SpherePoint::infinity();
    const auto zo = portrait.zero_orbit_labels();
    SpherePoint z(cx(0.0));
    pos[portrait.zero] = z;
    for (size_t i = 1; i < zo.size(); ++i) {
        z = eval(params, z);
        if (z.is_inf()) return std::nullopt;
        pos[zo[i]] = z;
    }
    if (!portrait.lambda_at_infinity()) {
        const SpherePoint lam = params.lambda();
        if (lam.is_inf()) return std::nullopt;
        const auto ll = portrait.lambda_orbit_labels();
        SpherePoint r = lam;
        for (size_t i = 0; i < ll.size(); ++i) {
            pos[ll[i]] = r;
            if (i + 1 == ll.size()) break;
            r = eval(params, r);
            if (r.is_inf()) return std::nullopt;
        }
    }
    return pos;
}

}  // namespace

RealizationCheck check_realization(const OrbitPortrait& portrait, const Av2Params& params,
                                   double tol, double sep_tol) {
    RealizationCheck out;
    const auto maybe_pos = realize_positions(portrait, params);
    if (!maybe_pos) return out;
    const auto& pos = *maybe_pos;

    // closure residuals: the two edges where the orbit graph folds back
    double resid = 0.0;
    const auto zo = portrait.zero_orbit_labels();
    {
        const SpherePoint tail = eval(params, pos.at(zo[portrait.preperiod + portrait.period]));
        resid = std::max(resid, sph_dist(tail, pos.at(zo[portrait.preperiod + 1])));
    }
    if (!portrait.lambda_at_infinity()) {
        const auto ll = portrait.lambda_orbit_labels();
        if (!ll.empty()) {
            const std::string& last = ll.back();
            const std::string& target = portrait.successor.at(last);
            const SpherePoint img = eval(params, pos.at(last));
            const SpherePoint want =
                target == portrait.inf ? SpherePoint::infinity() : pos.at(target);
            resid = std::max(resid, sph_dist(img, want));
        }
    }
    out.max_residual = resid;

    out.min_sep = kInf;
    for (auto i = pos.begin(); i != pos.end(); ++i)
        for (auto j = std::next(i); j != pos.end(); ++j)
            out.min_sep = std::min(out.min_sep, sph_dist(i->second, j->second));

    // implied inverse-branch indices from the realized positions
    out.branches_match = true;
    for (const auto& l : portrait.labels) {
        if (l == portrait.zero || l == portrait.inf) continue;
        const std::string& s = portrait.successor.at(l);
        const SpherePoint w = s == portrait.inf ? SpherePoint::infinity() : pos.at(s);
        cx base;
        try {
            base = log_preimage_base(params.alpha, w);
        } catch (const Error&) {
            out.branches_match = false;
            break;
        }
        const cx t = (params.beta * pos.at(l).value() - base) / kTwoPiI;
        const double k = std::round(t.real());
        if (std::abs(t - k) > 1e-6 ||
            static_cast<int>(k) != portrait.branch_index.at(l)) {
            out.branches_match = false;
            break;
        }
    }

    out.ok = out.max_residual < tol && out.min_sep > sep_tol && out.branches_match;
    return out;
}

namespace {

// Branch-pinned landing equations of the singular orbits. One complex
// equation for the 0-orbit cycle closure, one for the lambda orbit when
// lambda is finite; unknowns are beta alone (lambda at infinity) or
// (alpha, beta).
class LandingSystem {
public:
    explicit LandingSystem(const OrbitPortrait& portrait)
        : p_(portrait),
          lam_inf_(portrait.lambda_at_infinity()),
          zo_(portrait.zero_orbit_labels()),
          ll_(portrait.lambda_orbit_labels()) {}

    int dim() const { return lam_inf_ ? 1 : 2; }

    std::optional<std::vector<cx>> operator()(const std::vector<cx>& x) const {
        const cx alpha = lam_inf_ ? cx(1.0) : x[0];
        const cx beta = lam_inf_ ? x[0] : x[1];
        if (std::abs(beta) < 1e-8 || std::abs(alpha) < 1e-8) return std::nullopt;
        if (!lam_inf_ && std::abs(alpha * alpha - 1.0) < 1e-8) return std::nullopt;
        Av2Params params(alpha, beta);

        const int k1 = p_.preperiod, k2 = p_.preperiod + p_.period;
        std::map<std::string, cx> pos;
        SpherePoint z(cx(0.0));
        pos[zo_[0]] = cx(0.0);
        for (int i = 1; i <= k2; ++i) {
            z = eval(params, z);
            if (z.is_inf() || std::abs(z.value()) > 1e8) return std::nullopt;
            pos[zo_[i]] = z.value();
        }
        std::vector<cx> eqs;
        if (auto e = landing(params, pos.at(zo_[k2]), SpherePoint(pos.at(zo_[k1 + 1])),
                             p_.effective_branch_index(zo_[k2])))
            eqs.push_back(*e);
        else
            return std::nullopt;

        if (!lam_inf_) {
            const SpherePoint lamp = params.lambda();
            if (lamp.is_inf()) return std::nullopt;
            SpherePoint r = lamp;
            for (size_t i = 0; i < ll_.size(); ++i) {
                pos[ll_[i]] = r.value();
                if (i + 1 == ll_.size()) break;
                r = eval(params, r);
                if (r.is_inf() || std::abs(r.value()) > 1e8) return std::nullopt;
            }
            const std::string& last = ll_.back();
            const std::string& target = p_.successor.at(last);
            const SpherePoint w =
                target == p_.inf ? SpherePoint::infinity() : SpherePoint(pos.at(target));
            if (auto e = landing(params, pos.at(last), w, p_.branch_index.at(last)))
                eqs.push_back(*e);
            else
                return std::nullopt;
        }
        for (const cx& e : eqs)
            if (!std::isfinite(e.real()) || !std::isfinite(e.imag())) return std::nullopt;
        return eqs;
    }

private:
    // beta z - (Log(M^{-1}(w)) + 2 pi i k): vanishes when z is the branch-k
    // preimage of w.
    static std::optional<cx> landing(const Av2Params& params, cx z, const SpherePoint& w, int k) {
        try {
            const cx base = log_preimage_base(params.alpha, w);
            return params.beta * z - (base + kTwoPiI * static_cast<double>(k));
        } catch (const Error&) {
            return std::nullopt;
        }
    }

    const OrbitPortrait& p_;
    bool lam_inf_;
    std::vector<std::string> zo_;
    std::vector<std::string> ll_;
};

double norm2(const std::vector<cx>& v) {
    double s = 0.0;
    for (const cx& c : v) s += std::norm(c);
    return std::sqrt(s);
}

}  // namespace

std::optional<Av2Params> newton_oracle(const OrbitPortrait& portrait, const Av2Params& guess,
                                       const NewtonOptions& opts) {
    if (auto v = validate(portrait); !v.empty())
        throw InvalidInput("invalid portrait: " + join_violations(v));
    const LandingSystem sys(portrait);
    const int n = sys.dim();
    std::vector<cx> x =
        n == 1 ? std::vector<cx>{guess.beta} : std::vector<cx>{guess.alpha, guess.beta};

    for (int it = 0; it < opts.max_iter; ++it) {
        const auto f = sys(x);
        if (!f) return std::nullopt;
        const double nf = norm2(*f);
        if (nf < opts.tol) break;

        // finite-difference Jacobian, central, real step (the system is analytic)
        std::vector<std::vector<cx>> jac(n, std::vector<cx>(n));
        for (int j = 0; j < n; ++j) {
            const double h = 1e-7 * (1.0 + std::abs(x[j]));
            auto xp = x, xm = x;
            xp[j] += h;
            xm[j] -= h;
            const auto fp = sys(xp), fm = sys(xm);
            if (!fp || !fm) return std::nullopt;
            for (int i = 0; i < n; ++i) jac[i][j] = ((*fp)[i] - (*fm)[i]) / (2.0 * h);
        }

        std::vector<cx> delta(n);
        if (n == 1) {
            if (jac[0][0] == cx(0.0)) return std::nullopt;
            delta[0] = -(*f)[0] / jac[0][0];
        } else {
            const cx det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
            if (det == cx(0.0)) return std::nullopt;
            delta[0] = (-(*f)[0] * jac[1][1] + (*f)[1] * jac[0][1]) / det;
            delta[1] = (-jac[0][0] * (*f)[1] + jac[1][0] * (*f)[0]) / det;
        }

        bool accepted = false;
        for (double t = 1.0; t > 1e-9; t *= 0.5) {
            auto xt = x;
            for (int j = 0; j < n; ++j) xt[j] += t * delta[j];
            const auto ft = sys(xt);
            if (ft && norm2(*ft) < (1.0 - 0.25 * t) * nf) {
                x = xt;
                accepted = true;
                break;
            }
        }
        if (!accepted) return std::nullopt;
    }

    const auto f = sys(x);
    if (!f || norm2(*f) >= opts.tol) return std::nullopt;
    const Av2Params result(sys.dim() == 1 ? cx(1.0) : x[0], sys.dim() == 1 ? x[0] : x[1]);
    if (!check_realization(portrait, result).ok) return std::nullopt;
    return result;
}

}  // namespace av2
