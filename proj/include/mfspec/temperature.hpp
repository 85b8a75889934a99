#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <utility>
#include <vector>

#include "mfspec/pressure.hpp"

namespace mfspec {

enum class Regime { AnalyticBranch, Frozen };

inline const char* to_string(Regime r) { return r == Regime::Frozen ? "frozen" : "analytic"; }

struct TemperatureResult {
    double q = 0;
    ExtendedReal T;
    Regime regime = Regime::AnalyticBranch;
    ExtendedReal alpha;       // alpha(q); on divergent moments the limiting value
    bool weights_finite = false;
    ExtendedReal t_tilde;
};

namespace detail {

struct Moments {
    bool finite = false;
    PairSum z, phi, psi;
};

inline Moments moments(const PotentialPair& pair, double q, double t, const Tolerances& tol) {
    Moments m;
    m.z = pair_sum(pair, q, t, Moment::None, tol.rel_tol);
    m.phi = pair_sum(pair, q, t, Moment::Phi, tol.rel_tol);
    m.psi = pair_sum(pair, q, t, Moment::Psi, tol.rel_tol);
    m.finite = m.z.verdict == Verdict::Convergent && m.phi.verdict == Verdict::Convergent &&
               m.psi.verdict == Verdict::Convergent;
    return m;
}

inline double ratio(const PairSum& a, const PairSum& b) {
    return std::exp(a.sum.log_scale() - b.sum.log_scale()) * (a.sum.value() / b.sum.value());
}

// Gibbs ratio at (q, t), or its limit when the moments blow up; both
// moments diverging leaves the slope of the boundary on the given side.
inline ExtendedReal gibbs_alpha(const PotentialPair& pair, double q, const Moments& m, int side = +1) {
    if (m.finite) return ratio(m.phi, m.psi);
    bool num = m.phi.verdict != Verdict::Convergent, den = m.psi.verdict != Verdict::Convergent;
    if (num && !den) return ExtendedReal::plus_infinity();
    if (den && !num) return 0.0;
    return -t_tilde_slope(pair, q, side);
}

} // namespace detail

// T(q) = t_tilde(q), decided on the boundary series.
inline bool frozen(const PotentialPair& pair, double q, const Tolerances& tol = {}) {
    auto tt = t_tilde(pair, q);
    if (tt.is_plus_infinity()) return true;
    if (tt.is_minus_infinity()) return false;
    auto z = z1(pair, q, tt.value(), tol);
    return z.convergent() && z.log_sum <= 0;
}

struct RootResult {
    double T = 0;
    // the root sits closer to t_tilde than the exponent snapping can resolve
    bool at_boundary = false;
};

// Root of P(q, .) by Newton with a bracket.  Above a finite boundary the
// unknown is x = log(t - t_tilde): P is singular at the boundary in t but
// close to linear in x there.  Points the exponent snapping cannot tell from
// the boundary count as P > 0.
inline RootResult solve_temperature(const PotentialPair& pair, double q, const ExtendedReal& tt,
                                    const Tolerances& tol, std::optional<double> hint = {}) {
    using detail::Moment;
    constexpr double inf = std::numeric_limits<double>::infinity();
    const bool fin = tt.is_finite();
    const double t0 = fin ? tt.value() : 0.0;
    auto to_t = [&](double x) { return fin ? t0 + std::exp(x) : x; };

    struct Eval {
        bool ok = false;
        double p = inf, dp = 0;
    };
    auto eval = [&](double x) {
        Eval e;
        const double t = to_t(x);
        if (fin && !(t > t0)) return e;
        auto z = detail::pair_sum(pair, q, t, Moment::None, tol.rel_tol);
        if (z.verdict != Verdict::Convergent) return e;
        auto zs = detail::pair_sum(pair, q, t, Moment::Psi, tol.rel_tol);
        const double dpdt = detail::ratio(zs, z);
        e.ok = true;
        e.p = z.log_abs();
        e.dp = fin ? dpdt * std::exp(x) : dpdt;
        return e;
    };

    double x;
    if (hint && std::isfinite(*hint) && (!fin || *hint > t0)) x = fin ? std::log(*hint - t0) : *hint;
    else x = fin ? std::log(1 + std::abs(t0)) : 0.0;  // sums converge slowly right at the boundary

    double xl = -inf, xh = inf;
    bool have_lo = false;
    for (int it = 0; it < 400; ++it) {
        const Eval e = eval(x);
        if (e.p > 0) {
            xl = x;
            have_lo = have_lo || e.ok;
        } else {
            xh = x;
        }
        double xn = std::numeric_limits<double>::quiet_NaN();
        if (e.ok && e.dp < 0) {
            double step = -e.p / e.dp;
            if (fin) step = std::clamp(step, -40.0, 5.0);
            xn = x + step;
            if (xn > xl && xn < xh && std::abs(to_t(xn) - to_t(x)) <= 0.25 * tol.root_tol) return {to_t(xn), false};
        }
        if (!(xn > xl && xn < xh)) {
            if (std::isfinite(xl) && std::isfinite(xh)) xn = 0.5 * (xl + xh);
            else if (std::isfinite(xl)) xn = xl + (fin ? 1.0 : std::max(1.0, std::abs(xl)));
            else xn = xh - (fin ? 4.0 : std::max(1.0, std::abs(xh)));
        }
        if (std::isfinite(xl) && std::isfinite(xh)) {
            // below a few ulps of t the bracket cannot shrink any further
            const double floor = 8 * std::numeric_limits<double>::epsilon() * std::abs(to_t(xh));
            if (to_t(xh) - to_t(xl) <= std::max(0.01 * tol.root_tol, floor)) break;
        }
        x = xn;
    }
    if (!have_lo && fin) return {t0, true};
    if (!std::isfinite(xl) || !std::isfinite(xh)) throw NoFiniteRoot("temperature root search did not bracket");
    return {0.5 * (to_t(xl) + to_t(xh)), false};
}

inline TemperatureResult temperature(const PotentialPair& pair, double q, const Tolerances& tol = {},
                                     std::optional<double> hint = {}) {
    TemperatureResult r;
    r.q = q;
    r.t_tilde = t_tilde(pair, q);
    if (r.t_tilde.is_plus_infinity()) {
        r.T = ExtendedReal::plus_infinity();
        r.regime = Regime::Frozen;
        r.alpha = ExtendedReal::plus_infinity();
        return r;
    }
    if (r.t_tilde.is_finite() && frozen(pair, q, tol)) {
        r.T = r.t_tilde;
        r.regime = Regime::Frozen;
        auto m = detail::moments(pair, q, r.t_tilde.value(), tol);
        r.weights_finite = m.finite;
        r.alpha = -t_tilde_slope(pair, q, +1);
        return r;
    }
    auto root = solve_temperature(pair, q, r.t_tilde, tol, hint);
    const double T = root.T;
    r.T = T;
    r.regime = Regime::AnalyticBranch;
    if (root.at_boundary) {
        // the Gibbs state is carried by the far tail, whose ratio is the boundary slope
        r.weights_finite = true;
        r.alpha = -t_tilde_slope(pair, q, -1);
        return r;
    }
    auto m = detail::moments(pair, q, T, tol);
    r.weights_finite = m.finite;
    r.alpha = detail::gibbs_alpha(pair, q, m);
    return r;
}

inline double alpha_of_q(const PotentialPair& pair, double q, const Tolerances& tol = {}) {
    auto r = temperature(pair, q, tol);
    if (r.regime == Regime::Frozen && r.alpha.is_finite()) return r.alpha.value();
    if (!r.weights_finite || !r.alpha.is_finite())
        throw AlphaDiverges("Gibbs moments diverge at this q", r.alpha.is_plus_infinity() ? +1 : -1);
    return r.alpha.value();
}

// Gibbs ratio at a frozen-set endpoint, read on the boundary line; when the
// moments diverge there the ratio tends to the slope of the frozen side
// (side > 0: the frozen set lies right of q).
inline ExtendedReal boundary_alpha(const PotentialPair& pair, double q, int frozen_side = +1,
                                   const Tolerances& tol = {}) {
    auto tt = t_tilde(pair, q);
    if (!tt.is_finite()) return tt.is_plus_infinity() ? ExtendedReal::plus_infinity() : ExtendedReal(0.0);
    auto m = detail::moments(pair, q, tt.value(), tol);
    return detail::gibbs_alpha(pair, q, m, frozen_side);
}

class GibbsWeights {
public:
    GibbsWeights(const PotentialPair& pair, double q, double t, const Tolerances& tol = {})
        : pair_(&pair), q_(q), t_(t) {
        auto s = detail::pair_sum(pair, q, t, detail::Moment::None, tol.rel_tol);
        if (s.verdict != Verdict::Convergent) throw NoGibbsState("partition function diverges");
        log_z_ = s.log_abs();
    }

    double q() const { return q_; }
    double t() const { return t_; }
    double log_z() const { return log_z_; }

    double log_weight(std::uint64_t i) const {
        return q_ * mfspec::log_weight(pair_->phi(), i) + t_ * mfspec::log_weight(pair_->psi(), i) - log_z_;
    }
    double weight(std::uint64_t i) const { return std::exp(log_weight(i)); }

    // mass of the symbols above n
    double tail_mass(std::uint64_t n) const {
        double s = 0;
        for (std::uint64_t i = 1; i <= n; ++i) s += weight(i);
        return std::max(0.0, 1.0 - s);
    }

private:
    const PotentialPair* pair_;
    double q_, t_, log_z_;
};

inline GibbsWeights gibbs_weights(const PotentialPair& pair, double q, double t, const Tolerances& tol = {}) {
    return GibbsWeights(pair, q, t, tol);
}

struct QSet {
    enum class Kind { Empty, Point, ClosedInterval, RayUp, RayDown, All };
    Kind kind = Kind::Empty;
    std::optional<double> q0, q1;
    // frozen intervals in increasing order; q_min/q_max mark unbounded ends
    std::vector<std::pair<double, double>> components;
    double q_min = -50, q_max = 50;
};

inline const char* to_string(QSet::Kind k) {
    switch (k) {
    case QSet::Kind::Empty: return "empty";
    case QSet::Kind::Point: return "point";
    case QSet::Kind::ClosedInterval: return "closed interval";
    case QSet::Kind::RayUp: return "ray up";
    case QSet::Kind::RayDown: return "ray down";
    default: return "all";
    }
}

inline QSet q_set(const PotentialPair& pair, double q_min = -50, double q_max = 50, const Tolerances& tol = {},
                  int grid = 401) {
    QSet Q;
    Q.q_min = q_min;
    Q.q_max = q_max;
    auto finish = [&]() {
        if (Q.components.empty()) {
            Q.kind = QSet::Kind::Empty;
            return Q;
        }
        double a = Q.components.front().first, b = Q.components.back().second;
        bool down = a <= q_min, up = b >= q_max;
        if (down && up) Q.kind = QSet::Kind::All;
        else if (down) { Q.kind = QSet::Kind::RayDown; Q.q1 = b; }
        else if (up) { Q.kind = QSet::Kind::RayUp; Q.q0 = a; }
        else {
            Q.q0 = a;
            Q.q1 = b;
            Q.kind = b - a <= tol.endpoint_tol ? QSet::Kind::Point : QSet::Kind::ClosedInterval;
        }
        return Q;
    };

    if (alpha_lim(pair).kind == AlphaLim::Kind::PlusInfinity) {
        // the boundary is +inf left of zero and -inf right of it
        if (q_min < 0) Q.components.push_back({q_min, std::min(0.0, q_max)});
        else if (q_min <= 0 && q_max >= 0 && frozen(pair, 0.0, tol)) Q.components.push_back({0.0, 0.0});
        return finish();
    }

    std::vector<double> qs(grid);
    std::vector<char> fz(grid);
    for (int k = 0; k < grid; ++k) {
        qs[k] = q_min + (q_max - q_min) * k / (grid - 1);
        fz[k] = frozen(pair, qs[k], tol);
    }
    // frozen end of the bracket [a, b] with frozen(a) != frozen(b)
    auto edge = [&](double a, double b, bool fa) {
        while (std::abs(b - a) > 0.25 * tol.endpoint_tol) {
            double mid = 0.5 * (a + b);
            (frozen(pair, mid, tol) == fa ? a : b) = mid;
        }
        return fa ? a : b;
    };
    for (int k = 0; k < grid;) {
        if (!fz[k]) { ++k; continue; }
        int e = k;
        while (e + 1 < grid && fz[e + 1]) ++e;
        double lo = k == 0 ? q_min : edge(qs[k], qs[k - 1], true);
        double hi = e == grid - 1 ? q_max : edge(qs[e], qs[e + 1], true);
        Q.components.push_back({lo, hi});
        k = e + 1;
    }
    return finish();
}

} // namespace mfspec
