#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "mfspec/extended_real.hpp"
#include "mfspec/potentials.hpp"

namespace mfspec {

struct Tolerances {
    double rel_tol = 1e-12;
    double root_tol = 1e-12;     // absolute tolerance on T
    double pressure_tol = 1e-10; // |P(q,T)| on the analytic branch
    double endpoint_tol = 1e-9;  // frozen-set endpoints
    double slope_tol = 1e-6;     // one-sided slope jumps of the spectrum
};

// Z1 = sum_i p_i^q s_i^t.  When convergent the true sum lies in
// [partial_sum, partial_sum + tail_bound]; log_sum is log of the midpoint.
struct SeriesValue {
    Verdict verdict = Verdict::Divergent;
    double partial_sum = std::numeric_limits<double>::infinity();
    double tail_bound = 0;
    std::uint64_t terms_used = 0;
    double log_sum = std::numeric_limits<double>::infinity();

    bool convergent() const { return verdict == Verdict::Convergent; }
};

struct PressureValue {
    ExtendedReal value = ExtendedReal::plus_infinity();
    bool finite = false;
};

namespace detail {

struct PairSum {
    Verdict verdict = Verdict::Divergent;
    ScaledSum sum;
    std::uint64_t terms = 0;

    double log_abs() const { return sum.log_scale() + std::log(std::abs(sum.value())); }
    double relative_uncertainty() const { return sum.uncertainty() / std::abs(sum.value()); }
};

// sum_i p_i^q s_i^t * moment_i with the head extended until the enclosure
// meets rel_tol, stops shrinking, or the head reaches 2^20 terms.
inline PairSum pair_sum(const PotentialPair& pair, double q, double t, Moment moment, double rel_tol) {
    std::uint64_t N = pair.direct_terms();
    std::vector<double> lp = pair.log_phi(), ls = pair.log_psi();
    PairSum best;
    for (;;) {
        std::vector<double> head(N), mom;
        for (std::uint64_t k = 0; k < N; ++k) head[k] = q * lp[k] + t * ls[k];
        if (moment == Moment::Phi) mom = lp;
        if (moment == Moment::Psi) mom = ls;
        auto comps = tail_components(pair.phi_classes(), q, pair.psi_form(), t, N, moment);
        SumOptions opt;
        opt.budget_rel = 0.05 * rel_tol;
        auto tot = sum_series(head, mom, comps, opt);
        PairSum out{tot.verdict, tot.sum, tot.terms};
        if (out.verdict != Verdict::Convergent) return out;
        if (best.terms && !(out.relative_uncertainty() < 0.5 * best.relative_uncertainty())) return best;
        best = out;
        if (out.relative_uncertainty() <= rel_tol || N >= (std::uint64_t(1) << 20)) return out;
        std::uint64_t N2 = 2 * N;
        lp.resize(N2);
        ls.resize(N2);
        for (std::uint64_t i = N + 1; i <= N2; ++i) {
            lp[i - 1] = log_weight(pair.phi(), i);
            ls[i - 1] = log_weight(pair.psi(), i);
        }
        N = N2;
    }
}

} // namespace detail

inline SeriesValue z1(const PotentialPair& pair, double q, double t, const Tolerances& tol = {}) {
    auto s = detail::pair_sum(pair, q, t, detail::Moment::None, tol.rel_tol);
    SeriesValue v;
    v.verdict = s.verdict;
    if (s.verdict != Verdict::Convergent) return v;
    const double scale = std::exp(s.sum.log_scale());
    v.partial_sum = (s.sum.value() - s.sum.uncertainty()) * scale;
    v.tail_bound = 2 * s.sum.uncertainty() * scale;
    v.terms_used = s.terms;
    v.log_sum = s.log_abs();
    return v;
}

inline PressureValue pressure(const PotentialPair& pair, double q, double t, const Tolerances& tol = {}) {
    auto v = z1(pair, q, t, tol);
    if (!v.convergent()) return {};
    return {ExtendedReal(v.log_sum), true};
}

inline double t_inf(const PotentialPair& pair) {
    auto a = detail::asymptotics(pair.psi_form());
    if (a.rho < 0) throw NotPolynomial("psi decays geometrically; no finite threshold");
    return 1.0 / a.U;
}

// One line t = slope*q + intercept of the finiteness boundary, per symbol class.
struct BoundaryLine {
    double slope = 0, intercept = 0;
    std::size_t cls = 0;
};

inline std::vector<BoundaryLine> boundary_lines(const PotentialPair& pair) {
    auto ps = detail::asymptotics(pair.psi_form());
    if (ps.rho < 0) throw NotPolynomial("psi decays geometrically");
    std::vector<BoundaryLine> out;
    for (std::size_t k = 0; k < pair.phi_classes().size(); ++k) {
        const auto& c = pair.phi_classes()[k];
        auto a = detail::asymptotics(c.form);
        if (a.rho < 0) continue;
        out.push_back({-a.U / ps.U, 1.0 / (double(c.prime) * ps.U), k});
    }
    return out;
}

inline ExtendedReal t_tilde(const PotentialPair& pair, double q) {
    auto ps = detail::asymptotics(pair.psi_form());
    if (ps.rho < 0) throw NotPolynomial("psi decays geometrically");
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& c : pair.phi_classes()) {
        auto a = detail::asymptotics(c.form);
        double p = double(c.prime);
        if (a.rho < 0) {
            if (q < 0) return ExtendedReal::plus_infinity();
            if (q > 0) continue;
            best = std::max(best, 1.0 / (p * ps.U));
        } else {
            best = std::max(best, (1.0 / p - q * a.U) / ps.U);
        }
    }
    if (best == -std::numeric_limits<double>::infinity()) return ExtendedReal::minus_infinity();
    return best;
}

// Slope of t_tilde just left (side < 0) or right (side > 0) of q.
inline double t_tilde_slope(const PotentialPair& pair, double q, int side) {
    auto lines = boundary_lines(pair);
    if (lines.empty()) throw NotPolynomial("no polynomial class in phi");
    double best = -std::numeric_limits<double>::infinity(), slope = 0;
    for (const auto& l : lines) {
        double v = l.slope * q + l.intercept;
        double scale = 1e-12 * (1 + std::abs(v));
        if (v > best + scale) {
            best = v;
            slope = l.slope;
        } else if (std::abs(v - best) <= scale) {
            // on a tie the envelope continues with the steeper line to the left
            slope = side < 0 ? std::min(slope, l.slope) : std::max(slope, l.slope);
            best = std::max(best, v);
        }
    }
    return slope;
}

// Points inside (q_min, q_max) where the boundary switches lines.
inline std::vector<double> t_tilde_breakpoints(const PotentialPair& pair, double q_min, double q_max) {
    auto lines = boundary_lines(pair);
    std::vector<double> out;
    if (lines.size() < 2) return out;
    auto top = [&](double q) {
        std::size_t arg = 0;
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < lines.size(); ++k) {
            double v = lines[k].slope * q + lines[k].intercept;
            if (v > best) {
                best = v;
                arg = k;
            }
        }
        return arg;
    };
    double q = q_min;
    std::size_t cur = top(q);
    while (q < q_max) {
        // next crossing of the current line with a shallower one
        double next = q_max;
        std::size_t nxt = cur;
        for (std::size_t k = 0; k < lines.size(); ++k) {
            double ds = lines[k].slope - lines[cur].slope;
            if (ds <= 0) continue;
            double x = (lines[cur].intercept - lines[k].intercept) / ds;
            if (x > q && x < next) {
                next = x;
                nxt = k;
            } else if (x > q && x == next && lines[k].slope > lines[nxt].slope) {
                nxt = k;
            }
        }
        if (nxt == cur) break;
        out.push_back(next);
        q = next;
        cur = nxt;
    }
    return out;
}

} // namespace mfspec
