#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <boost/math/tools/roots.hpp>

#include "mfspec/temperature.hpp"

namespace mfspec {

enum class Branch { StrictlyConcave, LinearSegment, Plateau };

inline const char* to_string(Branch b) {
    switch (b) {
    case Branch::StrictlyConcave: return "concave";
    case Branch::LinearSegment: return "linear";
    default: return "plateau";
    }
}

struct SpectrumPoint {
    double alpha = 0;
    double f = 0;
    ExtendedReal q_star;
    Branch branch = Branch::StrictlyConcave;
};

// A maximal alpha-interval on which f has one closed form.  Analytic pieces
// are the image of an open q-interval of the analytic branch; linear pieces
// come from a kink of T at q_e and carry f = T(q_e) + q_e alpha.
struct SpectrumSegment {
    enum class Kind { Analytic, Linear, Plateau };
    Kind kind = Kind::Analytic;
    double alpha_lo = 0, alpha_hi = 0; // alpha_hi is +inf for an unbounded plateau
    double q_lo = 0, q_hi = 0;         // slope of f at the alpha_lo / alpha_hi ends
    double T_lo = 0, T_hi = 0;         // T at those q
};

enum class TransitionKind { FirstOrder, SecondOrder };

inline const char* to_string(TransitionKind k) { return k == TransitionKind::FirstOrder ? "first-order" : "second-order"; }

struct Transition {
    double alpha = 0;
    TransitionKind kind = TransitionKind::FirstOrder;
    double q_left = 0, q_right = 0; // slopes of f on either side
};

enum class CaseLabel { NoTransitions, Case1, Case2, Case3, Case4, PointQ, RayUp, RayDown, Plateau, AllFrozen };

inline const char* to_string(CaseLabel c) {
    switch (c) {
    case CaseLabel::NoTransitions: return "empty Q: no transitions";
    case CaseLabel::Case1: return "case 1: alpha(q0) > alpha_lim > alpha(q1)";
    case CaseLabel::Case2: return "case 2: alpha(q0) > alpha_lim = alpha(q1)";
    case CaseLabel::Case3: return "case 3: alpha(q0) = alpha_lim > alpha(q1)";
    case CaseLabel::Case4: return "case 4: alpha(q0) = alpha_lim = alpha(q1)";
    case CaseLabel::PointQ: return "Q is a point";
    case CaseLabel::RayUp: return "Q = [q0, inf)";
    case CaseLabel::RayDown: return "Q = (-inf, q1]";
    case CaseLabel::Plateau: return "Q = (-inf, 0): plateau beyond alpha(0)";
    default: return "Q is everything: constant spectrum";
    }
}

struct SpectrumCurve {
    std::vector<SpectrumPoint> points; // increasing alpha
    std::vector<SpectrumSegment> segments;
    QSet qset;
    AlphaLim alim;
    ExtendedReal alpha_q0, alpha_q1; // analytic-side limits at the ends of Q
    double alpha_min = 0, alpha_max = 0;
};

struct TransitionReport {
    std::vector<double> locations;
    std::vector<Transition> transitions;
    int count = 0;
    CaseLabel case_label = CaseLabel::NoTransitions;
    bool concave_ok = true;
};

// Second divided differences along the curve, skipping points that sit on
// top of their predecessor.
inline bool concave_ok(const std::vector<SpectrumPoint>& pts, double tol = 1e-8) {
    std::vector<const SpectrumPoint*> kept;
    for (const auto& p : pts) {
        if (!std::isfinite(p.alpha) || !std::isfinite(p.f)) continue;
        if (!kept.empty() && p.alpha - kept.back()->alpha <= 1e-8 * (1 + std::abs(p.alpha))) continue;
        kept.push_back(&p);
    }
    for (std::size_t k = 2; k < kept.size(); ++k) {
        const auto &a = *kept[k - 2], &b = *kept[k - 1], &c = *kept[k];
        double s1 = (b.f - a.f) / (b.alpha - a.alpha), s2 = (c.f - b.f) / (c.alpha - b.alpha);
        if (2 * (s2 - s1) / (c.alpha - a.alpha) > tol) return false;
    }
    return true;
}

struct ClassifyInput {
    AlphaLim alim;
    std::optional<double> alpha_q0, alpha_q1;
    double eq_tol = 1e-9;
};

inline CaseLabel classify(const QSet& Q, const ClassifyInput& in) {
    auto same = [&](double a, double b) { return std::abs(a - b) <= in.eq_tol * (1 + std::abs(b)); };
    switch (Q.kind) {
    case QSet::Kind::Empty: return CaseLabel::NoTransitions;
    case QSet::Kind::All: return CaseLabel::AllFrozen;
    case QSet::Kind::Point: return CaseLabel::PointQ;
    case QSet::Kind::RayUp: return CaseLabel::RayUp;
    case QSet::Kind::RayDown:
        return in.alim.kind == AlphaLim::Kind::PlusInfinity ? CaseLabel::Plateau : CaseLabel::RayDown;
    case QSet::Kind::ClosedInterval: break;
    }
    if (!in.alim.finite() || !in.alpha_q0 || !in.alpha_q1) return CaseLabel::Case1;
    const double lim = in.alim.value;
    bool lo_eq = same(*in.alpha_q0, lim), hi_eq = same(*in.alpha_q1, lim);
    if (!lo_eq && !hi_eq) return CaseLabel::Case1;
    if (!lo_eq) return CaseLabel::Case2;
    if (!hi_eq) return CaseLabel::Case3;
    return CaseLabel::Case4;
}

class SpectrumModel {
public:
    SpectrumModel(const PotentialPair& pair, double q_min = -50, double q_max = 50, const Tolerances& tol = {})
        : pair_(&pair), q_min_(q_min), q_max_(q_max), tol_(tol) {
        if (!(q_min < q_max)) throw DomainError("empty q range");
        alim_ = alpha_lim(pair);
        qset_ = q_set(pair, q_min, q_max, tol);
        build();
    }

    const QSet& qset() const { return qset_; }
    const AlphaLim& alim() const { return alim_; }
    const std::vector<SpectrumSegment>& segments() const { return segs_; }
    double alpha_min() const { return alpha_min_; }
    double alpha_max() const { return alpha_max_; }
    double q_min() const { return q_min_; }
    double q_max() const { return q_max_; }
    const ExtendedReal& alpha_q0() const { return alpha_q0_; }
    const ExtendedReal& alpha_q1() const { return alpha_q1_; }

    // T(q) with a warm start from the nearest analytic value already seen.
    TemperatureResult temperature_at(double q) const {
        std::optional<double> hint;
        auto it = cache_.lower_bound(q);
        const Sample* near = nullptr;
        if (it != cache_.end()) near = &it->second;
        if (it != cache_.begin()) {
            auto pv = std::prev(it);
            if (!near || q - pv->first < near->q - q) near = &pv->second;
        }
        if (near) hint = near->T - near->alpha * (q - near->q); // tangent, below T
        auto r = temperature(*pair_, q, tol_, hint);
        if (r.regime == Regime::AnalyticBranch && r.T.is_finite() && r.alpha.is_finite())
            cache_[q] = {q, r.T.value(), r.alpha.value()};
        return r;
    }

    SpectrumPoint legendre(double alpha) const {
        if (!(alpha >= alpha_min_ - 1e-12 * (1 + std::abs(alpha_min_))) ||
            !(alpha <= alpha_max_ + 1e-12 * (1 + std::abs(alpha_max_))))
            throw OutOfRange("alpha lies outside the scanned spectrum");
        // linear pieces first: their closed form is exact at shared ends
        for (const auto& s : segs_)
            if (s.kind != SpectrumSegment::Kind::Analytic && alpha >= s.alpha_lo && alpha <= s.alpha_hi)
                return linear_point(s, alpha);
        for (const auto& s : segs_)
            if (s.kind == SpectrumSegment::Kind::Analytic && alpha >= s.alpha_lo && alpha <= s.alpha_hi)
                return analytic_point(s, alpha);
        // inside the rounding slack of a range end
        const auto& s = alpha < alpha_min_ ? lowest() : highest();
        return s.kind == SpectrumSegment::Kind::Analytic ? analytic_point(s, std::clamp(alpha, s.alpha_lo, s.alpha_hi))
                                                         : linear_point(s, alpha);
    }

    SpectrumCurve curve(int n) const;

private:
    struct Sample {
        double q, T, alpha;
    };
    struct QPiece {
        enum class Kind { Analytic, Flat, Infinite };
        Kind kind;
        double qa, qb;
        double alpha_a = 0, alpha_b = 0; // alpha at qa+ and qb-
        double T_a = 0, T_b = 0;
    };

    static double inf() { return std::numeric_limits<double>::infinity(); }

    const SpectrumSegment& lowest() const {
        return *std::min_element(segs_.begin(), segs_.end(),
                                 [](const auto& a, const auto& b) { return a.alpha_lo < b.alpha_lo; });
    }
    const SpectrumSegment& highest() const {
        return *std::max_element(segs_.begin(), segs_.end(),
                                 [](const auto& a, const auto& b) { return a.alpha_hi < b.alpha_hi; });
    }

    static SpectrumPoint linear_point(const SpectrumSegment& s, double alpha) {
        SpectrumPoint p;
        p.alpha = alpha;
        p.f = s.T_lo + s.q_lo * alpha;
        p.q_star = s.q_lo;
        p.branch = s.kind == SpectrumSegment::Kind::Plateau ? Branch::Plateau : Branch::LinearSegment;
        return p;
    }

    SpectrumPoint from_q(double q, double T, double alpha) const {
        SpectrumPoint p;
        p.alpha = alpha;
        p.f = T + q * alpha;
        p.q_star = q;
        p.branch = Branch::StrictlyConcave;
        return p;
    }

    SpectrumPoint analytic_point(const SpectrumSegment& s, double alpha) const {
        if (alpha == s.alpha_lo) return from_q(s.q_lo, s.T_lo, alpha);
        if (alpha == s.alpha_hi) return from_q(s.q_hi, s.T_hi, alpha);
        // alpha(q) decreases; narrow the bracket with cached samples
        double a = s.q_hi, b = s.q_lo, fa = std::isfinite(s.alpha_hi) ? s.alpha_hi - alpha : 1.0,
               fb = s.alpha_lo - alpha;
        for (auto it = cache_.upper_bound(a); it != cache_.end() && it->first < b; ++it) {
            double g = it->second.alpha - alpha;
            if (g > 0) {
                a = it->first;
                fa = g;
            } else {
                b = it->first;
                fb = g;
                break;
            }
        }
        auto g = [&](double q) {
            auto r = temperature_at(q);
            if (!r.alpha.is_finite()) return r.alpha.is_plus_infinity() ? 1.0 : -1.0;
            return r.alpha.value() - alpha;
        };
        std::uintmax_t iters = 100;
        auto br = boost::math::tools::toms748_solve(g, a, b, fa, fb, boost::math::tools::eps_tolerance<double>(44),
                                                    iters);
        const double q = 0.5 * (br.first + br.second);
        auto r = temperature_at(q);
        // f = T(q) + q alpha is stationary in q, so the bracket error enters quadratically
        return from_q(q, r.T.value(), alpha);
    }

    void build();

    const PotentialPair* pair_;
    double q_min_, q_max_;
    Tolerances tol_;
    AlphaLim alim_;
    QSet qset_;
    std::vector<QPiece> pieces_;
    std::vector<SpectrumSegment> segs_; // increasing alpha
    std::vector<double> corners_;       // alpha of flat pieces of T
    ExtendedReal alpha_q0_ = ExtendedReal::minus_infinity(), alpha_q1_ = ExtendedReal::minus_infinity();
    double alpha_min_ = 0, alpha_max_ = 0, plateau_cap_ = 0;
    mutable std::map<double, Sample> cache_;
};

inline void SpectrumModel::build() {
    const auto& pair = *pair_;
    auto analytic_end = [&](double q) {
        auto r = temperature_at(q);
        return std::pair<double, double>{r.T.as_double(), r.alpha.as_double()};
    };

    // pieces of T in increasing q
    if (alim_.kind == AlphaLim::Kind::PlusInfinity) {
        if (q_max_ <= 0) throw DomainError("q range holds no finite temperature");
        if (q_min_ < 0) pieces_.push_back({QPiece::Kind::Infinite, q_min_, 0.0, inf(), inf(), inf(), inf()});
        pieces_.push_back({QPiece::Kind::Analytic, std::max(0.0, q_min_), q_max_});
    } else {
        double cur = q_min_;
        for (const auto& [a, b] : qset_.components) {
            if (a > cur) pieces_.push_back({QPiece::Kind::Analytic, cur, a});
            std::vector<double> cuts{a};
            for (double x : t_tilde_breakpoints(pair, a, b))
                if (x > a && x < b) cuts.push_back(x);
            cuts.push_back(b);
            for (std::size_t k = 0; k + 1 < cuts.size(); ++k)
                pieces_.push_back({QPiece::Kind::Flat, cuts[k], cuts[k + 1]});
            cur = b;
        }
        if (cur < q_max_) pieces_.push_back({QPiece::Kind::Analytic, cur, q_max_});
    }

    for (std::size_t k = 0; k < pieces_.size(); ++k) {
        auto& p = pieces_[k];
        if (p.kind == QPiece::Kind::Flat) {
            double mid = 0.5 * (p.qa + p.qb);
            p.alpha_a = p.alpha_b = -t_tilde_slope(pair, mid, +1);
            p.T_a = t_tilde(pair, p.qa).value();
            p.T_b = t_tilde(pair, p.qb).value();
        } else if (p.kind == QPiece::Kind::Analytic) {
            bool frozen_left = k > 0 && pieces_[k - 1].kind == QPiece::Kind::Flat;
            bool frozen_right = k + 1 < pieces_.size() && pieces_[k + 1].kind == QPiece::Kind::Flat;
            if (frozen_left) {
                p.T_a = t_tilde(pair, p.qa).value();
                p.alpha_a = boundary_alpha(pair, p.qa, -1, tol_).as_double();
            } else {
                std::tie(p.T_a, p.alpha_a) = analytic_end(p.qa);
            }
            if (frozen_right) {
                p.T_b = t_tilde(pair, p.qb).value();
                p.alpha_b = boundary_alpha(pair, p.qb, +1, tol_).as_double();
            } else {
                std::tie(p.T_b, p.alpha_b) = analytic_end(p.qb);
            }
        }
    }
    for (std::size_t k = 0; k < pieces_.size(); ++k) {
        const auto& p = pieces_[k];
        if (p.kind != QPiece::Kind::Analytic) continue;
        if (k + 1 < pieces_.size() && pieces_[k + 1].kind == QPiece::Kind::Flat) alpha_q0_ = p.alpha_b;
        if (k > 0 && pieces_[k - 1].kind == QPiece::Kind::Flat) alpha_q1_ = p.alpha_a;
        if (k > 0 && pieces_[k - 1].kind == QPiece::Kind::Infinite)
            alpha_q1_ = std::isfinite(p.alpha_a) ? ExtendedReal(p.alpha_a) : ExtendedReal::plus_infinity();
    }

    // segments in increasing q, i.e. decreasing alpha
    std::vector<SpectrumSegment> segs;
    auto gap = [](double hi, double lo) { return hi - lo > 1e-10 * (1 + std::abs(lo)); };
    for (std::size_t k = 0; k < pieces_.size(); ++k) {
        const auto& p = pieces_[k];
        if (p.kind == QPiece::Kind::Analytic && std::isfinite(p.alpha_a) && p.alpha_a > p.alpha_b)
            segs.push_back({SpectrumSegment::Kind::Analytic, p.alpha_b, p.alpha_a, p.qb, p.qa, p.T_b, p.T_a});
        if (p.kind == QPiece::Kind::Analytic && !std::isfinite(p.alpha_a))
            segs.push_back({SpectrumSegment::Kind::Analytic, p.alpha_b, inf(), p.qb, p.qa, p.T_b, p.T_a});
        if (p.kind == QPiece::Kind::Flat) corners_.push_back(p.alpha_a);
        if (k + 1 == pieces_.size()) break;
        const auto& n = pieces_[k + 1];
        const double qe = p.qb, left = p.alpha_b, right = n.alpha_a;
        if (!std::isfinite(right) || !gap(left, right)) continue;
        const double Te = n.T_a;
        auto kind = std::isfinite(left) ? SpectrumSegment::Kind::Linear : SpectrumSegment::Kind::Plateau;
        segs.push_back({kind, right, left, qe, qe, Te, Te});
    }
    std::reverse(segs.begin(), segs.end());
    segs_ = segs;
    std::sort(corners_.begin(), corners_.end());

    alpha_min_ = inf();
    alpha_max_ = -inf();
    for (const auto& s : segs_) {
        alpha_min_ = std::min(alpha_min_, s.alpha_lo);
        alpha_max_ = std::max(alpha_max_, s.kind == SpectrumSegment::Kind::Plateau ? s.alpha_lo : s.alpha_hi);
    }
    for (double c : corners_) {
        alpha_min_ = std::min(alpha_min_, c);
        alpha_max_ = std::max(alpha_max_, c);
    }
    // an unbounded plateau is sampled over a stretch as long as the rest of the curve
    for (auto& s : segs_)
        if (!std::isfinite(s.alpha_hi)) {
            plateau_cap_ = s.alpha_lo + std::max(0.5, s.alpha_lo - alpha_min_);
            if (s.kind == SpectrumSegment::Kind::Plateau) {
                s.alpha_hi = plateau_cap_;
                alpha_max_ = std::max(alpha_max_, plateau_cap_);
            }
        }
    if (segs_.empty() && corners_.empty()) throw DomainError("no spectrum in the q range");
}

inline SpectrumCurve SpectrumModel::curve(int n) const {
    if (n < 64) throw DomainError("spectrum grid needs at least 64 points");
    SpectrumCurve c;
    c.segments = segs_;
    c.qset = qset_;
    c.alim = alim_;
    c.alpha_q0 = alpha_q0_;
    c.alpha_q1 = alpha_q1_;
    c.alpha_min = alpha_min_;
    c.alpha_max = alpha_max_;

    std::vector<SpectrumPoint> pts;
    // junctions and corners exactly once
    std::vector<double> junctions(corners_);
    for (const auto& s : segs_) {
        junctions.push_back(s.alpha_lo);
        if (std::isfinite(s.alpha_hi)) junctions.push_back(s.alpha_hi);
    }
    std::sort(junctions.begin(), junctions.end());
    junctions.erase(std::unique(junctions.begin(), junctions.end(),
                                [](double a, double b) { return std::abs(a - b) <= 1e-14 * (1 + std::abs(a)); }),
                    junctions.end());
    for (double a : junctions) pts.push_back(legendre(a));
    // the maximum f = T(0) sits at alpha(0)
    for (const auto& s : segs_)
        if (s.kind == SpectrumSegment::Kind::Analytic && s.q_hi < 0 && s.q_lo > 0) {
            auto r = temperature_at(0.0);
            if (r.T.is_finite() && r.alpha.is_finite()) pts.push_back(from_q(0.0, r.T.value(), r.alpha.value()));
        }

    int n_lin = 0;
    double analytic_len = 0;
    for (const auto& s : segs_) {
        if (s.kind != SpectrumSegment::Kind::Analytic) ++n_lin;
        else analytic_len += std::abs(std::atan(s.q_lo) - std::atan(s.q_hi));
    }
    int left = n - int(pts.size());
    int per_lin = n_lin ? std::max(16, n / 16) : 0;
    if (n_lin && per_lin * n_lin > left / 2) per_lin = std::max(1, left / (2 * n_lin));
    if (analytic_len == 0 && n_lin) per_lin = left / n_lin;
    int remaining = left - per_lin * n_lin;

    int lin_seen = 0;
    for (const auto& s : segs_) {
        if (s.kind == SpectrumSegment::Kind::Analytic) continue;
        int k = per_lin + (analytic_len == 0 && ++lin_seen == n_lin ? left - per_lin * n_lin : 0);
        for (int j = 1; j <= k; ++j) pts.push_back(linear_point(s, s.alpha_lo + (s.alpha_hi - s.alpha_lo) * j / (k + 1)));
    }
    if (analytic_len > 0) {
        int given = 0;
        std::vector<const SpectrumSegment*> an;
        for (const auto& s : segs_)
            if (s.kind == SpectrumSegment::Kind::Analytic) an.push_back(&s);
        for (std::size_t i = 0; i < an.size(); ++i) {
            const auto& s = *an[i];
            double th_a = std::atan(s.q_hi), th_b = std::atan(s.q_lo);
            int k = i + 1 == an.size() ? remaining - given
                                       : int(std::lround(remaining * std::abs(th_b - th_a) / analytic_len));
            given += k;
            for (int j = 1; j <= k; ++j) {
                double th = th_a + (th_b - th_a) * double(j) / (k + 1);
                double q = std::tan(th);
                auto r = temperature_at(q);
                if (r.alpha.is_finite() && r.T.is_finite()) {
                    pts.push_back(from_q(q, r.T.value(), r.alpha.value()));
                } else {
                    SpectrumPoint p;
                    p.alpha = r.alpha.as_double();
                    p.f = r.T.as_double() + q * p.alpha;
                    p.q_star = q;
                    pts.push_back(p);
                }
            }
        }
    }
    std::stable_sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a.alpha < b.alpha; });
    c.points = std::move(pts);
    return c;
}

inline SpectrumCurve spectrum_curve(const PotentialPair& pair, int n = 512, double q_min = -50, double q_max = 50,
                                    const Tolerances& tol = {}) {
    return SpectrumModel(pair, q_min, q_max, tol).curve(n);
}

inline SpectrumPoint legendre(const PotentialPair& pair, double alpha, double q_min = -50, double q_max = 50,
                              const Tolerances& tol = {}) {
    return SpectrumModel(pair, q_min, q_max, tol).legendre(alpha);
}

inline TransitionReport phase_transitions(const SpectrumCurve& c, const Tolerances& tol = {}) {
    TransitionReport r;
    for (std::size_t k = 0; k + 1 < c.segments.size(); ++k) {
        const auto &a = c.segments[k], &b = c.segments[k + 1];
        const double at = a.alpha_hi;
        if (std::abs(b.alpha_lo - at) > 1e-9 * (1 + std::abs(at))) continue; // not adjacent
        if (std::abs(b.q_lo - a.q_hi) > tol.slope_tol) r.transitions.push_back({at, TransitionKind::FirstOrder, a.q_hi, b.q_lo});
        else if ((a.kind == SpectrumSegment::Kind::Analytic) != (b.kind == SpectrumSegment::Kind::Analytic))
            r.transitions.push_back({at, TransitionKind::SecondOrder, a.q_hi, b.q_lo});
    }
    // T jumps to +inf below q = 0; when alpha(0+) is infinite the kink
    // sits at the far end of the alpha axis and no segment pair shows it
    if (c.qset.kind == QSet::Kind::RayDown && c.alim.kind == AlphaLim::Kind::PlusInfinity &&
        c.alpha_q1.is_plus_infinity())
        r.transitions.push_back({std::numeric_limits<double>::infinity(), TransitionKind::SecondOrder, 0, 0});
    for (const auto& t : r.transitions) r.locations.push_back(t.alpha);
    r.count = int(r.transitions.size());
    ClassifyInput in;
    in.alim = c.alim;
    if (c.alpha_q0.is_finite()) in.alpha_q0 = c.alpha_q0.value();
    if (c.alpha_q1.is_finite()) in.alpha_q1 = c.alpha_q1.value();
    r.case_label = classify(c.qset, in);
    r.concave_ok = concave_ok(c.points);
    return r;
}

} // namespace mfspec
