#pragma once

// Certified summation of positive series whose terms are exp(LogForm) at
// integer powers m = j^power.  Head terms are added directly; the tail from
// j_s on is an Euler-Maclaurin expansion whose integral is taken by adaptive
// Gauss-Kronrod in s = log log m, closed off analytically on the boundary
// (m^-1 (log m)^-V) and bounded by the decay of the integrand otherwise.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "mfspec/detail/jet.hpp"
#include "mfspec/detail/log_form.hpp"

namespace mfspec {

enum class Verdict { Convergent, DivergentAtBoundary, Divergent };

inline const char* to_string(Verdict v) {
    switch (v) {
    case Verdict::Convergent: return "Convergent";
    case Verdict::DivergentAtBoundary: return "DivergentAtBoundary";
    default: return "Divergent";
    }
}

} // namespace mfspec

namespace mfspec::detail {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Running sum of exp(l_k) * x_k with a floating log scale (Neumaier compensated).
class ScaledSum {
public:
    void add(double log_mag, double x) {
        if (x == 0.0 || log_mag == kNegInf || std::isnan(log_mag)) return;
        if (log_mag > scale_) rescale(log_mag);
        double y = x * std::exp(log_mag - scale_);
        double t = sum_ + y;
        if (std::abs(sum_) >= std::abs(y))
            comp_ += (sum_ - t) + y;
        else
            comp_ += (y - t) + sum_;
        sum_ = t;
    }
    void add_uncertainty(double log_mag, double u) {
        if (u == 0.0 || log_mag == kNegInf) return;
        if (log_mag > scale_) rescale(log_mag);
        unc_ += std::abs(u) * std::exp(log_mag - scale_);
    }
    void merge(const ScaledSum& o, int sign = 1) {
        add(o.scale_, sign * o.sum_);
        add(o.scale_, sign * o.comp_);
        add_uncertainty(o.scale_, o.unc_);
    }

    double log_scale() const { return scale_; }
    double value() const { return sum_ + comp_; }
    double uncertainty() const { return unc_; }

private:
    void rescale(double s) {
        if (scale_ != kNegInf) {
            double f = std::exp(scale_ - s);
            sum_ *= f;
            comp_ *= f;
            unc_ *= f;
        }
        scale_ = s;
    }

    double scale_ = kNegInf;
    double sum_ = 0, comp_ = 0, unc_ = 0;
};

struct TailComponent {
    int sign = 1;
    std::uint64_t power = 1;   // m = j^power
    std::uint64_t j_after = 0; // the component covers j > j_after
    LogForm term;              // log of the summand as a function of m
    LogForm moment;            // optional factor (not logged); empty means 1
};

struct SumOptions {
    double snap = 1e-13;              // exponent differences below this are exactly zero
    std::uint64_t em_start_power = 256; // direct terms before EM for power > 1
    double boundary_Y = 45.0;         // log m past which the boundary integrand is replaced by its asymptote
    double budget_rel = 0;            // tail error allowed relative to the head; 0 asks for full precision
};

struct ComponentClass {
    Verdict verdict = Verdict::Convergent;
    Asymptotics a;
    double eps = 0;     // effective U - 1/power
    double V_eff = 0;
    bool boundary = false;
};

inline ComponentClass classify_component(const TailComponent& c, const SumOptions& opt) {
    ComponentClass r;
    r.a = asymptotics(c.term);
    const bool lin = has_kind(c.moment, LogAtom::Kind::Linear);
    const bool lg = has_kind(c.moment, LogAtom::Kind::Log);
    const double tol = opt.snap * (1.0 + r.a.log_mass);
    double U = r.a.U - (lin ? 1.0 : 0.0);
    r.V_eff = r.a.V - ((lg && !lin) ? 1.0 : 0.0);
    r.eps = U - 1.0 / double(c.power);
    if (r.a.rho > 0) { r.verdict = Verdict::Divergent; return r; }
    if (r.a.rho < 0) return r;
    if (std::abs(r.eps) <= tol) r.eps = 0;
    if (r.eps < 0) { r.verdict = Verdict::Divergent; return r; }
    if (r.eps > 0) return r;
    r.boundary = true;
    double dv = r.V_eff - 1.0;
    if (std::abs(dv) <= tol || dv < 0) r.verdict = Verdict::DivergentAtBoundary;
    return r;
}

// LogForm regrouped as K + cY*Y + cLY*log Y + rho*e^Y + small shift
// corrections, Y = log m.
struct Canonical {
    double K = 0, cY = 0, cLY = 0, rho = 0;
    std::vector<std::pair<double, double>> log_shifts, loglog_shifts;

    // everything except the cY*Y part
    double eval_rest(double Y) const {
        double r = K + cLY * std::log(Y);
        if (rho != 0.0) r += rho * std::exp(Y);
        for (auto [c, s] : log_shifts) r += c * std::log1p(s * std::exp(-Y));
        for (auto [c, s] : loglog_shifts) r += c * std::log1p(std::log1p(s * std::exp(-Y)) / Y);
        return r;
    }
};

inline Canonical canonical(const LogForm& f) {
    Canonical c;
    for (const auto& a : f) {
        if (a.coef == 0.0) continue;
        switch (a.kind) {
        case LogAtom::Kind::Constant: c.K += a.coef; break;
        case LogAtom::Kind::Linear: c.rho += a.coef; break;
        case LogAtom::Kind::Log:
            c.cY += a.coef;
            if (a.shift != 0.0) c.log_shifts.push_back({a.coef, a.shift});
            break;
        case LogAtom::Kind::LogLog:
            c.cLY += a.coef;
            if (a.shift != 0.0) c.loglog_shifts.push_back({a.coef, a.shift});
            break;
        }
    }
    return c;
}

inline double moment_value_at_log(const LogForm& moment, double Y) {
    return moment.empty() ? 1.0 : eval_at_log(moment, Y);
}

// Sum over j > c.j_after of exp(term(j^p)) * moment(j^p).
inline ScaledSum sum_component(const TailComponent& c, const ComponentClass& cls,
                               const SumOptions& opt, double log_budget = kNegInf) {
    using boost::math::quadrature::gauss_kronrod;
    ScaledSum acc;
    const double e = double(c.power);
    const double log_e = std::log(e);

    std::uint64_t js = c.j_after + 1;
    if (c.power > 1) js = std::max<std::uint64_t>(js, opt.em_start_power);
    for (std::uint64_t j = c.j_after + 1; j < js; ++j) {
        double Y = e * std::log(double(j));
        acc.add(eval_at_log(c.term, Y), moment_value_at_log(c.moment, Y));
    }

    const double x0 = double(js);
    // Integrand in s = log Y, Y = log m, dx = x Y/e ds.  Like powers are merged
    // first so that the net coefficient of Y is the (snapped) eps itself.
    const Canonical cf = canonical(c.term);
    const double slope_Y = -(cls.eps + (has_kind(c.moment, LogAtom::Kind::Linear) ? 1.0 : 0.0));
    auto Lfun = [&](double s) {
        double Y = std::exp(s);
        double m = moment_value_at_log(c.moment, Y);
        double lm = std::log(std::abs(m));
        if (has_kind(c.moment, LogAtom::Kind::Linear)) lm -= Y;
        return cf.eval_rest(Y) + slope_Y * Y + lm + s - log_e;
    };
    const double s_a = std::log(e * std::log(x0));
    const double msign = moment_value_at_log(c.moment, std::exp(s_a)) < 0 ? -1.0 : 1.0;

    // locate the end of the quadrature range and a scale for the integrand
    double s_b, Lmax = Lfun(s_a), Lend;
    if (cls.boundary) {
        s_b = std::max(s_a, std::log(opt.boundary_Y));
        for (double s = s_a; s < s_b; s += 0.25) Lmax = std::max(Lmax, Lfun(s));
        Lend = Lfun(s_b);
        Lmax = std::max(Lmax, Lend);
    } else {
        const double ds = 0.125;
        double s = s_a, prev = Lmax;
        for (int k = 1;; ++k) {
            s = s_a + k * ds;
            double L = Lfun(s);
            if (!(L > kNegInf)) break;
            Lmax = std::max(Lmax, L);
            if (L < Lmax - 90.0 && L < prev) break;
            if (s > 40.0) break;
            prev = L;
        }
        s_b = s;
        Lend = Lfun(s_b);
    }
    const double ref = Lmax;

    // crude bound on the integral; a tail far below the budget is only bounded
    const double est_log = Lmax + std::log(s_b - s_a + 1.0) + 1.0;
    const bool negligible = est_log < log_budget;
    const double qtol = std::clamp(std::exp(log_budget - est_log), 1e-14, 1e-6);

    double integral = 0, qerr = 0;
    if (negligible) {
        qerr = std::exp(est_log - ref);
    } else if (s_b > s_a) {
        auto f = [&](double s) {
            double L = Lfun(s);
            return L > kNegInf ? std::exp(L - ref) : 0.0;
        };
        // short panels: past the peak the integrand falls off double-exponentially
        const int panels = std::max(1, int(std::ceil((s_b - s_a) / 0.5)));
        double l1 = 0;
        for (int k = 0; k < panels; ++k) {
            double a = s_a + (s_b - s_a) * k / panels, b = s_a + (s_b - s_a) * (k + 1) / panels;
            double err = 0, pl1 = 0;
            integral += gauss_kronrod<double, 31>::integrate(f, a, b, 10, qtol, &err, &pl1);
            qerr += err;
            l1 += pl1;
        }
        qerr = qerr + 1e-16 * l1;
    }
    acc.add(ref, msign * integral);
    acc.add_uncertainty(ref, qerr);

    if (cls.boundary) {
        // exp(K - log e + (1-V)s) * (K_M + c1 e^s + c2 s) integrated over [s_b, inf)
        double K = cls.a.K, V = cls.a.V, KM = 0, c1 = 0, c2 = 0;
        bool lin = false;
        for (const auto& at : c.moment) {
            if (at.coef == 0.0) continue;
            switch (at.kind) {
            case LogAtom::Kind::Constant: KM += at.coef; break;
            case LogAtom::Kind::Log: c1 += at.coef; break;
            case LogAtom::Kind::LogLog: c2 += at.coef; break;
            case LogAtom::Kind::Linear:
                lin = true;
                K += std::log(std::abs(at.coef));
                KM = at.coef < 0 ? -1.0 : 1.0;
                break;
            }
        }
        if (c.moment.empty()) KM = 1.0;
        if (lin) c1 = c2 = 0;
        const double S = s_b;
        const double w = V - 1.0;
        double bracket = KM / w + c2 * (S / w + 1.0 / (w * w));
        if (c1 != 0.0) bracket += c1 * std::exp(S) / (V - 2.0);
        double lead = K - log_e + (1.0 - V) * S;
        acc.add(lead, bracket);
        acc.add_uncertainty(lead, 1e-15 * std::abs(bracket));
    } else if (Lend > kNegInf) {
        double h = 1e-3;
        double slope = (Lfun(s_b + h) - Lend) / h;
        double rem = slope < 0 ? 1.0 / -slope : 1.0;
        acc.add_uncertainty(Lend, rem);
    }

    // Euler-Maclaurin corrections at x0 and the remainder bound
    auto Fjet = [&](double x) {
        Jet3 g = eval_jet(c.term, x, e);
        Jet3 F = exp(g + (-ref));
        if (!c.moment.empty()) F = F * eval_jet(c.moment, x, e);
        return F;
    };
    Jet3 F0 = Fjet(x0);
    acc.add(ref, 0.5 * F0.v - F0.d1 / 12.0);

    double tv = 0, prev = F0.d3, peak = std::abs(F0.d3);
    const double dlx = 0.25;
    for (int k = 1; k <= 400; ++k) {
        double x = x0 * std::exp(k * dlx);
        double d3 = Fjet(x).d3;
        if (!std::isfinite(d3)) d3 = 0;
        tv += std::abs(d3 - prev);
        prev = d3;
        peak = std::max(peak, std::abs(d3));
        if (k >= 8 && std::abs(d3) * x <= 1e-6 * peak * x0) break;
    }
    tv += std::abs(prev);
    acc.add_uncertainty(ref, 2.0 * tv / 720.0 + 1e-16 * std::abs(F0.v));
    return acc;
}

struct SeriesTotal {
    Verdict verdict = Verdict::Convergent;
    ScaledSum sum;
    std::uint64_t terms = 0;
};

// direct_log[k] is the log term at m = k+1; direct_moment (optional) the
// matching factor.  The components cover everything past the direct block.
inline SeriesTotal sum_series(std::span<const double> direct_log, std::span<const double> direct_moment,
                              const std::vector<TailComponent>& comps, const SumOptions& opt = {}) {
    SeriesTotal out;
    std::vector<ComponentClass> cls;
    cls.reserve(comps.size());
    for (const auto& c : comps) {
        cls.push_back(classify_component(c, opt));
        if (cls.back().verdict == Verdict::Divergent) out.verdict = Verdict::Divergent;
        else if (cls.back().verdict == Verdict::DivergentAtBoundary && out.verdict == Verdict::Convergent)
            out.verdict = Verdict::DivergentAtBoundary;
    }
    if (out.verdict != Verdict::Convergent) return out;

    double ref = kNegInf;
    for (double l : direct_log) ref = std::max(ref, l);
    ScaledSum head;
    if (ref > kNegInf) {
        double s = 0, comp = 0;
        for (std::size_t k = 0; k < direct_log.size(); ++k) {
            double y = std::exp(direct_log[k] - ref);
            if (!direct_moment.empty()) y *= direct_moment[k];
            double t = s + y;
            comp += std::abs(s) >= std::abs(y) ? (s - t) + y : (y - t) + s;
            s = t;
        }
        head.add(ref, s + comp);
        head.add_uncertainty(ref, 4e-16 * std::abs(s) * std::log2(double(direct_log.size()) + 2.0));
    }
    out.sum.merge(head);
    out.terms = direct_log.size();
    double log_budget = kNegInf;
    if (opt.budget_rel > 0 && head.value() != 0)
        log_budget = head.log_scale() + std::log(std::abs(head.value()) * opt.budget_rel / double(comps.size()));
    for (std::size_t k = 0; k < comps.size(); ++k) {
        ScaledSum part = sum_component(comps[k], cls[k], opt, log_budget);
        out.sum.merge(part, comps[k].sign);
    }
    return out;
}

} // namespace mfspec::detail
