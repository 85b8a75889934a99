// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "common.hpp"

using namespace testing_support;

namespace {

// pinned tolerances
constexpr double kMaxFTol = 1e-9;
constexpr double kAlpha0Ref = 1.0068, kAlpha0Tol = 1e-2;
constexpr double kT0Tol = 1e-9;
constexpr double kPlateauTol = 1e-9;
constexpr double kLinearTol = 1e-9;
constexpr double kTruncTol = 1e-3;
constexpr double kLegendreTol = 1e-6;
constexpr double kSlopeRelTol = 1e-6;
constexpr double kSigmas = 3;
constexpr double kConvexTol = 1e-8;
constexpr int kCurvePoints = 512;
constexpr int kBruteGrid = 10000;

struct Check {
    bool ok = true;
    std::string detail;

    void require(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            detail += (detail.empty() ? "" : "; ") + what;
        }
    }
    void note(const std::string& what) { detail += (detail.empty() ? "" : "; ") + what; }
};

std::string num(double x, int digits = 10) {
    if (std::isinf(x)) return x > 0 ? "+inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, x);
    return buf;
}

const SpectrumModel& model(const std::string& name) {
    static std::map<std::string, std::unique_ptr<SpectrumModel>> cache;
    auto& m = cache[name];
    if (!m) m = std::make_unique<SpectrumModel>(preset_pair(name));
    return *m;
}

const SpectrumCurve& curve(const std::string& name) {
    static std::map<std::string, SpectrumCurve> cache;
    auto it = cache.find(name);
    if (it == cache.end()) it = cache.emplace(name, model(name).curve(kCurvePoints)).first;
    return it->second;
}

Check c1_boundary_line() {
    Check c;
    for (double q : {-2.0, 0.0, 1.0, 3.0}) {
        auto tt = t_tilde(shifted3(), q);
        c.require(tt.is_finite() && tt.value() == -1.5 * q + 0.5,
                  "t_tilde(" + num(q) + ") = " + to_string(tt) + " vs " + num(-1.5 * q + 0.5));
    }
    double ti = t_inf(shifted3());
    c.require(ti == 0.5, "t_inf = " + num(ti, 17));
    c.note("t_tilde = -1.5 q + 0.5 exactly at q = -2, 0, 1, 3; t_inf = 0.5");
    return c;
}

Check c2_zero_transitions() {
    Check c;
    auto Q = q_set(shifted3(), -50, 50);
    c.require(Q.kind == QSet::Kind::Empty, std::string("Q is ") + to_string(Q.kind));
    auto r = phase_transitions(curve("zero-transitions"));
    c.require(r.count == 0, "count " + std::to_string(r.count));
    c.require(curve("zero-transitions").points.size() == std::size_t(kCurvePoints), "curve size");
    c.require(r.concave_ok, "concavity fails");
    c.note("Q empty, 0 transitions, concave on " + std::to_string(kCurvePoints) + " points");
    return c;
}

Check c3_one_transition() {
    Check c;
    const auto& p = powerlog12();
    auto Q = q_set(p, -50, 50);
    c.require(Q.kind == QSet::Kind::RayUp, std::string("Q is ") + to_string(Q.kind));
    if (Q.q0) c.require(*Q.q0 > 1.15 && *Q.q0 < 3, "q0 = " + num(*Q.q0));
    const double q = 1.15, t = t_tilde(p, q).value();
    double s = 0;
    for (std::uint64_t j = 1; j <= 25; ++j) s += std::exp(q * log_weight(p.phi(), j) + t * log_weight(p.psi(), j));
    c.require(s > 1, "Z1 partial sum j<=25 at q=1.15 is " + num(s));

    const auto& cv = curve("one-transition");
    double fmax = -1, amax = 0;
    for (const auto& pt : cv.points)
        if (pt.f > fmax) fmax = pt.f, amax = pt.alpha;
    const double a0 = alpha_of_q(p, 0);
    c.require(std::abs(fmax - 1) <= kMaxFTol, "max f = " + num(fmax, 17));
    c.require(std::abs(amax - a0) <= 1e-12 * (1 + a0), "max attained at " + num(amax) + ", alpha(0) = " + num(a0));
    c.require(std::abs(a0 - kAlpha0Ref) <= kAlpha0Tol, "alpha(0) = " + num(a0) + " vs 1.0068");
    auto r = phase_transitions(cv);
    c.require(r.count == 1, "count " + std::to_string(r.count));
    c.note("q0 = " + (Q.q0 ? num(*Q.q0) : "?") + ", partial sum " + num(s, 6) + ", max f = " + num(fmax, 13) +
           " at alpha(0) = " + num(a0));
    return c;
}

Check c4_gauss_dimension() {
    Check c;
    std::vector<std::pair<std::string, PotentialPair>> pairs;
    for (const auto& p : presets()) pairs.emplace_back(p.name, PotentialPair(p.phi, p.psi));
    pairs.emplace_back("power_log(2.5, 0)", PotentialPair(phi(PowerLog{2.5, 0, 2, {}}), gauss()));
    pairs.emplace_back("geometric(0.3)", PotentialPair(phi(Geometric{0.3, {}}), gauss()));
    double worst = 0;
    for (const auto& [name, pair] : pairs) {
        double T = temperature(pair, 0).T.as_double();
        worst = std::max(worst, std::abs(T - 1));
        c.require(std::abs(T - 1) <= kT0Tol, name + ": T(0) = " + num(T, 17));
    }
    c.note(std::to_string(pairs.size()) + " pairs, max |T(0) - 1| = " + num(worst, 3));
    return c;
}

Check c5_minkowski() {
    Check c;
    const auto& p = minkowski();
    for (double q : {-10.0, -1.0, -1e-3})
        c.require(t_tilde(p, q).is_plus_infinity(), "t_tilde(" + num(q) + ") = " + to_string(t_tilde(p, q)));
    c.require(t_tilde(p, 0).is_finite() && t_tilde(p, 0).value() == 0.5, "t_tilde(0) = " + to_string(t_tilde(p, 0)));
    for (double q : {1e-3, 1.0, 10.0})
        c.require(t_tilde(p, q).is_minus_infinity(), "t_tilde(" + num(q) + ") = " + to_string(t_tilde(p, q)));
    auto Q = q_set(p, -50, 50);
    c.require(Q.kind == QSet::Kind::RayDown && Q.q1 && *Q.q1 == 0.0, std::string("Q is ") + to_string(Q.kind));
    c.require(temperature(p, -1e-9).T.is_plus_infinity() && temperature(p, 0).regime == Regime::AnalyticBranch,
              "Q should be open at 0");

    const auto& cv = curve("minkowski");
    const ExtendedReal a0 = model("minkowski").alpha_q1();
    int beyond = 0;
    for (const auto& pt : cv.points)
        if (a0.is_finite() && pt.alpha > a0.value()) {
            ++beyond;
            c.require(std::abs(pt.f - 1) <= kPlateauTol, "f(" + num(pt.alpha) + ") = " + num(pt.f, 17));
        }
    auto r = phase_transitions(cv);
    c.require(r.count == 1, "count " + std::to_string(r.count));
    if (r.count == 1) {
        const double loc = r.locations[0];
        c.require(a0.is_plus_infinity() ? std::isinf(loc) && loc > 0 : std::abs(loc - a0.value()) < 1e-9,
                  "transition at " + num(loc) + ", alpha(0) = " + to_string(a0));
    }
    c.note("alpha(0) = " + to_string(a0) + ", " + std::to_string(beyond) + " sampled alpha beyond it, " +
           std::to_string(r.count) + " transition(s)");
    return c;
}

Check c6_two_three() {
    Check c;
    for (const char* name : {"two-transitions", "three-transitions"}) {
        const auto& p = preset_pair(name);
        const auto& cv = curve(name);
        auto r = phase_transitions(cv);
        auto Q = q_set(p, -50, 50);
        if (Q.kind != QSet::Kind::ClosedInterval || !Q.q0 || !Q.q1) {
            c.require(false, std::string(name) + ": Q is " + to_string(Q.kind));
            continue;
        }
        const double q0 = *Q.q0, q1 = *Q.q1, alim = alpha_lim(p).value;
        // resolution: widest step of the alpha grid
        double res = 0;
        for (std::size_t k = 1; k < cv.points.size(); ++k)
            res = std::max(res, cv.points[k].alpha - cv.points[k - 1].alpha);
        // analytic-side limits straight from the Gibbs ratio just outside Q
        const double a_q1 = alpha_of_q(p, q1 + 1e-7);
        double a_q0 = std::numeric_limits<double>::quiet_NaN();
        try {
            a_q0 = alpha_of_q(p, q0 - 1e-7);
        } catch (const AlphaDiverges&) {
        }
        std::vector<double> expect;
        if (std::string(name) == "two-transitions") {
            expect = {a_q1, alim};
            c.require(!std::isfinite(a_q0) || std::abs(a_q0 - alim) <= res,
                      std::string(name) + ": alpha(q0) = " + num(a_q0) + " should equal alpha_lim");
        } else {
            expect = {a_q1, alim, a_q0};
        }
        c.require(r.count == int(expect.size()), std::string(name) + ": count " + std::to_string(r.count));
        for (std::size_t k = 0; k < expect.size() && k < r.locations.size(); ++k)
            c.require(std::abs(r.locations[k] - expect[k]) <= res,
                      std::string(name) + ": location " + num(r.locations[k]) + " vs " + num(expect[k]));
        int lin = 0;
        double worst = 0;
        for (const auto& pt : cv.points) {
            if (pt.branch != Branch::LinearSegment) continue;
            ++lin;
            const double qe = pt.q_star.value();
            const double T = temperature(p, qe).T.value();
            worst = std::max(worst, std::abs(pt.f - (T + qe * pt.alpha)));
        }
        c.require(lin > 0, std::string(name) + ": no linear points");
        c.require(worst <= kLinearTol, std::string(name) + ": linear residual " + num(worst, 3));
        std::string locs;
        for (double l : r.locations) locs += (locs.empty() ? "" : ", ") + num(l, 6);
        c.note(std::string(name) + ": " + std::to_string(r.count) + " at {" + locs + "} res " + num(res, 2) +
               ", linear residual " + num(worst, 2));
    }
    return c;
}

Check c7_infinite() {
    Check c;
    const auto& p = preset_pair("infinite-transitions");
    auto bp = t_tilde_breakpoints(p, -5, 5);
    std::string b;
    for (double x : bp) b += (b.empty() ? "" : ", ") + num(x, 15);
    c.require(bp.size() == 3, "breakpoints {" + b + "}");
    for (std::size_t k = 0; k < bp.size() && k < 3; ++k)
        c.require(std::abs(bp[k] - double(k + 1)) <= 1e-12, "breakpoint " + num(bp[k], 15));
    // slopes from t_tilde values alone, half a unit either side of each integer
    auto slope = [&](double a, double b2) { return (t_tilde(p, b2).value() - t_tilde(p, a).value()) / (b2 - a); };
    std::vector<double> segs = {slope(0.1, 0.9), slope(1.1, 1.9), slope(2.1, 2.9), slope(3.1, 3.9)};
    for (std::size_t k = 0; k + 1 < segs.size(); ++k) {
        c.require(segs[k + 1] > segs[k] + 1e-9, "slopes " + num(segs[k]) + " and " + num(segs[k + 1]) + " around " +
                                                    std::to_string(k + 1) + " do not differ");
        // straight on each side: the kink sits at the integer
        double m = double(k + 1);
        c.require(std::abs(slope(m - 0.5, m - 1e-6) - segs[k]) < 1e-9 &&
                      std::abs(slope(m + 1e-6, m + 0.5) - segs[k + 1]) < 1e-9,
                  "kink not at q = " + num(m));
    }
    std::string s;
    for (double x : segs) s += (s.empty() ? "" : ", ") + num(x, 6);
    c.note("breakpoints {" + b + "}, slopes {" + s + "}");
    return c;
}

struct QCase {
    const char* preset;
    double q;
};

const std::vector<QCase>& analytic_cases() {
    static const std::vector<QCase> v = {
        {"zero-transitions", 0.25}, {"zero-transitions", 3},   {"zero-transitions", 0},     {"zero-transitions", 0.5},
        {"zero-transitions", 1},    {"zero-transitions", 2},   {"one-transition", -1},      {"one-transition", 0},
        {"one-transition", 0.25},   {"one-transition", 0.5},   {"three-transitions", -1},   {"three-transitions", 0},
        {"three-transitions", 0.5}, {"three-transitions", 5},  {"minkowski", 0.5},          {"minkowski", 1},
        {"minkowski", 2},           {"infinite-transitions", -1}, {"infinite-transitions", 0}, {"infinite-transitions", 0.5},
    };
    return v;
}

Check c8_oracles() {
    Check c;
    // (a) truncations
    double worst_a = 0;
    for (const auto& [name, q] : analytic_cases()) {
        const auto& p = preset_pair(name);
        auto tr = temperature(p, q);
        if (tr.regime != Regime::AnalyticBranch) {
            c.require(false, std::string(name) + " q=" + num(q) + " is not analytic");
            continue;
        }
        double prev = -std::numeric_limits<double>::infinity(), Tn = 0;
        for (std::uint64_t n : {10u, 100u, 1000u, 10000u}) {
            Tn = oracle::truncated_temperature(p, q, n).T_n;
            c.require(Tn >= prev - 1e-13, std::string(name) + " q=" + num(q) + ": T_n drops at n=" + std::to_string(n));
            prev = Tn;
        }
        const double gap = std::abs(Tn - tr.T.value());
        worst_a = std::max(worst_a, gap);
        c.require(gap <= kTruncTol, std::string("(a) ") + name + " q=" + num(q) + ": |T_10000 - T| = " + num(gap, 3));
    }
    // (b) Legendre against a 10^4-point brute grid
    double worst_b = 0;
    int nb = 0;
    for (const char* name : {"one-transition", "three-transitions"}) {
        const auto& p = preset_pair(name);
        const auto& m = model(name);
        oracle::TSamples grid;
        for (const auto& r : temperature_rows(p, -50, 50, kBruteGrid, {})) grid.push_back({r.q, r.T_value});
        const double lo = m.alpha_min(), hi = std::isfinite(m.alpha_max()) ? m.alpha_max() : lo + 1;
        for (int k = 0; k < 64; ++k) {
            const double a = lo + (hi - lo) * (k + 0.5) / 64;
            const double f = m.legendre(a).f, b = oracle::brute_legendre(grid, a);
            const double slack = oracle::grid_slack(grid, a);
            worst_b = std::max(worst_b, std::abs(f - b) - slack);
            ++nb;
            c.require(std::abs(f - b) <= kLegendreTol + slack,
                      std::string("(b) ") + name + " alpha=" + num(a) + ": " + num(f, 15) + " vs " + num(b, 15));
        }
    }
    // (c) central differences
    double worst_c = 0;
    const double h = 1e-4;
    for (const auto& [name, q] : analytic_cases()) {
        const auto& p = preset_pair(name);
        double a;
        try {
            a = alpha_of_q(p, q);
        } catch (const AlphaDiverges&) {
            c.require(false, std::string("(c) ") + name + " q=" + num(q) + ": alpha diverges");
            continue;
        }
        const double d = -(temperature(p, q + h).T.value() - temperature(p, q - h).T.value()) / (2 * h);
        const double rel = std::abs(d - a) / std::abs(a);
        worst_c = std::max(worst_c, rel);
        c.require(rel <= kSlopeRelTol, std::string("(c) ") + name + " q=" + num(q) + ": rel " + num(rel, 3));
    }
    c.note("(a) 20 q, max gap " + num(worst_a, 3) + "; (b) " + std::to_string(nb) + " alpha, max excess " +
           num(worst_b, 3) + "; (c) max rel " + num(worst_c, 3));
    return c;
}

Check c9_sampling() {
    Check c;
    const auto& p = powerlog12();
    const std::uint64_t seed = 20240611;
    SamplingOptions single;
    single.threads = 1;
    auto e1 = sample_dimension(p, 0, 10000, 10000, seed);
    auto e2 = sample_dimension(p, 0, 10000, 10000, seed, {}, single);
    const double a0 = alpha_of_q(p, 0);
    const double z = (e1.mean - a0) / e1.std_error;
    c.require(std::abs(z) <= kSigmas, "mean " + num(e1.mean, 12) + " is " + num(z, 3) + " standard errors from alpha(0)");
    c.require(e1.mean == e2.mean && e1.std_error == e2.std_error, "rerun differs");
    c.note("mean " + num(e1.mean, 10) + " +- " + num(e1.std_error, 3) + ", alpha(0) = " + num(a0) + ", z = " +
           num(z, 3) + ", rerun bitwise equal");
    return c;
}

Check c10_convexity() {
    Check c;
    for (const auto& pr : presets()) {
        const auto& p = preset_pair(pr.name);
        std::vector<std::pair<double, double>> s;
        for (const auto& r : temperature_rows(p, -50, 50, kCurvePoints, {})) s.push_back({r.q, r.T_value});
        c.require(convex_ok(s, kConvexTol), pr.name + ": T not convex");
        c.require(concave_ok(curve(pr.name).points, kConvexTol), pr.name + ": f not concave");
    }
    c.note(std::to_string(presets().size()) + " presets, " + std::to_string(kCurvePoints) + "-point q and alpha grids");
    return c;
}

} // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Check()>>> criteria = {
        {"1 boundary line", c1_boundary_line},   {"2 zero transitions", c2_zero_transitions},
        {"3 one transition", c3_one_transition}, {"4 Gauss dimension T(0)=1", c4_gauss_dimension},
        {"5 Minkowski", c5_minkowski},           {"6 two/three transitions", c6_two_three},
        {"7 infinite transitions", c7_infinite}, {"8 oracle equivalence", c8_oracles},
        {"9 statistical cross-check", c9_sampling}, {"10 convexity/concavity", c10_convexity},
    };
    int failed = 0;
    for (const auto& [name, fn] : criteria) {
        auto t0 = std::chrono::steady_clock::now();
        Check c;
        try {
            c = fn();
        } catch (const std::exception& e) {
            c.ok = false;
            c.detail = std::string("exception: ") + e.what();
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("%s criterion %s: %s [%.1fs]\n", c.ok ? "PASS" : "FAIL", name, c.detail.c_str(), secs);
        std::fflush(stdout);
        failed += !c.ok;
    }
    std::printf("%d of %zu criteria passed\n", int(criteria.size()) - failed, criteria.size());
    return failed ? 1 : 0;
}
