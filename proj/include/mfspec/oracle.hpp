#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "mfspec/potentials.hpp"

// Brute-force references: finite-alphabet temperatures and grid Legendre
// minima.  Nothing here goes through the series or root code of the
// pressure and temperature modules.
namespace mfspec::oracle {

struct TruncatedResult {
    std::uint64_t n = 0;
    double T_n = 0;
};

// Root of sum_{i<=n} p_i^q s_i^t = 1 by bisection on the exact finite sum.
inline TruncatedResult truncated_temperature(const PotentialPair& pair, double q, std::uint64_t n) {
    if (n < 2) throw DomainError("truncation needs at least two symbols");
    std::vector<double> lp(n), ls(n);
    for (std::uint64_t i = 1; i <= n; ++i) {
        lp[i - 1] = log_weight(pair.phi(), i);
        ls[i - 1] = log_weight(pair.psi(), i);
    }
    auto F = [&](double t) {
        double m = -std::numeric_limits<double>::infinity();
        for (std::uint64_t k = 0; k < n; ++k) m = std::max(m, q * lp[k] + t * ls[k]);
        double s = 0;
        for (std::uint64_t k = 0; k < n; ++k) s += std::exp(q * lp[k] + t * ls[k] - m);
        return m + std::log(s);
    };
    // F decreases in t and runs from +inf to -inf
    double lo = -1, hi = 1;
    while (F(lo) <= 0) lo = 2 * lo - 1;
    while (F(hi) > 0) hi = 2 * hi + 1;
    while (hi - lo > 1e-14 * std::max(1.0, std::abs(lo))) {
        double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        (F(mid) > 0 ? lo : hi) = mid;
    }
    return {n, 0.5 * (lo + hi)};
}

// (q, T) samples on a uniform grid; infinite T is skipped.
using TSamples = std::vector<std::pair<double, double>>;

inline double brute_legendre(const TSamples& s, double alpha) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& [q, T] : s)
        if (std::isfinite(T)) best = std::min(best, T + q * alpha);
    return best;
}

// Upper bound on brute_legendre minus the true infimum over the grid span.
// With g(q) = T(q) + q alpha convex, g can dip below its grid minimum by at
// most one spacing times the chord slopes bracketing the minimiser.
inline double grid_slack(const TSamples& s, double alpha) {
    std::size_t arg = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < s.size(); ++k) {
        if (!std::isfinite(s[k].second)) continue;
        double g = s[k].second + s[k].first * alpha;
        if (g < best) {
            best = g;
            arg = k;
        }
    }
    auto chord = [&](std::size_t a, std::size_t b) {
        if (!std::isfinite(s[a].second) || !std::isfinite(s[b].second)) return 0.0;
        return (s[b].second - s[a].second) / (s[b].first - s[a].first) + alpha;
    };
    double slack = 0;
    if (arg > 0) slack = std::max(slack, std::abs(chord(arg - 1, arg)) * (s[arg].first - s[arg - 1].first));
    if (arg + 1 < s.size()) slack = std::max(slack, std::abs(chord(arg, arg + 1)) * (s[arg + 1].first - s[arg].first));
    return slack;
}

} // namespace mfspec::oracle
