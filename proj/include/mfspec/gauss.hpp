#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <thread>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include "mfspec/temperature.hpp"

namespace mfspec {

using boost::multiprecision::cpp_int;
using boost::multiprecision::cpp_rational;

struct DigitSequence {
    std::vector<std::uint64_t> digits;

    std::size_t size() const { return digits.size(); }
    bool operator==(const DigitSequence&) const = default;
};

inline double gauss_step(double x) {
    if (!(x > 0 && x < 1)) throw DomainError("gauss_step needs 0 < x < 1");
    double y = 1.0 / x;
    return y - std::floor(y);
}

// First n continued-fraction digits of the exact value of the double x.
inline DigitSequence encode(double x, std::size_t n) {
    if (!(x > 0 && x < 1)) throw DomainError("encode needs 0 < x < 1");
    DigitSequence d;
    cpp_rational r(x);
    while (d.size() < n) {
        if (r == 0) throw ShortExpansion("rational input: expansion ends early", d.digits);
        cpp_rational inv = 1 / r;
        cpp_int a = numerator(inv) / denominator(inv);
        if (a > std::numeric_limits<std::uint64_t>::max()) throw DomainError("digit exceeds 64 bits");
        d.digits.push_back(a.convert_to<std::uint64_t>());
        r = inv - cpp_rational(a);
    }
    return d;
}

namespace detail {

struct Continuants {
    cpp_int p, q, p_prev, q_prev;
};

inline Continuants continuants(const DigitSequence& d) {
    Continuants c{0, 1, 1, 0};
    for (auto a : d.digits) {
        if (a == 0) throw DomainError("digits must be at least 1");
        cpp_int p = cpp_int(a) * c.p + c.p_prev, q = cpp_int(a) * c.q + c.q_prev;
        c.p_prev = c.p;
        c.q_prev = c.q;
        c.p = p;
        c.q = q;
    }
    return c;
}

inline double log_of(const cpp_int& x) {
    if (x <= 0) throw DomainError("log of a non-positive integer");
    std::size_t bits = msb(x);
    if (bits < 900) return std::log(x.convert_to<double>());
    std::size_t shift = bits - 60;
    return std::log(cpp_int(x >> shift).convert_to<double>()) + double(shift) * std::log(2.0);
}

inline double log_of(const cpp_rational& x) { return log_of(numerator(x)) - log_of(denominator(x)); }

} // namespace detail

inline cpp_rational decode_exact(const DigitSequence& d) {
    auto c = detail::continuants(d);
    return cpp_rational(c.p, c.q);
}

inline double decode(const DigitSequence& d) { return decode_exact(d).convert_to<double>(); }

struct CylinderInterval {
    cpp_rational lo, hi;
    double log_length = 0;
};

// Points whose expansion starts with d: between p_n/q_n and
// (p_n + p_{n-1})/(q_n + q_{n-1}).
inline CylinderInterval cylinder_interval(const DigitSequence& d) {
    if (d.digits.empty()) throw DomainError("empty digit sequence");
    auto c = detail::continuants(d);
    cpp_rational a(c.p, c.q), b(c.p + c.p_prev, c.q + c.q_prev);
    CylinderInterval out;
    out.lo = a < b ? a : b;
    out.hi = a < b ? b : a;
    out.log_length = -detail::log_of(c.q) - detail::log_of(cpp_int(c.q + c.q_prev));
    return out;
}

// -log|(G^n)'(z)| at z = decode(d) by the chain rule: G'(y) = -1/y^2.
inline double cylinder_log_diameter(const DigitSequence& d) {
    if (d.digits.empty()) throw DomainError("empty digit sequence");
    double s = 0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        DigitSequence tail{{d.digits.begin() + std::ptrdiff_t(i), d.digits.end()}};
        s += 2 * detail::log_of(decode_exact(tail));
    }
    return s;
}

struct DimensionEstimate {
    double mean = 0;
    double std_error = 0;
    std::uint64_t samples = 0;
    std::uint64_t digits_per_sample = 0;
};

struct SamplingOptions {
    std::uint64_t table_size = std::uint64_t(1) << 20;
    double cutoff = 1e-12;     // mass left out at the far end
    unsigned threads = 0;      // 0: hardware concurrency
    std::uint64_t chunk = 64;  // samples per sub-seed
};

namespace detail {

// Inverse-CDF sampler for the first-digit law w_i = p_i^q s_i^t / Z.  The
// first table_size symbols are tabulated; the rest follow the continuous
// density in Y = log i of the leading symbol class.
class DigitSampler {
public:
    DigitSampler(const PotentialPair& pair, double q, double t, const Tolerances& tol, const SamplingOptions& opt)
        : q_(q), t_(t), cutoff_(opt.cutoff) {
        auto z = pair_sum(pair, q, t, Moment::None, tol.rel_tol);
        if (z.verdict != Verdict::Convergent) throw NoGibbsState("partition function diverges");
        log_z_ = z.log_abs();

        const std::uint64_t N = opt.table_size;
        lp_.resize(N);
        ls_.resize(N);
        cdf_.resize(N);
        double acc = 0;
        for (std::uint64_t i = 1; i <= N; ++i) {
            lp_[i - 1] = i <= pair.direct_terms() ? pair.log_phi()[i - 1] : log_weight(pair.phi(), i);
            ls_[i - 1] = i <= pair.direct_terms() ? pair.log_psi()[i - 1] : log_weight(pair.psi(), i);
            acc += std::exp(q * lp_[i - 1] + t * ls_[i - 1] - log_z_);
            cdf_[i - 1] = acc;
        }
        auto tail = sum_series({}, {}, tail_components(pair.phi_classes(), q, pair.psi_form(), t, N, Moment::None));
        tail_mass_ = tail.sum.value() * std::exp(tail.sum.log_scale() - log_z_);
        total_ = acc + tail_mass_;

        guide_.resize(N);
        std::uint64_t i = 0;
        for (std::uint64_t k = 0; k < N; ++k) {
            double u = total_ * double(k) / double(N);
            while (i + 1 < N && cdf_[i] <= u) ++i;
            guide_[k] = std::uint32_t(i);
        }

        phi_form_ = pair.phi_classes().front().form;
        psi_form_ = pair.psi_form();
        build_tail(std::log(double(N) + 0.5));
    }

    // (log p, log s) of one draw
    std::pair<double, double> draw(std::mt19937_64& rng) const {
        for (;;) {
            double u = double(rng() >> 11) * 0x1.0p-53 * total_;
            if (u >= total_ * (1 - cutoff_)) continue;
            const std::uint64_t N = cdf_.size();
            if (u < cdf_.back()) {
                std::uint64_t i = guide_[std::min<std::uint64_t>(N - 1, std::uint64_t(u / total_ * double(N)))];
                while (cdf_[i] <= u) ++i;
                return {lp_[i], ls_[i]};
            }
            double Y = tail_quantile((u - cdf_.back()) / tail_mass_);
            if (!std::isfinite(Y)) continue;
            return {eval_at_log(phi_form_, Y), eval_at_log(psi_form_, Y)};
        }
    }

private:
    double density(double Y) const {
        return std::exp(q_ * eval_at_log(phi_form_, Y) + t_ * eval_at_log(psi_form_, Y) + Y - log_z_);
    }

    double cell_mass(double a, double b) const {
        return boost::math::quadrature::gauss_kronrod<double, 15>::integrate([&](double y) { return density(y); },
                                                                             a, b, 0, 1e-10);
    }

    void build_tail(double Y0) {
        ty_.push_back(Y0);
        tc_.push_back(0);
        double Y = Y0, cum = 0, first = 0;
        for (int k = 0; k < 4000; ++k) {
            double Yn = Y * 1.02 + 0.05;
            double m = cell_mass(Y, Yn);
            cum += m;
            if (k == 0) first = m;
            ty_.push_back(Yn);
            tc_.push_back(cum);
            Y = Yn;
            if (m < 1e-6 * cutoff_ * std::max(cum, first) && density(Y) * Y < 1e-6 * cutoff_ * cum) break;
        }
    }

    // Y with continuous tail mass beyond Y0 equal to v times the total
    double tail_quantile(double v) const {
        double target = v * tc_.back();
        auto it = std::upper_bound(tc_.begin(), tc_.end(), target);
        if (it == tc_.end()) return std::numeric_limits<double>::infinity();
        std::size_t k = std::size_t(it - tc_.begin());
        double a = ty_[k - 1], b = ty_[k], base = tc_[k - 1];
        for (int it2 = 0; it2 < 60 && b - a > 1e-12 * b; ++it2) {
            double mid = 0.5 * (a + b);
            (base + cell_mass(ty_[k - 1], mid) < target ? a : b) = mid;
        }
        return 0.5 * (a + b);
    }

    double q_, t_, cutoff_, log_z_ = 0, tail_mass_ = 0, total_ = 0;
    std::vector<double> lp_, ls_, cdf_;
    std::vector<std::uint32_t> guide_;
    LogForm phi_form_, psi_form_;
    std::vector<double> ty_, tc_;
};

} // namespace detail

// Birkhoff ratio sum log p / sum log s over i.i.d. digit strings drawn from
// the Gibbs state at (q, T(q)).  Chunks of samples are seeded from
// (seed, chunk index) and merged in order, so the result does not depend on
// the thread count.
inline DimensionEstimate sample_dimension(const PotentialPair& pair, double q, std::uint64_t samples,
                                          std::uint64_t digits, std::uint64_t seed, const Tolerances& tol = {},
                                          const SamplingOptions& opt = {}) {
    if (samples < 2 || digits < 1) throw DomainError("need at least two samples of one digit");
    auto tr = temperature(pair, q, tol);
    if (tr.regime == Regime::Frozen) throw NoGibbsState("q lies in the frozen set");
    if (!tr.weights_finite || !tr.T.is_finite()) throw NoGibbsState("Gibbs moments diverge; cannot sample");
    detail::DigitSampler sampler(pair, q, tr.T.value(), tol, opt);

    const std::uint64_t chunks = (samples + opt.chunk - 1) / opt.chunk;
    struct Acc {
        double n = 0, mean = 0, m2 = 0;
    };
    std::vector<Acc> acc(chunks);
    std::atomic<std::uint64_t> next{0};
    auto work = [&]() {
        for (std::uint64_t c; (c = next.fetch_add(1)) < chunks;) {
            std::seed_seq ss{std::uint32_t(seed), std::uint32_t(seed >> 32), std::uint32_t(c), std::uint32_t(c >> 32)};
            std::mt19937_64 rng(ss);
            Acc a;
            const std::uint64_t lo = c * opt.chunk, hi = std::min(samples, lo + opt.chunk);
            for (std::uint64_t s = lo; s < hi; ++s) {
                double sp = 0, ss2 = 0;
                for (std::uint64_t k = 0; k < digits; ++k) {
                    auto [lp, ls] = sampler.draw(rng);
                    sp += lp;
                    ss2 += ls;
                }
                double x = sp / ss2;
                a.n += 1;
                double d = x - a.mean;
                a.mean += d / a.n;
                a.m2 += d * (x - a.mean);
            }
            acc[c] = a;
        }
    };
    unsigned nt = opt.threads ? opt.threads : std::max(1u, std::thread::hardware_concurrency());
    nt = unsigned(std::min<std::uint64_t>(nt, chunks));
    std::vector<std::thread> pool;
    for (unsigned k = 1; k < nt; ++k) pool.emplace_back(work);
    work();
    for (auto& th : pool) th.join();

    Acc tot;
    for (const auto& a : acc) {
        if (a.n == 0) continue;
        double n = tot.n + a.n, d = a.mean - tot.mean;
        tot.mean += d * a.n / n;
        tot.m2 += a.m2 + d * d * tot.n * a.n / n;
        tot.n = n;
    }
    DimensionEstimate e;
    e.mean = tot.mean;
    e.std_error = std::sqrt(tot.m2 / (tot.n - 1) / tot.n);
    e.samples = samples;
    e.digits_per_sample = digits;
    return e;
}

} // namespace mfspec
