#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "mfspec/detail/log_form.hpp"
#include "mfspec/detail/summation.hpp"
#include "mfspec/errors.hpp"

namespace mfspec {

// p_i = C / (i^a (log(i + c))^b)
struct PowerLog {
    double a = 1, b = 0, c = 2;
    std::optional<double> scale;
};

// p_i = C / (i + 1)^a
struct ShiftedPower {
    double a = 2;
    std::optional<double> scale;
};

// p_i = C r^i
struct Geometric {
    double r = 0.5;
    std::optional<double> scale;
};

// s_i = 6 / (pi^2 i^2), the first-digit approximation of the Gauss map metric
struct GaussMetric {};

// Symbols are split by perfect powers: class k >= 1 holds the perfect
// (k-th prime)-th powers that are not powers of a later configured prime,
// class 0 everything else (1 included).  Class k carries
// p_m = scale * C_k / (m^l_k (log(m + 2))^M_k).
struct PartitionClass {
    double l = 1, M = 2, C = 1;
};

struct PiecewisePartition {
    std::vector<PartitionClass> classes;
    std::optional<double> scale;
};

// PowerLog with the single weight at symbol k replaced by
// C_k / (k^a (log(k + c))^b); the base scale absorbs the change.
struct SpikedPowerLog {
    PowerLog base;
    std::uint64_t k = 2;
    double C_k = 1;
};

using Family = std::variant<PowerLog, ShiftedPower, Geometric, GaussMetric, PiecewisePartition, SpikedPowerLog>;

enum class Role { NegativePotential, PositiveMetric };

struct SymbolPotential {
    Family family;
    Role role = Role::NegativePotential;
};

inline std::string family_name(const Family& f) {
    static const char* names[] = {"power_log", "shifted_power", "geometric", "gauss_metric",
                                  "piecewise_partition", "spiked_power_log"};
    return names[f.index()];
}

namespace detail {

inline std::uint64_t nth_prime(std::size_t n) {
    static const std::uint64_t primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
    if (n == 0 || n > std::size(primes)) throw DomainError("partition supports at most 12 power classes");
    return primes[n - 1];
}

// x^e, or 0 on overflow of 64 bits
inline std::uint64_t checked_pow(std::uint64_t x, std::uint64_t e) {
    unsigned __int128 r = 1;
    for (std::uint64_t k = 0; k < e; ++k) {
        r *= x;
        if (r > std::numeric_limits<std::uint64_t>::max()) return 0;
    }
    return std::uint64_t(r);
}

// largest j with j^e <= n
inline std::uint64_t iroot(std::uint64_t n, std::uint64_t e) {
    if (e == 1 || n <= 1) return n;
    auto j = std::uint64_t(std::pow(double(n), 1.0 / double(e)));
    while (j > 1) {
        auto p = checked_pow(j, e);
        if (p != 0 && p <= n) break;
        --j;
    }
    for (;;) {
        auto p = checked_pow(j + 1, e);
        if (p == 0 || p > n) break;
        ++j;
    }
    return j;
}

inline bool is_perfect_power(std::uint64_t m, std::uint64_t e) {
    if (m < 2) return false;
    return checked_pow(iroot(m, e), e) == m;
}

inline double require_scale(const std::optional<double>& s) {
    if (!s) throw DomainError("potential scale not set; normalize first");
    return *s;
}

inline LogForm power_log_form(double logC, double a, double b, double c) {
    return {{LogAtom::Kind::Constant, logC}, {LogAtom::Kind::Log, -a, 0.0}, {LogAtom::Kind::LogLog, -b, c}};
}

// A class of symbols (see PiecewisePartition) and the log weight on it.
// prime == 1 marks the complement class.
struct SymbolClass {
    std::uint64_t prime = 1;
    LogForm form;
};

inline std::size_t partition_class_of(const PiecewisePartition& p, std::uint64_t m) {
    for (std::size_t k = p.classes.size(); k-- > 1;)
        if (is_perfect_power(m, nth_prime(k))) return k;
    return 0;
}

} // namespace detail

inline double log_weight(const SymbolPotential& pot, std::uint64_t i) {
    if (i == 0) throw DomainError("symbol index must be >= 1");
    const double x = double(i);
    return std::visit(
        [&](const auto& f) -> double {
            using F = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<F, PowerLog>) {
                return std::log(detail::require_scale(f.scale)) - f.a * std::log(x) -
                       (f.b == 0 ? 0.0 : f.b * std::log(std::log(x + f.c)));
            } else if constexpr (std::is_same_v<F, ShiftedPower>) {
                return std::log(detail::require_scale(f.scale)) - f.a * std::log(x + 1);
            } else if constexpr (std::is_same_v<F, Geometric>) {
                return std::log(detail::require_scale(f.scale)) + x * std::log(f.r);
            } else if constexpr (std::is_same_v<F, GaussMetric>) {
                return std::log(6.0 / (std::numbers::pi * std::numbers::pi)) - 2.0 * std::log(x);
            } else if constexpr (std::is_same_v<F, PiecewisePartition>) {
                const auto& c = f.classes[detail::partition_class_of(f, i)];
                return std::log(detail::require_scale(f.scale) * c.C) - c.l * std::log(x) -
                       c.M * std::log(std::log(x + 2));
            } else {
                const auto& b = f.base;
                double C = i == f.k ? f.C_k : detail::require_scale(b.scale);
                return std::log(C) - b.a * std::log(x) - (b.b == 0 ? 0.0 : b.b * std::log(std::log(x + b.c)));
            }
        },
        pot.family);
}

namespace detail {

// Symbol classes with their generic log weight (valid past the spike).
inline std::vector<SymbolClass> symbol_classes(const SymbolPotential& pot) {
    return std::visit(
        [&](const auto& f) -> std::vector<SymbolClass> {
            using F = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<F, PowerLog>) {
                return {{1, power_log_form(std::log(require_scale(f.scale)), f.a, f.b, f.c)}};
            } else if constexpr (std::is_same_v<F, ShiftedPower>) {
                return {{1, {{LogAtom::Kind::Constant, std::log(require_scale(f.scale))},
                             {LogAtom::Kind::Log, -f.a, 1.0}}}};
            } else if constexpr (std::is_same_v<F, Geometric>) {
                return {{1, {{LogAtom::Kind::Constant, std::log(require_scale(f.scale))},
                             {LogAtom::Kind::Linear, std::log(f.r)}}}};
            } else if constexpr (std::is_same_v<F, GaussMetric>) {
                return {{1, {{LogAtom::Kind::Constant, std::log(6.0 / (std::numbers::pi * std::numbers::pi))},
                             {LogAtom::Kind::Log, -2.0, 0.0}}}};
            } else if constexpr (std::is_same_v<F, PiecewisePartition>) {
                std::vector<SymbolClass> out;
                double s = require_scale(f.scale);
                for (std::size_t k = 0; k < f.classes.size(); ++k) {
                    const auto& c = f.classes[k];
                    out.push_back({k == 0 ? 1 : nth_prime(k), power_log_form(std::log(s * c.C), c.l, c.M, 2.0)});
                }
                return out;
            } else {
                const auto& b = f.base;
                return {{1, power_log_form(std::log(require_scale(b.scale)), b.a, b.b, b.c)}};
            }
        },
        pot.family);
}

enum class Moment { None, Phi, Psi };

// Inclusion-exclusion decomposition of the tail m > N of
// sum p_m^q s_m^t (times log p_m or log s_m for moments).
inline std::vector<TailComponent> tail_components(const std::vector<SymbolClass>& phi, double q,
                                                  const LogForm& psi, double t, std::uint64_t N,
                                                  Moment moment) {
    std::vector<TailComponent> out;
    const LogForm psi_t = scaled(psi, t);
    for (std::size_t k = 0; k < phi.size(); ++k) {
        LogForm term = concat(scaled(phi[k].form, q), psi_t);
        LogForm mom = moment == Moment::Phi ? phi[k].form : moment == Moment::Psi ? psi : LogForm{};
        // primes of later classes are subtracted out
        std::vector<std::uint64_t> later;
        for (std::size_t j = (k == 0 ? 1 : k + 1); j < phi.size(); ++j) later.push_back(phi[j].prime);
        const std::size_t subsets = std::size_t(1) << later.size();
        for (std::size_t mask = 0; mask < subsets; ++mask) {
            std::uint64_t e = phi[k].prime;
            int sign = 1;
            for (std::size_t b = 0; b < later.size(); ++b)
                if (mask >> b & 1u) {
                    e *= later[b];
                    sign = -sign;
                }
            out.push_back({sign, e, iroot(N, e), term, mom});
        }
    }
    return out;
}

inline constexpr std::uint64_t kDirectTerms = 4096;

inline SeriesTotal sum_weights(const SymbolPotential& pot) {
    std::vector<double> head(kDirectTerms);
    for (std::uint64_t i = 1; i <= kDirectTerms; ++i) head[i - 1] = log_weight(pot, i);
    auto comps = tail_components(symbol_classes(pot), 1.0, {}, 0.0, kDirectTerms, Moment::None);
    return sum_series(head, {}, comps);
}

template <class F>
F with_scale(F f, double s) {
    if constexpr (std::is_same_v<F, SpikedPowerLog>)
        f.base.scale = s;
    else if constexpr (!std::is_same_v<F, GaussMetric>)
        f.scale = s;
    return f;
}

} // namespace detail

// Sets the scale so that the weights sum to one.
inline SymbolPotential normalize(SymbolPotential pot) {
    pot.family = std::visit(
        [&](auto f) -> Family {
            using F = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<F, GaussMetric>) {
                return f;
            } else if constexpr (std::is_same_v<F, Geometric>) {
                if (!(f.r > 0 && f.r < 1)) throw NotNormalizable("geometric ratio must lie in (0,1)");
                return detail::with_scale(f, (1 - f.r) / f.r);
            } else if constexpr (std::is_same_v<F, SpikedPowerLog>) {
                if (f.k == 0 || f.k > 1024) throw DomainError("spiked symbol must lie in [1, 1024]");
                auto base = detail::with_scale(f.base, 1.0);
                auto tot = detail::sum_weights({base, pot.role});
                if (tot.verdict != Verdict::Convergent) throw NotNormalizable("base family is not summable");
                double S = tot.sum.value() * std::exp(tot.sum.log_scale());
                double bk = std::exp(log_weight({base, pot.role}, f.k));
                double wk = f.C_k * bk;
                double C = (1 - wk) / (S - bk);
                if (!(wk < 1) || !(C > 0)) throw NotNormalizable("spike weight leaves no mass for the base");
                return detail::with_scale(f, C);
            } else {
                auto unit = detail::with_scale(f, 1.0);
                auto tot = detail::sum_weights({unit, pot.role});
                if (tot.verdict != Verdict::Convergent) throw NotNormalizable("weights are not summable");
                return detail::with_scale(f, std::exp(-tot.sum.log_scale()) / tot.sum.value());
            }
        },
        pot.family);
    return pot;
}

struct AlphaLim {
    enum class Kind { Finite, PlusInfinity, DoesNotExist };
    Kind kind = Kind::Finite;
    double value = 0;

    bool finite() const { return kind == Kind::Finite; }
};

inline std::string to_string(const AlphaLim& a) {
    if (a.kind == AlphaLim::Kind::PlusInfinity) return "+inf";
    if (a.kind == AlphaLim::Kind::DoesNotExist) return "n/a";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", a.value);
    return buf;
}

class PotentialPair {
public:
    PotentialPair(SymbolPotential phi, SymbolPotential psi, std::uint64_t direct_terms = detail::kDirectTerms)
        : phi_(std::move(phi)), psi_(std::move(psi)), N_(direct_terms) {
        if (phi_.role != Role::NegativePotential) throw DomainError("phi must carry the NegativePotential role");
        if (psi_.role != Role::PositiveMetric) throw DomainError("psi must carry the PositiveMetric role");
        if (std::holds_alternative<PiecewisePartition>(psi_.family) ||
            std::holds_alternative<SpikedPowerLog>(psi_.family))
            throw DomainError("psi must be a single-class family");
        if (std::holds_alternative<GaussMetric>(phi_.family))
            throw DomainError("gauss_metric is a psi-role family");
        if (auto* s = std::get_if<SpikedPowerLog>(&phi_.family); s && s->k > N_)
            throw DomainError("spiked symbol lies beyond the direct block");
        if (auto* p = std::get_if<PiecewisePartition>(&phi_.family); p && p->classes.empty())
            throw DomainError("partition needs at least one class");

        phi_classes_ = detail::symbol_classes(phi_);
        psi_form_ = detail::symbol_classes(psi_).front().form;
        log_phi_.resize(N_);
        log_psi_.resize(N_);
        for (std::uint64_t i = 1; i <= N_; ++i) {
            log_phi_[i - 1] = log_weight(phi_, i);
            log_psi_[i - 1] = log_weight(psi_, i);
            if (!(log_phi_[i - 1] < 0) || !(log_psi_[i - 1] < 0))
                throw DomainError("weights must lie in (0,1); failed at symbol " + std::to_string(i));
        }
        for (const auto& c : phi_classes_) {
            auto a = detail::asymptotics(c.form);
            if (!(a.rho < 0 || a.U > 0)) throw DomainError("phi weights must decay");
        }
        auto a = detail::asymptotics(psi_form_);
        if (!(a.rho < 0 || a.U > 0)) throw DomainError("psi weights must decay");
    }

    const SymbolPotential& phi() const { return phi_; }
    const SymbolPotential& psi() const { return psi_; }
    std::uint64_t direct_terms() const { return N_; }
    const std::vector<double>& log_phi() const { return log_phi_; }
    const std::vector<double>& log_psi() const { return log_psi_; }
    const std::vector<detail::SymbolClass>& phi_classes() const { return phi_classes_; }
    const detail::LogForm& psi_form() const { return psi_form_; }

    bool phi_is_partition() const { return std::holds_alternative<PiecewisePartition>(phi_.family); }

private:
    SymbolPotential phi_, psi_;
    std::uint64_t N_;
    std::vector<detail::SymbolClass> phi_classes_;
    detail::LogForm psi_form_;
    std::vector<double> log_phi_, log_psi_;
};

inline AlphaLim alpha_lim(const PotentialPair& pair) {
    auto ps = detail::asymptotics(pair.psi_form());
    std::vector<double> ratios;
    bool phi_geometric = false;
    for (const auto& c : pair.phi_classes()) {
        auto a = detail::asymptotics(c.form);
        if (a.rho < 0) {
            phi_geometric = true;
            if (ps.rho < 0) ratios.push_back(a.rho / ps.rho);
        } else {
            ratios.push_back(ps.rho < 0 ? 0.0 : a.U / ps.U);
        }
    }
    if (phi_geometric && ps.rho == 0) return {AlphaLim::Kind::PlusInfinity, 0};
    for (double r : ratios)
        if (std::abs(r - ratios.front()) > 1e-15 * std::abs(ratios.front())) return {AlphaLim::Kind::DoesNotExist, 0};
    return {AlphaLim::Kind::Finite, ratios.front()};
}

} // namespace mfspec
