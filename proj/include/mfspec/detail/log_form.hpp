#pragma once

#include <cmath>
#include <vector>

#include "mfspec/detail/jet.hpp"

namespace mfspec::detail {

// One additive piece of the logarithm of a per-symbol weight, as a function
// of the symbol index m.
struct LogAtom {
    enum class Kind { Constant, Log, LogLog, Linear };
    Kind kind;
    double coef;
    double shift = 0.0; // Log: coef*log(m+shift); LogLog: coef*log(log(m+shift))
};

using LogForm = std::vector<LogAtom>;

inline LogForm scaled(const LogForm& f, double s) {
    LogForm out;
    out.reserve(f.size());
    for (auto a : f) {
        a.coef *= s;
        out.push_back(a);
    }
    return out;
}

inline LogForm concat(LogForm a, const LogForm& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

// Growth data of exp(form) at infinity: exp(K + rho*m) * m^-U * (log m)^-V.
struct Asymptotics {
    double rho = 0, U = 0, V = 0, K = 0;
    double log_mass = 0; // sum of |coef| over Log and LogLog atoms, used in crude derivative bounds
};

inline Asymptotics asymptotics(const LogForm& f) {
    Asymptotics a;
    for (const auto& at : f) {
        switch (at.kind) {
        case LogAtom::Kind::Constant: a.K += at.coef; break;
        case LogAtom::Kind::Log: a.U -= at.coef; a.log_mass += std::abs(at.coef); break;
        case LogAtom::Kind::LogLog: a.V -= at.coef; a.log_mass += std::abs(at.coef); break;
        case LogAtom::Kind::Linear: a.rho += at.coef; break;
        }
    }
    return a;
}

inline bool has_kind(const LogForm& f, LogAtom::Kind k) {
    for (const auto& a : f)
        if (a.kind == k && a.coef != 0.0) return true;
    return false;
}

// log(m + s) with Y = log m, stable for huge m
inline double log_shifted(double Y, double s) {
    if (s == 0.0) return Y;
    return Y + std::log1p(s * std::exp(-Y));
}

// Evaluate at m = exp(Y). Linear atoms need m itself, which may overflow for
// huge Y; they only appear in geometric families that are summed directly.
inline double eval_at_log(const LogForm& f, double Y) {
    double r = 0;
    for (const auto& a : f) {
        if (a.coef == 0.0) continue;
        switch (a.kind) {
        case LogAtom::Kind::Constant: r += a.coef; break;
        case LogAtom::Kind::Log: r += a.coef * log_shifted(Y, a.shift); break;
        case LogAtom::Kind::LogLog: r += a.coef * std::log(log_shifted(Y, a.shift)); break;
        case LogAtom::Kind::Linear: r += a.coef * std::exp(Y); break;
        }
    }
    return r;
}

inline double eval_at(const LogForm& f, double m) {
    double r = 0;
    for (const auto& a : f) {
        if (a.coef == 0.0) continue;
        switch (a.kind) {
        case LogAtom::Kind::Constant: r += a.coef; break;
        case LogAtom::Kind::Log: r += a.coef * std::log(m + a.shift); break;
        case LogAtom::Kind::LogLog: r += a.coef * std::log(std::log(m + a.shift)); break;
        case LogAtom::Kind::Linear: r += a.coef * m; break;
        }
    }
    return r;
}

// Jet in x of form(m) with m = x^power.
inline Jet3 eval_jet(const LogForm& f, double x, double power) {
    Jet3 Y = power * log_of_variable(x);
    Jet3 r;
    for (const auto& a : f) {
        if (a.coef == 0.0) continue;
        switch (a.kind) {
        case LogAtom::Kind::Constant: r = r + a.coef; break;
        case LogAtom::Kind::Log:
        case LogAtom::Kind::LogLog: {
            Jet3 L = Y;
            if (a.shift != 0.0) L = Y + log1p(a.shift * exp(-1.0 * Y));
            r = r + a.coef * (a.kind == LogAtom::Kind::Log ? L : log(L));
            break;
        }
        case LogAtom::Kind::Linear: r = r + a.coef * exp(Y); break;
        }
    }
    return r;
}

} // namespace mfspec::detail
