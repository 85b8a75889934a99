#pragma once

#include <cmath>

namespace mfspec::detail {

// Value and first three derivatives with respect to one variable.
struct Jet3 {
    double v = 0, d1 = 0, d2 = 0, d3 = 0;

    static Jet3 constant(double c) { return {c, 0, 0, 0}; }
};

inline Jet3 operator+(const Jet3& a, const Jet3& b) { return {a.v + b.v, a.d1 + b.d1, a.d2 + b.d2, a.d3 + b.d3}; }
inline Jet3 operator-(const Jet3& a, const Jet3& b) { return {a.v - b.v, a.d1 - b.d1, a.d2 - b.d2, a.d3 - b.d3}; }
inline Jet3 operator*(double s, const Jet3& a) { return {s * a.v, s * a.d1, s * a.d2, s * a.d3}; }
inline Jet3 operator+(const Jet3& a, double c) { return {a.v + c, a.d1, a.d2, a.d3}; }

inline Jet3 operator*(const Jet3& f, const Jet3& g) {
    return {f.v * g.v,
            f.d1 * g.v + f.v * g.d1,
            f.d2 * g.v + 2 * f.d1 * g.d1 + f.v * g.d2,
            f.d3 * g.v + 3 * f.d2 * g.d1 + 3 * f.d1 * g.d2 + f.v * g.d3};
}

// chain rule for h(f) given h, h', h'', h''' at f.v
inline Jet3 compose(const Jet3& f, double h0, double h1, double h2, double h3) {
    return {h0,
            h1 * f.d1,
            h2 * f.d1 * f.d1 + h1 * f.d2,
            h3 * f.d1 * f.d1 * f.d1 + 3 * h2 * f.d1 * f.d2 + h1 * f.d3};
}

inline Jet3 exp(const Jet3& f) {
    double e = std::exp(f.v);
    return compose(f, e, e, e, e);
}

inline Jet3 log(const Jet3& f) {
    double r = 1.0 / f.v;
    return compose(f, std::log(f.v), r, -r * r, 2 * r * r * r);
}

inline Jet3 log1p(const Jet3& f) {
    double r = 1.0 / (1.0 + f.v);
    return compose(f, std::log1p(f.v), r, -r * r, 2 * r * r * r);
}

// y = log x as a jet in x
inline Jet3 log_of_variable(double x) {
    double r = 1.0 / x;
    return {std::log(x), r, -r * r, 2 * r * r * r};
}

} // namespace mfspec::detail
