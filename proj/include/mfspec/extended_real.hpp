#pragma once

#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include "mfspec/errors.hpp"

namespace mfspec {

// A real number or one of the two infinities, kept as a tag instead of an
// IEEE overflow so that callers have to look before using the value.
class ExtendedReal {
public:
    enum class Kind { Finite, PlusInfinity, MinusInfinity };

    constexpr ExtendedReal() = default;
    constexpr ExtendedReal(double v) : kind_(Kind::Finite), value_(v) {}

    static constexpr ExtendedReal plus_infinity() { return ExtendedReal(Kind::PlusInfinity); }
    static constexpr ExtendedReal minus_infinity() { return ExtendedReal(Kind::MinusInfinity); }

    constexpr Kind kind() const { return kind_; }
    constexpr bool is_finite() const { return kind_ == Kind::Finite; }
    constexpr bool is_plus_infinity() const { return kind_ == Kind::PlusInfinity; }
    constexpr bool is_minus_infinity() const { return kind_ == Kind::MinusInfinity; }

    double value() const {
        if (kind_ != Kind::Finite)
            throw DomainError("value() on an infinite extended real");
        return value_;
    }

    // IEEE view, for ordering and plotting only.
    constexpr double as_double() const {
        switch (kind_) {
        case Kind::PlusInfinity: return std::numeric_limits<double>::infinity();
        case Kind::MinusInfinity: return -std::numeric_limits<double>::infinity();
        default: return value_;
        }
    }

    friend constexpr bool operator==(const ExtendedReal& a, const ExtendedReal& b) {
        return a.kind_ == b.kind_ && (a.kind_ != Kind::Finite || a.value_ == b.value_);
    }
    friend constexpr bool operator<(const ExtendedReal& a, const ExtendedReal& b) {
        return a.as_double() < b.as_double();
    }

private:
    constexpr explicit ExtendedReal(Kind k) : kind_(k), value_(0.0) {}

    Kind kind_ = Kind::Finite;
    double value_ = 0.0;
};

inline std::string to_string(const ExtendedReal& x, int digits = 17) {
    if (x.is_plus_infinity()) return "+inf";
    if (x.is_minus_infinity()) return "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, x.value());
    return buf;
}

} // namespace mfspec
