#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace mfspec {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DomainError : Error { using Error::Error; };
struct NotNormalizable : Error { using Error::Error; };
struct NotPolynomial : Error { using Error::Error; };
struct NoGibbsState : Error { using Error::Error; };
struct AlphaDiverges : Error {
    // +1 when the dimension runs off towards alpha_sup, -1 towards alpha_inf
    int direction = 0;
    AlphaDiverges(const std::string& what, int dir) : Error(what), direction(dir) {}
};
struct NoFiniteRoot : Error { using Error::Error; };
struct OutOfRange : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };
struct InvariantViolation : Error { using Error::Error; };

struct ShortExpansion : Error {
    std::vector<std::uint64_t> digits;
    ShortExpansion(const std::string& what, std::vector<std::uint64_t> d)
        : Error(what), digits(std::move(d)) {}
};

} // namespace mfspec
