#pragma once

#include "mfspec/mfspec.hpp"

namespace testing_support {

using namespace mfspec;

inline SymbolPotential gauss() { return {GaussMetric{}, Role::PositiveMetric}; }
inline SymbolPotential phi(Family f) { return normalize({std::move(f), Role::NegativePotential}); }

inline const PotentialPair& preset_pair(const std::string& name) {
    static std::map<std::string, PotentialPair> cache;
    auto it = cache.find(name);
    if (it == cache.end()) {
        const auto& p = find_preset(name);
        it = cache.emplace(name, PotentialPair(p.phi, p.psi)).first;
    }
    return it->second;
}

inline const PotentialPair& shifted3() { return preset_pair("zero-transitions"); }
inline const PotentialPair& powerlog12() { return preset_pair("one-transition"); }
inline const PotentialPair& minkowski() { return preset_pair("minkowski"); }

} // namespace testing_support
