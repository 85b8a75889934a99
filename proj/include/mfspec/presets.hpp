#pragma once

#include <string>
#include <vector>

#include "mfspec/potentials.hpp"

namespace mfspec {

struct Preset {
    std::string name;
    std::string description;
    SymbolPotential phi, psi;
};

inline const std::vector<Preset>& presets() {
    static const std::vector<Preset> all = [] {
        const SymbolPotential gauss{GaussMetric{}, Role::PositiveMetric};
        auto phi = [](Family f) { return normalize({std::move(f), Role::NegativePotential}); };
        // class lines t = 1/(2 p_k) - l_k q / 2 cross at q = 1, 2, 3
        PiecewisePartition part;
        part.classes = {{1.1277777777777778, 2, 1}, {0.6277777777777778, 3, 1}, {0.5444444444444444, 4, 1}, {0.5, 5, 1}};
        return std::vector<Preset>{
            {"zero-transitions", "p_i = C/(i+1)^3 against the Gauss metric: Q empty, analytic spectrum",
             phi(ShiftedPower{3, {}}), gauss},
            {"one-transition", "p_i = C/(i^1.2 log(i+2)^2): Q = [q0, inf), one transition at alpha(q0)",
             phi(PowerLog{1.2, 2, 2, {}}), gauss},
            {"two-transitions",
             "PowerLog(1.2, 1.25) with p_2 raised 1.3x: Q = [q0, q1], moments diverge at q0, "
             "transitions at alpha_lim and alpha(q1)",
             phi(SpikedPowerLog{PowerLog{1.2, 1.25, 2, {}}, 2, 1.3}), gauss},
            {"three-transitions",
             "PowerLog(1.2, 2) with p_2 raised 1.8x: Q = [q0, q1], transitions at alpha(q0), alpha_lim, alpha(q1)",
             phi(SpikedPowerLog{PowerLog{1.2, 2, 2, {}}, 2, 1.8}), gauss},
            {"minkowski", "p_i = 2^-i (Minkowski question mark) against the Gauss metric: alpha_lim = inf",
             phi(Geometric{0.5, {}}), gauss},
            {"infinite-transitions",
             "perfect-power classes for the primes 2, 3, 5 with separate exponents: the boundary t_tilde "
             "breaks at q = 1, 2, 3",
             phi(part), gauss},
        };
    }();
    return all;
}

inline const Preset& find_preset(const std::string& name) {
    for (const auto& p : presets())
        if (p.name == name) return p;
    throw ConfigError("unknown preset '" + name + "'");
}

} // namespace mfspec
