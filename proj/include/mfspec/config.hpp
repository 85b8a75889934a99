#pragma once

#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <sstream>
#include <string>

#include "json.hpp"

#include "mfspec/pressure.hpp"
#include "mfspec/presets.hpp"

namespace mfspec {

struct OutputSelection {
    bool temperature_curve = true;
    bool spectrum_curve = true;
    bool transition_report = true;
    bool dimension_check = false;
    bool plots = true;
};

struct DimensionCheckConfig {
    double q = 0;
    std::uint64_t samples = 10000;
    std::uint64_t digits = 10000;
};

struct ExperimentConfig {
    std::string name = "experiment";
    SymbolPotential phi, psi;
    double q_min = -50, q_max = 50;
    int grid_points = 512;
    OutputSelection outputs;
    Tolerances tolerances;
    std::uint64_t seed = 20240611;
    DimensionCheckConfig dimension;
};

namespace detail {

using nlohmann::json;

struct Reader {
    const json& j;
    std::string path;

    [[noreturn]] void fail(const std::string& msg) const {
        throw ConfigError((path.empty() ? "/" : path) + ": " + msg);
    }

    Reader at(const std::string& key) const { return {j.at(key), path + "/" + key}; }
    Reader at(std::size_t i) const { return {j.at(i), path + "/" + std::to_string(i)}; }
    bool has(const std::string& key) const { return j.contains(key); }

    void object(std::initializer_list<const char*> allowed) const {
        if (!j.is_object()) fail("expected an object");
        for (const auto& [k, v] : j.items()) {
            bool ok = false;
            for (const char* a : allowed) ok = ok || k == a;
            if (!ok) fail("unknown key '" + k + "'");
        }
    }

    double number() const {
        if (!j.is_number()) fail("expected a number");
        return j.get<double>();
    }
    std::uint64_t count() const {
        if (!j.is_number_unsigned()) fail("expected a non-negative integer");
        return j.get<std::uint64_t>();
    }
    bool boolean() const {
        if (!j.is_boolean()) fail("expected true or false");
        return j.get<bool>();
    }
    std::string string() const {
        if (!j.is_string()) fail("expected a string");
        return j.get<std::string>();
    }

    double number(const std::string& key, double dflt) const { return has(key) ? at(key).number() : dflt; }
    std::optional<double> maybe(const std::string& key) const {
        return has(key) ? std::optional<double>(at(key).number()) : std::nullopt;
    }
};

inline PowerLog read_power_log(const Reader& r) {
    r.object({"family", "a", "b", "c", "scale"});
    return {r.number("a", 1), r.number("b", 0), r.number("c", 2), r.maybe("scale")};
}

inline Family read_family(const Reader& r) {
    if (!r.j.is_object()) r.fail("expected an object");
    if (!r.has("family")) r.fail("missing key 'family'");
    const std::string fam = r.at("family").string();
    if (fam == "power_log") return read_power_log(r);
    if (fam == "shifted_power") {
        r.object({"family", "a", "scale"});
        return ShiftedPower{r.number("a", 2), r.maybe("scale")};
    }
    if (fam == "geometric") {
        r.object({"family", "r", "scale"});
        return Geometric{r.number("r", 0.5), r.maybe("scale")};
    }
    if (fam == "gauss_metric") {
        r.object({"family"});
        return GaussMetric{};
    }
    if (fam == "piecewise_partition") {
        r.object({"family", "classes", "scale"});
        if (!r.has("classes")) r.fail("missing key 'classes'");
        auto cs = r.at("classes");
        if (!cs.j.is_array() || cs.j.empty()) cs.fail("expected a non-empty array");
        PiecewisePartition p;
        for (std::size_t i = 0; i < cs.j.size(); ++i) {
            auto c = cs.at(i);
            c.object({"l", "M", "C"});
            p.classes.push_back({c.number("l", 1), c.number("M", 2), c.number("C", 1)});
        }
        p.scale = r.maybe("scale");
        return p;
    }
    if (fam == "spiked_power_log") {
        r.object({"family", "base", "k", "C_k"});
        if (!r.has("base")) r.fail("missing key 'base'");
        auto base = r.at("base");
        base.object({"a", "b", "c", "scale"});
        SpikedPowerLog s;
        s.base = {base.number("a", 1), base.number("b", 0), base.number("c", 2), base.maybe("scale")};
        if (r.has("k")) s.k = r.at("k").count();
        s.C_k = r.number("C_k", 1);
        return s;
    }
    r.at("family").fail("unknown family '" + fam + "'");
}

inline bool has_scale(const Family& f) {
    return std::visit(
        [](const auto& x) {
            using F = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<F, GaussMetric>) return true;
            else if constexpr (std::is_same_v<F, SpikedPowerLog>) return x.base.scale.has_value();
            else return x.scale.has_value();
        },
        f);
}

template <class F>
inline F unit_scale(F f) {
    if constexpr (std::is_same_v<F, SpikedPowerLog>) {
        if (!f.base.scale) f.base.scale = 1.0;
    } else if constexpr (!std::is_same_v<F, GaussMetric>) {
        if (!f.scale) f.scale = 1.0;
    }
    return f;
}

// phi without a scale is normalized to total mass one; psi defaults to scale 1
inline SymbolPotential read_potential(const Reader& r, Role role) {
    Family f = read_family(r);
    try {
        if (role == Role::NegativePotential && !has_scale(f)) return normalize({f, role});
        return {std::visit([](auto x) -> Family { return unit_scale(x); }, f), role};
    } catch (const Error& e) {
        r.fail(e.what());
    }
}

} // namespace detail

inline ExperimentConfig parse_config(const nlohmann::json& j) {
    using detail::Reader;
    Reader root{j, ""};
    root.object({"name", "preset", "pair", "q_range", "grid_points", "outputs", "tolerances", "seed",
                 "dimension_check"});
    ExperimentConfig cfg;
    if (root.has("name")) cfg.name = root.at("name").string();

    if (root.has("preset") == root.has("pair")) root.fail("give exactly one of 'preset' and 'pair'");
    if (root.has("preset")) {
        auto r = root.at("preset");
        const std::string name = r.string();
        try {
            const auto& p = find_preset(name);
            cfg.phi = p.phi;
            cfg.psi = p.psi;
        } catch (const ConfigError& e) {
            r.fail(e.what());
        }
        if (!root.has("name")) cfg.name = name;
    } else {
        auto pair = root.at("pair");
        pair.object({"phi", "psi"});
        if (!pair.has("phi")) pair.fail("missing key 'phi'");
        cfg.phi = detail::read_potential(pair.at("phi"), Role::NegativePotential);
        cfg.psi = pair.has("psi") ? detail::read_potential(pair.at("psi"), Role::PositiveMetric)
                                  : SymbolPotential{GaussMetric{}, Role::PositiveMetric};
        try {
            PotentialPair check(cfg.phi, cfg.psi);
        } catch (const Error& e) {
            pair.fail(e.what());
        }
    }

    if (root.has("q_range")) {
        auto r = root.at("q_range");
        if (!r.j.is_array() || r.j.size() != 2) r.fail("expected [q_min, q_max]");
        cfg.q_min = r.at(0).number();
        cfg.q_max = r.at(1).number();
        if (!(cfg.q_min < cfg.q_max)) r.fail("q_min must be below q_max");
    }
    if (root.has("grid_points")) {
        auto r = root.at("grid_points");
        auto n = r.count();
        if (n < 64 || n > 1000000) r.fail("grid_points must lie in [64, 1000000]");
        cfg.grid_points = int(n);
    }
    if (root.has("outputs")) {
        auto r = root.at("outputs");
        r.object({"temperature_curve", "spectrum_curve", "transition_report", "dimension_check", "plots"});
        auto flag = [&](const char* k, bool& dst) {
            if (r.has(k)) dst = r.at(k).boolean();
        };
        flag("temperature_curve", cfg.outputs.temperature_curve);
        flag("spectrum_curve", cfg.outputs.spectrum_curve);
        flag("transition_report", cfg.outputs.transition_report);
        flag("dimension_check", cfg.outputs.dimension_check);
        flag("plots", cfg.outputs.plots);
    }
    if (root.has("tolerances")) {
        auto r = root.at("tolerances");
        r.object({"rel_tol", "root_tol", "pressure_tol", "endpoint_tol", "slope_tol"});
        auto tol = [&](const char* k, double& dst) {
            if (!r.has(k)) return;
            auto v = r.at(k);
            dst = v.number();
            if (!(dst > 0 && dst < 1)) v.fail("tolerance must lie in (0, 1)");
        };
        tol("rel_tol", cfg.tolerances.rel_tol);
        tol("root_tol", cfg.tolerances.root_tol);
        tol("pressure_tol", cfg.tolerances.pressure_tol);
        tol("endpoint_tol", cfg.tolerances.endpoint_tol);
        tol("slope_tol", cfg.tolerances.slope_tol);
    }
    if (root.has("seed")) cfg.seed = root.at("seed").count();
    if (root.has("dimension_check")) {
        auto r = root.at("dimension_check");
        r.object({"q", "samples", "digits"});
        cfg.dimension.q = r.number("q", 0);
        if (r.has("samples")) cfg.dimension.samples = r.at("samples").count();
        if (r.has("digits")) cfg.dimension.digits = r.at("digits").count();
        if (cfg.dimension.samples < 2 || cfg.dimension.digits < 1) r.fail("need samples >= 2 and digits >= 1");
    }
    return cfg;
}

// Syntax errors come back with nlohmann's line/column message.
inline ExperimentConfig parse_config_text(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(e.what());
    }
    return parse_config(j);
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return parse_config_text(ss.str());
    } catch (const ConfigError& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

} // namespace mfspec
