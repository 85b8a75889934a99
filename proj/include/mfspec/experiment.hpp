#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "mfspec/config.hpp"
#include "mfspec/gauss.hpp"
#include "mfspec/spectrum.hpp"

namespace mfspec {

enum ExitCode { kExitOk = 0, kExitConfig = 2, kExitInvariant = 3 };

inline std::string fmt17(double x) {
    if (std::isnan(x)) return "n/a";
    return to_string(std::isinf(x) ? (x > 0 ? ExtendedReal::plus_infinity() : ExtendedReal::minus_infinity())
                                   : ExtendedReal(x));
}

inline std::string fmt_short(double x) {
    if (std::isinf(x)) return x > 0 ? "+inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", x);
    return buf;
}

struct TemperatureRow {
    double q = 0;
    std::string T = "n/a", t_tilde = "n/a", regime = "n/a", alpha = "n/a";
    double T_value = std::numeric_limits<double>::quiet_NaN(); // finite T only
};

// Uniform q grid, warm-starting each root from the tangent at the previous
// analytic point.  Failures become sentinel strings.
inline std::vector<TemperatureRow> temperature_rows(const PotentialPair& pair, double q_min, double q_max, int n,
                                                    const Tolerances& tol) {
    std::vector<TemperatureRow> rows(static_cast<std::size_t>(n));
    std::optional<double> hint;
    double prev_q = 0, prev_T = 0, prev_a = 0;
    bool have_prev = false;
    for (int k = 0; k < n; ++k) {
        auto& row = rows[std::size_t(k)];
        row.q = k + 1 == n ? q_max : q_min + (q_max - q_min) * k / (n - 1);
        try {
            row.t_tilde = to_string(t_tilde(pair, row.q));
        } catch (const Error&) {
        }
        try {
            if (have_prev) hint = prev_T - prev_a * (row.q - prev_q);
            auto r = temperature(pair, row.q, tol, hint);
            row.T = to_string(r.T);
            row.regime = to_string(r.regime);
            row.alpha = r.weights_finite || r.alpha.is_finite() ? to_string(r.alpha) : "n/a";
            if (r.T.is_finite()) row.T_value = r.T.value();
            have_prev = r.regime == Regime::AnalyticBranch && r.T.is_finite() && r.alpha.is_finite();
            if (have_prev) {
                prev_q = row.q;
                prev_T = r.T.value();
                prev_a = r.alpha.value();
            }
        } catch (const NoFiniteRoot&) {
            row.T = "+inf";
            have_prev = false;
        } catch (const Error&) {
            have_prev = false;
        }
    }
    return rows;
}

// Second divided differences of finite consecutive samples are >= -tol.
inline bool convex_ok(const std::vector<std::pair<double, double>>& s, double tol = 1e-8) {
    for (std::size_t k = 2; k < s.size(); ++k) {
        const auto &a = s[k - 2], &b = s[k - 1], &c = s[k];
        if (!std::isfinite(a.second) || !std::isfinite(b.second) || !std::isfinite(c.second)) continue;
        double d = 2 * ((c.second - b.second) / (c.first - b.first) - (b.second - a.second) / (b.first - a.first)) /
                   (c.first - a.first);
        if (d < -tol) return false;
    }
    return true;
}

inline std::string describe(const QSet& Q, const AlphaLim& alim) {
    auto f = [](const std::optional<double>& x) { return x ? fmt_short(*x) : std::string("?"); };
    switch (Q.kind) {
    case QSet::Kind::Empty: return "empty";
    case QSet::Kind::All: return "all of R";
    case QSet::Kind::Point: return "{" + f(Q.q0) + "}";
    case QSet::Kind::RayUp: return "[" + f(Q.q0) + ", +inf)";
    case QSet::Kind::RayDown:
        return alim.kind == AlphaLim::Kind::PlusInfinity ? "(-inf, 0)" : "(-inf, " + f(Q.q1) + "]";
    default: return "[" + f(Q.q0) + ", " + f(Q.q1) + "]";
    }
}

// Where a transition comes from: alpha(q_e) for the end q_e of a frozen
// stretch, alpha_lim or a corner alpha between two frozen slopes.
inline std::string transition_label(const Transition& t, const AlphaLim& alim) {
    if (t.q_left == t.q_right) {
        char buf[48];
        std::snprintf(buf, sizeof buf, "alpha(%.6g)", t.q_left);
        return buf;
    }
    if (alim.finite() && std::abs(t.alpha - alim.value) <= 1e-6 * (1 + std::abs(alim.value))) return "alpha_lim";
    return "alpha = " + fmt_short(t.alpha);
}

inline std::string report_summary(const SpectrumCurve& c, const TransitionReport& r) {
    std::ostringstream os;
    if (r.count == 0) {
        os << "0 phase transitions, Q " << describe(c.qset, c.alim) << "\n";
    } else {
        os << r.count << (r.count == 1 ? " phase transition at " : " phase transitions at ");
        for (std::size_t k = 0; k < r.transitions.size(); ++k)
            os << (k ? ", " : "") << transition_label(r.transitions[k], c.alim);
        os << "\n";
        for (const auto& t : r.transitions)
            os << "  alpha = " << fmt17(t.alpha) << "  " << to_string(t.kind) << "\n";
    }
    os << "Q: " << describe(c.qset, c.alim) << " within [" << fmt_short(c.qset.q_min) << ", "
       << fmt_short(c.qset.q_max) << "]\n";
    os << "alpha_lim: " << to_string(c.alim) << "\n";
    os << "case: " << to_string(r.case_label) << "\n";
    return os.str();
}

namespace detail {

inline double inf_v() { return std::numeric_limits<double>::infinity(); }

inline void write_text(const std::filesystem::path& p, const std::string& s) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw Error("cannot write " + p.string());
    out << s;
}

struct Series {
    std::vector<std::pair<double, double>> pts;
    std::string colour = "#1f4e9c";
};

// Bare-bones line plot; non-finite points break the polyline.
inline std::string svg_plot(const std::string& title, const std::string& xl, const std::string& yl,
                            const std::vector<Series>& series, const std::vector<double>& marks = {}) {
    double x0 = inf_v(), x1 = -inf_v(), y0 = inf_v(), y1 = -inf_v();
    for (const auto& s : series)
        for (auto [x, y] : s.pts)
            if (std::isfinite(x) && std::isfinite(y)) {
                x0 = std::min(x0, x), x1 = std::max(x1, x), y0 = std::min(y0, y), y1 = std::max(y1, y);
            }
    if (!(x0 < x1)) x0 -= 1, x1 += 1;
    if (!(y0 < y1)) y0 -= 1, y1 += 1;
    const double W = 640, H = 420, L = 70, R = 20, T = 40, B = 50;
    auto X = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
    auto Y = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - T - B); };
    std::ostringstream os;
    os.precision(6);
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n"
       << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
       << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">"
       << title << "</text>\n"
       << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\"" << H - T - B
       << "\" fill=\"none\" stroke=\"#444\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        double xv = x0 + (x1 - x0) * k / 4, yv = y0 + (y1 - y0) * k / 4;
        os << "<text x=\"" << X(xv) << "\" y=\"" << H - B + 16 << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           << "font-size=\"11\">" << xv << "</text>\n"
           << "<text x=\"" << L - 6 << "\" y=\"" << Y(yv) + 4 << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
           << "font-size=\"11\">" << yv << "</text>\n";
    }
    os << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 12
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << xl << "</text>\n"
       << "<text x=\"16\" y=\"" << (T + H - B) / 2 << "\" transform=\"rotate(-90 16 " << (T + H - B) / 2
       << ")\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << yl << "</text>\n";
    for (double m : marks)
        if (std::isfinite(m) && m >= x0 && m <= x1)
            os << "<line x1=\"" << X(m) << "\" x2=\"" << X(m) << "\" y1=\"" << T << "\" y2=\"" << H - B
               << "\" stroke=\"#c0392b\" stroke-dasharray=\"4 3\"/>\n";
    for (const auto& s : series) {
        std::string cur;
        auto flush = [&] {
            if (!cur.empty())
                os << "<polyline fill=\"none\" stroke=\"" << s.colour << "\" stroke-width=\"1.6\" points=\"" << cur
                   << "\"/>\n";
            cur.clear();
        };
        for (auto [x, y] : s.pts) {
            if (!std::isfinite(x) || !std::isfinite(y)) {
                flush();
                continue;
            }
            std::ostringstream p;
            p.precision(6);
            p << X(x) << "," << Y(y) << " ";
            cur += p.str();
        }
        flush();
    }
    os << "</svg>\n";
    return os.str();
}

} // namespace detail

struct RunOutcome {
    int exit_code = kExitOk;
    std::vector<std::string> files;
    std::vector<std::string> violations;
};

// Runs every requested output into out_dir; the summary goes to `out`.
inline RunOutcome run_experiment(const ExperimentConfig& cfg, const std::filesystem::path& out_dir,
                                 std::ostream& out) {
    namespace fs = std::filesystem;
    RunOutcome res;
    fs::create_directories(out_dir);
    PotentialPair pair(cfg.phi, cfg.psi);
    const auto& tol = cfg.tolerances;
    auto emit = [&](const std::string& name, const std::string& body) {
        detail::write_text(out_dir / name, body);
        res.files.push_back((out_dir / name).string());
    };

    out << "experiment: " << cfg.name << "\n"
        << "phi: " << family_name(cfg.phi.family) << ", psi: " << family_name(cfg.psi.family) << "\n";

    std::vector<TemperatureRow> trows;
    if (cfg.outputs.temperature_curve) {
        trows = temperature_rows(pair, cfg.q_min, cfg.q_max, cfg.grid_points, tol);
        std::string csv = "q,T,t_tilde,regime,alpha\n";
        std::vector<std::pair<double, double>> s;
        for (const auto& r : trows) {
            csv += fmt17(r.q) + "," + r.T + "," + r.t_tilde + "," + r.regime + "," + r.alpha + "\n";
            s.push_back({r.q, r.T_value});
        }
        emit("temperature.csv", csv);
        if (!convex_ok(s)) res.violations.push_back("T fails convexity on the q grid");
        if (cfg.outputs.plots) {
            std::vector<std::pair<double, double>> tt;
            for (const auto& r : trows) {
                double v = std::numeric_limits<double>::quiet_NaN();
                if (r.t_tilde != "+inf" && r.t_tilde != "-inf" && r.t_tilde != "n/a") v = std::stod(r.t_tilde);
                tt.push_back({r.q, v});
            }
            emit("temperature.svg", detail::svg_plot("temperature function", "q", "T(q)",
                                                     {{s, "#1f4e9c"}, {tt, "#999999"}}));
        }
    }

    const bool need_spectrum = cfg.outputs.spectrum_curve || cfg.outputs.transition_report;
    if (need_spectrum) {
        SpectrumModel model(pair, cfg.q_min, cfg.q_max, tol);
        auto curve = model.curve(cfg.grid_points);
        auto rep = phase_transitions(curve, tol);
        if (cfg.outputs.spectrum_curve) {
            std::string csv = "alpha,f,q_star,branch\n";
            std::vector<std::pair<double, double>> s;
            double fmax = -detail::inf_v(), amax = 0;
            for (const auto& p : curve.points) {
                csv += fmt17(p.alpha) + "," + fmt17(p.f) + "," + to_string(p.q_star) + "," + to_string(p.branch) + "\n";
                s.push_back({p.alpha, p.f});
                if (p.f > fmax) fmax = p.f, amax = p.alpha;
            }
            emit("spectrum.csv", csv);
            if (curve.points.size() != std::size_t(cfg.grid_points))
                res.violations.push_back("spectrum curve has " + std::to_string(curve.points.size()) +
                                         " points, expected " + std::to_string(cfg.grid_points));
            out << "spectrum: max f = " << fmt17(fmax) << " at alpha = " << fmt17(amax) << "\n";
            if (cfg.outputs.plots)
                emit("spectrum.svg",
                     detail::svg_plot("multifractal spectrum", "alpha", "f(alpha)", {{s, "#1f4e9c"}}, rep.locations));
        }
        if (!rep.concave_ok) res.violations.push_back("f fails concavity on the alpha grid");
        if (cfg.outputs.transition_report) {
            std::string csv = "alpha_location,kind\n";
            for (const auto& t : rep.transitions) csv += fmt17(t.alpha) + "," + to_string(t.kind) + "\n";
            emit("transitions.csv", csv);
        }
        out << report_summary(curve, rep);
    }

    if (cfg.outputs.dimension_check) {
        const auto& d = cfg.dimension;
        std::string csv = "q,mean,std_error,samples,digits,alpha_q\n";
        std::string mean = "n/a", se = "n/a", aq = "n/a";
        try {
            auto e = sample_dimension(pair, d.q, d.samples, d.digits, cfg.seed, tol);
            mean = fmt17(e.mean);
            se = fmt17(e.std_error);
            out << "dimension check at q = " << fmt_short(d.q) << ": mean " << fmt_short(e.mean) << " +- "
                << fmt_short(e.std_error);
            try {
                double a = alpha_of_q(pair, d.q, tol);
                aq = fmt17(a);
                out << ", alpha(q) = " << fmt_short(a) << ", z = " << fmt_short((e.mean - a) / e.std_error);
            } catch (const Error&) {
            }
            out << "\n";
        } catch (const Error& e) {
            out << "dimension check at q = " << fmt_short(d.q) << ": " << e.what() << "\n";
        }
        csv += fmt17(d.q) + "," + mean + "," + se + "," + std::to_string(d.samples) + "," + std::to_string(d.digits) +
               "," + aq + "\n";
        emit("dimension.csv", csv);
    }

    for (const auto& v : res.violations) out << "invariant violated: " << v << "\n";
    if (!res.violations.empty()) res.exit_code = kExitInvariant;
    return res;
}

} // namespace mfspec
