// File formats: curve specification files, CSV/JSON/binary field exports,
// spectrum and bound-report records.
#pragma once

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "loopspec/curve.hpp"
#include "loopspec/periodic_spectrum.hpp"
#include "loopspec/strip_fields.hpp"
#include "loopspec/transverse_well.hpp"

namespace loopspec {

using Json = nlohmann::json;

// --- curve specification files ---------------------------------------------
//
//   # comment
//   curve = circle | ellipse | tabulated
//   radius = 1.0            (circle)
//   a = 2.0                 (ellipse semi-axes)
//   b = 1.0
//   center = 0.1 -0.2       (optional, default origin)
//   grid = 512              (optional)
//   period = 6.283185307    (tabulated: parameter period)
//   points:                 (tabulated: uniform-t samples "t x y" per line)
//   0.0 1.0 0.0
//   ...

struct CurveSpec {
    std::string kind;
    double radius = 1.0;
    double semi_a = 2.0, semi_b = 1.0;
    Vec2 center{0.0, 0.0};
    int grid = 0;  // 0 = per-kind default
    double period = 0.0;
    std::vector<double> t, x, y;
};

inline CurveSpec parse_curve_spec(std::istream& is) {
    CurveSpec spec;
    std::string line;
    bool in_points = false;
    while (std::getline(is, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        std::istringstream ls(line);
        if (in_points) {
            double t, x, y;
            if (ls >> t >> x >> y) {
                spec.t.push_back(t);
                spec.x.push_back(x);
                spec.y.push_back(y);
            }
            continue;
        }
        std::string key;
        if (!(ls >> key)) continue;
        if (key == "points:") {
            in_points = true;
            continue;
        }
        std::string eq;
        ls >> eq;
        if (eq != "=") throw std::runtime_error("curve file: expected 'key = value', got '" + line + "'");
        if (key == "curve") ls >> spec.kind;
        else if (key == "radius") ls >> spec.radius;
        else if (key == "a") ls >> spec.semi_a;
        else if (key == "b") ls >> spec.semi_b;
        else if (key == "grid") ls >> spec.grid;
        else if (key == "period") ls >> spec.period;
        else if (key == "center") {
            double cx, cy;
            ls >> cx >> cy;
            spec.center = Vec2(cx, cy);
        } else {
            throw std::runtime_error("curve file: unknown key '" + key + "'");
        }
    }
    if (spec.kind.empty()) throw std::runtime_error("curve file: missing 'curve' key");
    return spec;
}

inline LoopCurve build_curve(const CurveSpec& spec) {
    if (spec.kind == "circle")
        return LoopCurve::circle(spec.radius, spec.center, spec.grid > 0 ? spec.grid : 256);
    if (spec.kind == "ellipse")
        return LoopCurve::ellipse(spec.semi_a, spec.semi_b, spec.center,
                                  spec.grid > 0 ? spec.grid : 1024);
    if (spec.kind == "tabulated") {
        const std::size_t n = spec.t.size();
        if (n < 16) throw std::runtime_error("curve file: tabulated input needs >= 16 samples");
        const double T = spec.period > 0.0 ? spec.period
                                           : spec.t.back() + (spec.t.back() - spec.t.front()) /
                                                                 static_cast<double>(n - 1);
        // verify uniform sampling
        const double dt = T / static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i)
            if (std::abs(spec.t[i] - static_cast<double>(i) * dt) > 1e-9 * T)
                throw std::runtime_error("curve file: tabulated t-samples must be uniform over the period");
        std::vector<double> xs = spec.x, ys = spec.y;
        TrigSeries X(xs, T), Y(ys, T);
        return LoopCurve::from_parametric([X, Y](double t) { return Vec2(X.eval(t), Y.eval(t)); }, T,
                                          spec.grid > 0 ? spec.grid : std::max<int>(256, static_cast<int>(n)));
    }
    throw std::runtime_error("curve file: unknown curve kind '" + spec.kind + "'");
}

inline LoopCurve load_curve_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open curve file: " + path);
    return build_curve(parse_curve_spec(f));
}

// --- field exports ----------------------------------------------------------

inline void write_field_csv(const StripField& f, std::ostream& os) {
    os << "# field: " << f.name << "\n";
    os << "s,u,value\n";
    os << std::setprecision(17);
    for (int i = 0; i < f.grid.ns; ++i)
        for (int j = 0; j < f.grid.nu; ++j)
            os << f.grid.s(i) << "," << f.grid.u(j) << "," << f.values(i, j) << "\n";
}

// compact binary grid: magic, version, ns, nu (int32 LE), L, a, values row-major
inline void write_field_binary(const StripField& f, std::ostream& os) {
    const char magic[4] = {'L', 'S', 'G', 'F'};
    os.write(magic, 4);
    const std::int32_t version = 1, ns = f.grid.ns, nu = f.grid.nu;
    os.write(reinterpret_cast<const char*>(&version), 4);
    os.write(reinterpret_cast<const char*>(&ns), 4);
    os.write(reinterpret_cast<const char*>(&nu), 4);
    os.write(reinterpret_cast<const char*>(&f.grid.L), 8);
    os.write(reinterpret_cast<const char*>(&f.grid.a), 8);
    for (int i = 0; i < ns; ++i)
        for (int j = 0; j < nu; ++j) {
            const double v = f.values(i, j);
            os.write(reinterpret_cast<const char*>(&v), 8);
        }
}

inline StripField read_field_binary(std::istream& is) {
    char magic[4];
    is.read(magic, 4);
    if (std::string(magic, 4) != "LSGF") throw std::runtime_error("field binary: bad magic");
    std::int32_t version = 0, ns = 0, nu = 0;
    is.read(reinterpret_cast<char*>(&version), 4);
    is.read(reinterpret_cast<char*>(&ns), 4);
    is.read(reinterpret_cast<char*>(&nu), 4);
    if (version != 1) throw std::runtime_error("field binary: unsupported version");
    double L = 0.0, a = 0.0;
    is.read(reinterpret_cast<char*>(&L), 8);
    is.read(reinterpret_cast<char*>(&a), 8);
    StripField f;
    f.grid = StripGrid(L, a, ns, nu);
    f.values.resize(ns, nu);
    for (int i = 0; i < ns; ++i)
        for (int j = 0; j < nu; ++j) {
            double v;
            is.read(reinterpret_cast<char*>(&v), 8);
            f.values(i, j) = v;
        }
    if (!is) throw std::runtime_error("field binary: truncated stream");
    return f;
}

// --- JSON records -----------------------------------------------------------

inline Json spectrum_to_json(const Spectrum& sp, const std::string& operator_name, const Json& params) {
    Json j;
    j["operator"] = operator_name;
    j["params"] = params;
    j["grid"] = sp.grid;
    j["eigenvalues"] = sp.values;
    j["error_estimates"] = sp.error_estimate;
    return j;
}

inline Json supnorms_to_json(const SupNorms& n) {
    Json j;
    j["a"] = n.a;
    j["N"] = n.N;
    j["M"] = n.M;
    if (std::isfinite(n.fitted_slope)) j["T_fit"] = n.fitted_slope;
    return j;
}

/// Per-side bound record: {a, beta, gamma_plus, side, zeta,
/// bound_literal_pass, bound_scaled_pass}.
inline Json transverse_bound_record(const Est2Report& r, TransverseSide side) {
    Json j;
    j["a"] = r.a;
    j["beta"] = r.beta;
    j["gamma_plus"] = r.gamma_plus;
    if (side == TransverseSide::plus) {
        j["side"] = "+";
        j["zeta"] = r.zeta_plus_exists ? Json(r.zeta_plus_value) : Json(nullptr);
        j["bound_literal_pass"] = r.upper_plus_literal;
        j["bound_scaled_pass"] = r.upper_plus_scaled;
    } else {
        j["side"] = "-";
        j["zeta"] = r.zeta_minus_value;
        j["bound_literal_pass"] = r.lower_minus_literal;
        j["bound_scaled_pass"] = r.lower_minus_scaled;
    }
    return j;
}

inline Json est2_to_json(const Est2Report& r) {
    Json j;
    j["a"] = r.a;
    j["beta"] = r.beta;
    j["gamma_plus"] = r.gamma_plus;
    j["leading"] = r.leading;
    j["zeta_plus"] = r.zeta_plus_exists ? Json(r.zeta_plus_value) : Json(nullptr);
    j["zeta_minus"] = r.zeta_minus_value;
    j["strict_lower_plus"] = r.strict_lower_plus;
    j["strict_upper_minus"] = r.strict_upper_minus;
    j["bound_literal_pass"] = Json{{"upper_plus", r.upper_plus_literal}, {"lower_minus", r.lower_minus_literal}};
    j["bound_scaled_pass"] = Json{{"upper_plus", r.upper_plus_scaled}, {"lower_minus", r.lower_minus_scaled}};
    j["hypothesis_a"] = r.hypothesis_a;
    j["hypothesis_b"] = r.hypothesis_b;
    return j;
}

}  // namespace loopspec
