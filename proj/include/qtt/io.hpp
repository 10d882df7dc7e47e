#pragma once
/// @file io.hpp
/// @brief JSON for trains, splines, audit reports and study records; CSV output.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "qtt/analysis.hpp"
#include "qtt/complexity.hpp"
#include "qtt/piecewise.hpp"
#include "qtt/tensor_train.hpp"

namespace qtt {

using json = nlohmann::json;

/// Malformed input file or document.
struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ------------------------------------------------------------------- numbers

/// p as a JSON value: a number, or the string "inf".
inline json p_to_json(double p) { return std::isinf(p) ? json("inf") : json(p); }

inline double p_from_string(const std::string& s) {
    if (s == "inf" || s == "infinity") return std::numeric_limits<double>::infinity();
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw FormatError("cannot parse p '" + s + "'");
    }
    if (used != s.size() || !(v > 0.0)) throw FormatError("cannot parse p '" + s + "'");
    return v;
}

inline std::string format_double(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// ------------------------------------------------------------- tensor trains

inline json tt_to_json(const TensorTrain& tt) {
    json j;
    j["format"] = "qtt";
    j["version"] = 1;
    j["base"] = tt.grid.base;
    j["depth"] = tt.grid.depth;
    j["basis"] = {{"kind", to_string(tt.basis.kind)}, {"degree", tt.basis.degree}};
    json cores = json::array();
    for (const auto& c : tt.cores) {
        json jc;
        jc["left"] = c.rl;
        jc["right"] = c.rr;
        json slices = json::array();
        for (const auto& s : c.slices) {
            std::vector<double> v;  // row-major
            for (Eigen::Index a = 0; a < s.rows(); ++a)
                for (Eigen::Index b = 0; b < s.cols(); ++b) v.push_back(s(a, b));
            slices.push_back(v);
        }
        jc["slices"] = slices;
        cores.push_back(jc);
    }
    j["cores"] = cores;
    std::vector<double> leaf;
    for (Eigen::Index a = 0; a < tt.leaf.rows(); ++a)
        for (Eigen::Index b = 0; b < tt.leaf.cols(); ++b) leaf.push_back(tt.leaf(a, b));
    j["leaf"] = {{"rows", tt.leaf.rows()}, {"cols", tt.leaf.cols()}, {"data", leaf}};
    return j;
}

namespace detail {

inline Eigen::MatrixXd matrix_from(const json& v, int rows, int cols, const char* what) {
    if (!v.is_array() || static_cast<int>(v.size()) != rows * cols)
        throw FormatError(std::string("tt file: ") + what + " has the wrong number of entries");
    Eigen::MatrixXd M(rows, cols);
    for (int a = 0; a < rows; ++a)
        for (int b = 0; b < cols; ++b) M(a, b) = v.at(a * cols + b).get<double>();
    return M;
}

}  // namespace detail

inline TensorTrain tt_from_json(const json& j) {
    try {
        if (j.value("format", std::string()) != "qtt") throw FormatError("tt file: missing format tag \"qtt\"");
        const int b = j.at("base").get<int>();
        const int d = j.at("depth").get<int>();
        PolyBasis B(j.at("basis").at("degree").get<int>(),
                    basis_kind_from_string(j.at("basis").at("kind").get<std::string>()));
        TensorTrain tt{Grid(b, d), B, {}, {}};
        const auto& cores = j.at("cores");
        if (!cores.is_array() || static_cast<int>(cores.size()) != d) throw FormatError("tt file: need one core per level");
        for (const auto& jc : cores) {
            const int rl = jc.at("left").get<int>(), rr = jc.at("right").get<int>();
            const auto& sl = jc.at("slices");
            if (!sl.is_array() || static_cast<int>(sl.size()) != b) throw FormatError("tt file: need b slices per core");
            TTCore c(b, rl, rr);
            for (int i = 0; i < b; ++i) c.slices[i] = detail::matrix_from(sl.at(i), rl, rr, "core slice");
            tt.cores.push_back(std::move(c));
        }
        const auto& lf = j.at("leaf");
        tt.leaf = detail::matrix_from(lf.at("data"), lf.at("rows").get<int>(), lf.at("cols").get<int>(), "leaf");
        tt.validate();
        return tt;
    } catch (const FormatError&) {
        throw;
    } catch (const std::exception& e) {
        throw FormatError(std::string("tt file: ") + e.what());
    }
}

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw FormatError("'" + path + "' is not valid JSON: " + e.what());
    }
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << text;
}

// ------------------------------------------------------------------- splines

namespace detail {

/// "p/q" with q a power of b.
inline BadicKnot knot_from_fraction(const std::string& s, int b) {
    auto slash = s.find('/');
    if (slash == std::string::npos) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(s, &used);
        } catch (const std::exception&) {
            throw FormatError("cannot parse knot '" + s + "'");
        }
        if (used != s.size()) throw FormatError("cannot parse knot '" + s + "'");
        return knot_from_value(v, b);
    }
    long long p = 0, q = 0;
    try {
        p = std::stoll(s.substr(0, slash));
        q = std::stoll(s.substr(slash + 1));
    } catch (const std::exception&) {
        throw FormatError("cannot parse knot '" + s + "'");
    }
    if (q <= 0 || p < 0) throw FormatError("cannot parse knot '" + s + "'");
    int level = 0;
    long long r = q;
    while (r % b == 0) {
        r /= b;
        ++level;
    }
    if (p % r != 0) throw NonBadicKnot(static_cast<double>(p) / static_cast<double>(q), "knot " + s + " is not " + std::to_string(b) + "-adic");
    return normalize_knot({static_cast<std::uint64_t>(p / r), level}, b);
}

inline BadicKnot knot_from_json(const json& k, int b) {
    if (k.is_number()) return knot_from_value(k.get<double>(), b);
    if (k.is_string()) return knot_from_fraction(k.get<std::string>(), b);
    if (k.is_array() && k.size() == 2)
        return normalize_knot({k.at(0).get<std::uint64_t>(), k.at(1).get<int>()}, b);
    throw FormatError("knot must be a number, a \"p/q\" string or [index, level]");
}

}  // namespace detail

/// Spline document:
///   {"base": 2, "knots": [0, "5/8", 1],
///    "pieces": [{"coeffs": [...]}, {"local_coeffs": [...]}, ...]}
/// "coeffs" are monomial coefficients in x, "local_coeffs" in the local
/// coordinate t in [0,1) of the piece. Knots are numbers, "p/q" strings or
/// [index, level] pairs.
inline PiecewisePolynomial spline_from_json(const json& j, int default_base = 2) {
    try {
        const int b = j.value("base", default_base);
        if (b < 2) throw FormatError("spline: base must be >= 2");
        const auto& jk = j.at("knots");
        const auto& jp = j.at("pieces");
        if (!jk.is_array() || !jp.is_array() || jk.size() != jp.size() + 1)
            throw FormatError("spline: need one more knot than pieces");
        std::vector<BadicKnot> knots;
        for (const auto& k : jk) knots.push_back(detail::knot_from_json(k, b));
        std::vector<Polynomial> pieces;
        for (std::size_t k = 0; k < jp.size(); ++k) {
            const auto& pc = jp.at(k);
            if (pc.contains("local_coeffs")) {
                pieces.push_back(Polynomial::monomial(pc.at("local_coeffs").get<std::vector<double>>()));
            } else {
                Polynomial g = Polynomial::monomial(pc.at("coeffs").get<std::vector<double>>());
                const double a = knot_value(knots[k], b), c = knot_value(knots[k + 1], b) - a;
                pieces.push_back(affine_compose(g, a, c, PolyBasis(g.degree(), BasisKind::monomial)));
            }
        }
        // pad to a common degree
        int m = 0;
        for (const auto& p : pieces) m = std::max(m, p.degree());
        for (auto& p : pieces) p = to_basis(p, PolyBasis(m, BasisKind::monomial));
        PiecewisePolynomial s(b, std::move(knots), std::move(pieces));
        s.validate();
        return s;
    } catch (const FormatError&) {
        throw;
    } catch (const NonBadicKnot&) {
        throw;
    } catch (const std::exception& e) {
        throw FormatError(std::string("spline: ") + e.what());
    }
}

inline json spline_to_json(const PiecewisePolynomial& s) {
    json j;
    j["base"] = s.base;
    json knots = json::array();
    for (const auto& k : s.knots) knots.push_back({k.index, k.level});
    j["knots"] = knots;
    json pieces = json::array();
    for (const auto& p : s.pieces) {
        Polynomial q = to_basis(p, PolyBasis(p.degree(), BasisKind::monomial));
        pieces.push_back({{"local_coeffs", std::vector<double>(q.coeffs.data(), q.coeffs.data() + q.coeffs.size())}});
    }
    j["pieces"] = pieces;
    return j;
}

// -------------------------------------------------------------------- reports

inline json complexity_to_json(const ComplexityReport& c) {
    return {{"cost_N", c.cost_N}, {"cost_C", c.cost_C}, {"cost_S", c.cost_S}, {"stored_ranks", c.ranks.ranks}};
}

inline json audit_to_json(const AuditRecord& r) {
    return {{"instance", r.instance}, {"params", r.params}, {"measured", r.measured}, {"bound", r.bound}, {"pass", r.pass}};
}

inline json record_to_json(const ErrorRecord& r) {
    return {{"study", r.study},         {"target", r.target}, {"b", r.b},
            {"m", r.m},                 {"p", p_to_json(r.p)}, {"n", r.n},
            {"cost_kind", r.cost_kind}, {"depth", r.depth},   {"degree", r.degree},
            {"error", r.error},         {"seconds", r.seconds}, {"seed", r.seed},
            {"measured_cost", r.measured_cost}};
}

inline json config_to_json(const StudyConfig& c) {
    return {{"study", c.study},       {"target", c.target},         {"b", c.b},
            {"m", c.m},               {"mbar", c.mbar},             {"p", p_to_json(c.p)},
            {"r", c.r},               {"schedule", c.schedule},     {"schedule_n", c.schedule_n},
            {"quad_order", c.quad_order}, {"max_depth", c.max_depth}, {"seed", c.seed}};
}

inline const char* kCsvHeader = "study,target,b,m,p,n,cost_kind,depth,degree,error,seconds,seed";

/// One row per record; `with_timing = false` leaves the seconds column empty.
inline void write_csv(std::ostream& out, const std::vector<ErrorRecord>& rs, bool with_timing = true) {
    out << kCsvHeader << '\n';
    for (const auto& r : rs) {
        std::string target = r.target;
        if (target.find_first_of(",\"") != std::string::npos) {
            std::string q = "\"";
            for (char ch : target) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
            target = q + "\"";
        }
        out << r.study << ',' << target << ',' << r.b << ',' << r.m << ',' << format_double(r.p) << ',' << r.n << ','
            << r.cost_kind << ',' << r.depth << ',' << r.degree << ',' << format_double(r.error) << ','
            << (with_timing ? format_double(r.seconds) : std::string()) << ',' << r.seed << '\n';
    }
}

}  // namespace qtt
