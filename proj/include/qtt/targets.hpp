#pragma once
/// @file targets.hpp
/// @brief Builtin target functions with their derivatives and smoothness data.

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "qtt/encoders.hpp"
#include "qtt/piecewise.hpp"
#include "qtt/quadrature.hpp"

namespace qtt {

struct UnknownTarget : std::invalid_argument {
    explicit UnknownTarget(const std::string& id) : std::invalid_argument("unknown target '" + id + "'") {}
};

/// A function on [0,1) plus what is known about it analytically.
struct Target {
    std::string id;
    Sampler f;
    /// k-th derivative at x; empty when not available.
    std::function<double(int, double)> derivative;
    /// Sobolev order of smoothness (infinity for analytic targets).
    double smoothness = std::numeric_limits<double>::infinity();
    /// Bernstein ellipse parameter of analyticity on [0,1]; 0 when not analytic.
    double rho = 0.0;
    /// Exponent of a point singularity x^alpha; 0 when there is none.
    double alpha = 0.0;
    /// Exact b-adic spline representation, when the target is one.
    std::optional<PiecewisePolynomial> spline;
};

namespace detail {

/// rho of the ellipse through a real pole at x0 outside [0,1] (shifted to [-1,1]).
inline double ellipse_for_pole(double x0) {
    double t = std::abs(2.0 * x0 - 1.0);
    return t + std::sqrt(t * t - 1.0);
}

inline double falling(double a, int k) {
    double v = 1.0;
    for (int i = 0; i < k; ++i) v *= a - i;
    return v;
}

inline std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            throw std::invalid_argument("cannot parse number '" + item + "'");
        }
        if (used != item.size()) throw std::invalid_argument("cannot parse number '" + item + "'");
        out.push_back(v);
    }
    if (out.empty()) throw std::invalid_argument("empty coefficient list");
    return out;
}

inline Target from_spline(std::string id, PiecewisePolynomial s) {
    Target t;
    t.id = std::move(id);
    t.smoothness = 0.0;
    t.spline = s;
    t.f = [s = std::move(s)](double x) { return s(x); };
    return t;
}

}  // namespace detail

/// Builtin identifiers.
inline std::vector<std::string> builtin_target_names() {
    return {"sin2pi", "inv_xplus2", "exp", "x_pow:<alpha>", "sqrt", "haar", "hat", "sawtooth[:d]", "poly:<c0,c1,...>"};
}

/// Resolve an identifier. `depth` is used by depth-dependent targets
/// (the sawtooth) when the identifier does not carry one.
inline Target make_target(const std::string& id, int depth = 4) {
    Target t;
    t.id = id;
    if (id == "sin2pi") {
        constexpr double w = 2.0 * std::numbers::pi;
        t.f = [](double x) { return std::sin(w * x); };
        t.derivative = [](int k, double x) { return std::pow(w, k) * std::sin(w * x + k * std::numbers::pi / 2.0); };
        return t;
    }
    if (id == "inv_xplus2") {
        t.f = [](double x) { return 1.0 / (x + 2.0); };
        t.derivative = [](int k, double x) {
            return (k % 2 ? -1.0 : 1.0) * std::tgamma(k + 1.0) / std::pow(x + 2.0, k + 1);
        };
        t.rho = detail::ellipse_for_pole(-2.0);
        return t;
    }
    if (id == "exp") {
        t.f = [](double x) { return std::exp(x); };
        t.derivative = [](int, double x) { return std::exp(x); };
        t.rho = std::numeric_limits<double>::infinity();
        return t;
    }
    if (id == "sqrt" || id.rfind("x_pow:", 0) == 0) {
        double a = 0.5;
        if (id != "sqrt") {
            auto v = detail::parse_list(id.substr(6));
            if (v.size() != 1 || !(v[0] > 0.0)) throw std::invalid_argument("x_pow needs one positive exponent");
            a = v[0];
        }
        t.f = [a](double x) { return std::pow(x, a); };
        t.derivative = [a](int k, double x) { return detail::falling(a, k) * std::pow(x, a - k); };
        t.alpha = a;
        t.smoothness = a;  // W^{k,p} only for k < a + 1/p
        return t;
    }
    if (id == "haar") return detail::from_spline(id, haar_spline());
    if (id == "hat") return detail::from_spline(id, hat_spline());
    if (id == "sawtooth" || id.rfind("sawtooth:", 0) == 0) {
        int d = depth;
        if (id != "sawtooth") {
            auto v = detail::parse_list(id.substr(9));
            if (v.size() != 1 || v[0] < 1 || v[0] != std::floor(v[0])) throw std::invalid_argument("sawtooth needs a depth >= 1");
            d = static_cast<int>(v[0]);
        }
        Target s;
        s.id = id;
        s.f = sawtooth_sampler(d);
        s.smoothness = 0.0;
        return s;
    }
    if (id.rfind("poly:", 0) == 0) {
        Polynomial p = Polynomial::monomial(detail::parse_list(id.substr(5)));
        t.f = [p](double x) { return p(x); };
        t.derivative = [p](int k, double x) {
            double v = 0.0;
            const int m = p.degree();
            for (int i = m; i >= k; --i) v = v * x + detail::falling(i, k) * p.coeffs(i);
            return v;
        };
        t.rho = std::numeric_limits<double>::infinity();
        t.spline = PiecewisePolynomial::uniform(2, 0, {p});
        return t;
    }
    throw UnknownTarget(id);
}

/// |f|_{W^{k,p}} = ||f^(k)||_p by composite Gauss-Legendre quadrature of the
/// supplied derivative (p = infinity by dense sampling).
inline double sobolev_seminorm(const Target& t, int k, double p, int panels = 64, int order = 16) {
    if (!t.derivative) throw std::invalid_argument("target '" + t.id + "' has no analytic derivative");
    const auto& rule = gauss_legendre(order);
    if (std::isinf(p)) {
        double best = 0.0;
        const int n = panels * order;
        for (int i = 0; i <= n; ++i) best = std::max(best, std::abs(t.derivative(k, std::min(i / double(n), 1.0))));
        return best;
    }
    double s = 0.0;
    for (int j = 0; j < panels; ++j)
        for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
            double x = (j + rule.nodes[q]) / panels;
            s += rule.weights[q] / panels * std::pow(std::abs(t.derivative(k, x)), p);
        }
    return std::pow(s, 1.0 / p);
}

}  // namespace qtt
