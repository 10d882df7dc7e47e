#pragma once
/// @file piecewise.hpp
/// @brief Piecewise polynomials with b-adic breakpoints.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qtt/poly_basis.hpp"
#include "qtt/tensorization.hpp"

namespace qtt {

/// Knot i * b^{-level}, kept in lowest terms (i not divisible by b unless level == 0).
struct BadicKnot {
    std::uint64_t index = 0;
    int level = 0;

    friend bool operator==(const BadicKnot&, const BadicKnot&) = default;
};

inline BadicKnot normalize_knot(BadicKnot k, int b) {
    while (k.level > 0 && k.index % static_cast<std::uint64_t>(b) == 0) {
        k.index /= static_cast<std::uint64_t>(b);
        --k.level;
    }
    return k;
}

inline double knot_value(const BadicKnot& k, int b) {
    return static_cast<double>(k.index) / static_cast<double>(Grid::ipow(b, k.level));
}

/// Thrown when a breakpoint is not of the form i * b^{-k}.
struct NonBadicKnot : std::invalid_argument {
    double value;
    NonBadicKnot(double v, const std::string& msg) : std::invalid_argument(msg), value(v) {}
};

/// Recover (i, level) from a double knot; the knot must be exactly b-adic up to
/// relative 1e-13 at some level <= max_level.
inline BadicKnot knot_from_value(double x, int b, int max_level = 40) {
    if (!(x >= 0.0 && x <= 1.0)) throw NonBadicKnot(x, "knot " + std::to_string(x) + " outside [0,1]");
    for (int l = 0; l <= max_level; ++l) {
        if (l * std::log2(static_cast<double>(b)) > 52.0) break;
        double scaled = x * static_cast<double>(Grid::ipow(b, l));
        double r = std::round(scaled);
        // rounding error of x grows with b^l; stop once it can no longer separate neighbours
        const double tol = std::max(1e-13, 64.0 * std::numeric_limits<double>::epsilon() * scaled);
        if (tol > 1e-3) break;
        if (std::abs(scaled - r) <= tol)
            return normalize_knot({static_cast<std::uint64_t>(r), l}, b);
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    throw NonBadicKnot(x, std::string("knot ") + buf + " is not " + std::to_string(b) + "-adic");
}

/// Spline on [0,1) with b-adic breakpoints 0 = x_0 < ... < x_N = 1. Piece k is a
/// polynomial in the local variable t = (x - x_k) / (x_{k+1} - x_k) in [0,1).
struct PiecewisePolynomial {
    int base = 2;
    std::vector<BadicKnot> knots;  // N+1 entries, first 0 and last 1
    std::vector<Polynomial> pieces;

    PiecewisePolynomial() = default;
    PiecewisePolynomial(int b, std::vector<BadicKnot> k, std::vector<Polynomial> p)
        : base(b), knots(std::move(k)), pieces(std::move(p)) {
        for (auto& kn : knots) kn = normalize_knot(kn, base);
        validate();
    }

    std::size_t size() const { return pieces.size(); }

    int degree() const {
        int m = 0;
        for (const auto& p : pieces) m = std::max(m, p.degree());
        return m;
    }

    /// Largest knot level (the depth at which every piece is a union of leaves).
    int max_level() const {
        int d = 0;
        for (const auto& k : knots) d = std::max(d, k.level);
        return d;
    }

    /// Knot position as an integer at the given level (level >= max_level()).
    std::uint64_t knot_at_level(std::size_t k, int level) const {
        return knots[k].index * Grid::ipow(base, level - knots[k].level);
    }

    void validate() const {
        if (base < 2) throw std::invalid_argument("PiecewisePolynomial: base must be >= 2");
        if (pieces.empty()) throw std::invalid_argument("PiecewisePolynomial: no pieces");
        if (knots.size() != pieces.size() + 1)
            throw std::invalid_argument("PiecewisePolynomial: need one more knot than pieces");
        if (!(knots.front() == BadicKnot{0, 0}) || !(knots.back() == BadicKnot{1, 0}))
            throw std::invalid_argument("PiecewisePolynomial: knots must start at 0 and end at 1");
        const int L = max_level();
        Grid(base, L);  // depth guard
        for (std::size_t k = 0; k + 1 < knots.size(); ++k)
            if (knot_at_level(k, L) >= knot_at_level(k + 1, L))
                throw std::invalid_argument("PiecewisePolynomial: knots not strictly increasing");
    }

    std::size_t piece_index(double x) const {
        auto it = std::upper_bound(knots.begin() + 1, knots.end() - 1, x,
                                   [this](double v, const BadicKnot& k) { return v < knot_value(k, base); });
        return static_cast<std::size_t>(it - knots.begin()) - 1;
    }

    double operator()(double x) const {
        if (!(x >= 0.0 && x < 1.0)) throw std::domain_error("PiecewisePolynomial: x outside [0,1)");
        std::size_t k = piece_index(x);
        double a = knot_value(knots[k], base), c = knot_value(knots[k + 1], base);
        return pieces[k]((x - a) / (c - a));
    }

    /// True if the breakpoints are exactly {k b^{-d}}.
    bool is_uniform(int d) const {
        if (pieces.size() != Grid::ipow(base, d)) return false;
        for (std::size_t k = 0; k < knots.size(); ++k)
            if (knots[k].level > d || knot_at_level(k, d) != k) return false;
        return true;
    }

    static PiecewisePolynomial uniform(int b, int d, std::vector<Polynomial> pieces) {
        const std::uint64_t n = Grid::ipow(b, d);
        if (pieces.size() != n) throw std::invalid_argument("uniform spline: need b^d pieces");
        std::vector<BadicKnot> k;
        for (std::uint64_t j = 0; j <= n; ++j) k.push_back({j, d});
        return PiecewisePolynomial(b, std::move(k), std::move(pieces));
    }
};

/// q(y) = p(a + c*y) in `target` (degree >= p.degree()).
inline Polynomial affine_compose(const Polynomial& p, double a, double c, const PolyBasis& target) {
    if (target.degree < p.degree()) throw std::invalid_argument("affine_compose: target degree too small");
    if (p.basis.kind == BasisKind::monomial && target.kind == BasisKind::monomial) {
        // expand sum_k p_k (a + c y)^k exactly via the binomial theorem
        Eigen::VectorXd q = Eigen::VectorXd::Zero(target.dim());
        for (int k = 0; k <= p.degree(); ++k)
            for (int l = 0; l <= k; ++l)
                q(l) += p.coeffs(k) * binomial(k, l) * std::pow(a, k - l) * std::pow(c, l);
        return Polynomial(target, q);
    }
    auto ys = chebyshev_points(target.dim());
    Eigen::VectorXd v(ys.size());
    for (std::size_t i = 0; i < ys.size(); ++i) v(i) = p(a + c * ys[i]);
    return Polynomial(target, fit_values(target, ys, v));
}

/// Restriction of piece k to the sub-interval [lo, hi) given as integers at `level`,
/// rescaled to [0,1).
inline Polynomial piece_on(const PiecewisePolynomial& s, std::size_t k, int level, std::uint64_t lo,
                           std::uint64_t hi, const PolyBasis& target) {
    const double K0 = static_cast<double>(s.knot_at_level(k, level));
    const double width = static_cast<double>(s.knot_at_level(k + 1, level)) - K0;
    return affine_compose(s.pieces[k], (static_cast<double>(lo) - K0) / width,
                          static_cast<double>(hi - lo) / width, target);
}

/// Leaf polynomials of s at depth d >= s.max_level(), in `target`.
inline std::vector<Polynomial> leaf_polynomials(const PiecewisePolynomial& s, int d, const PolyBasis& target) {
    if (d < s.max_level()) throw std::invalid_argument("leaf_polynomials: depth below knot level");
    const std::uint64_t n = Grid(s.base, d).leaves();
    std::vector<Polynomial> out;
    out.reserve(n);
    std::size_t k = 0;
    for (std::uint64_t j = 0; j < n; ++j) {
        while (s.knot_at_level(k + 1, d) <= j) ++k;
        out.push_back(piece_on(s, k, d, j, j + 1, target));
    }
    return out;
}

}  // namespace qtt
