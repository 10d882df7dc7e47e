#pragma once
/// @file tensorization.hpp
/// @brief Base-b digit expansion of points in [0,1), leaf restrictions and
///        the leaf-sum formula for L^p norms.

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace qtt {

using Sampler = std::function<double(double)>;

/// Base b and depth d of a tensorization.
struct Grid {
    int base = 2;
    int depth = 0;

    Grid() = default;
    Grid(int b, int d) : base(b), depth(d) { validate(); }

    void validate() const {
        if (base < 2) throw std::invalid_argument("grid: base must be >= 2");
        if (depth < 0) throw std::invalid_argument("grid: depth must be >= 0");
        // b^d must fit comfortably in a 64-bit index and be exact in a double
        double bits = depth * std::log2(static_cast<double>(base));
        if (bits > 52.0) throw std::invalid_argument("grid: b^d too large");
    }

    /// Number of leaves b^d.
    std::uint64_t leaves() const { return ipow(base, depth); }

    /// Width b^-d of one leaf interval.
    double leaf_width() const { return std::pow(static_cast<double>(base), -depth); }

    static std::uint64_t ipow(std::uint64_t b, int e) {
        std::uint64_t r = 1;
        for (int k = 0; k < e; ++k) r *= b;
        return r;
    }

    friend bool operator==(const Grid&, const Grid&) = default;
};

/// A point of [0,1) written as digits (i_1,...,i_d) plus a remainder y in [0,1).
struct MultiIndexPoint {
    Grid grid;
    std::vector<int> digits;
    double remainder = 0.0;
};

/// Flat leaf index j = sum_k i_k b^(d-k).
struct LeafIndex {
    Grid grid;
    std::uint64_t flat = 0;
};

inline std::uint64_t flat_index(std::span<const int> digits, int base) {
    std::uint64_t j = 0;
    for (int i : digits) j = j * static_cast<std::uint64_t>(base) + static_cast<std::uint64_t>(i);
    return j;
}

inline std::vector<int> leaf_digits(const LeafIndex& leaf) {
    std::vector<int> digits(leaf.grid.depth);
    std::uint64_t j = leaf.flat;
    for (int k = leaf.grid.depth - 1; k >= 0; --k) {
        digits[k] = static_cast<int>(j % leaf.grid.base);
        j /= leaf.grid.base;
    }
    return digits;
}

/// Digits by repeated multiply-by-b and floor. Floating point ties go to the
/// lower digit, so a digit never equals b.
inline MultiIndexPoint encode_point(double x, const Grid& grid) {
    if (!(x >= 0.0) || !(x < 1.0))
        throw std::domain_error("encode_point: x must lie in [0,1), got " + std::to_string(x));
    MultiIndexPoint p{grid, std::vector<int>(grid.depth), 0.0};
    const double b = grid.base;
    double t = x;
    for (int k = 0; k < grid.depth; ++k) {
        t *= b;
        double fl = std::floor(t);
        int i = static_cast<int>(fl);
        if (i >= grid.base) i = grid.base - 1;
        p.digits[k] = i;
        t -= i;
    }
    if (t >= 1.0) t = std::nextafter(1.0, 0.0);
    if (t < 0.0) t = 0.0;
    p.remainder = t;
    return p;
}

/// sum_k i_k b^-k + b^-d y, evaluated by Horner from the deepest digit.
inline double decode_point(const MultiIndexPoint& p) {
    if (static_cast<int>(p.digits.size()) != p.grid.depth)
        throw std::domain_error("decode_point: digit count differs from depth");
    if (!(p.remainder >= 0.0) || !(p.remainder < 1.0))
        throw std::domain_error("decode_point: remainder must lie in [0,1)");
    const double b = p.grid.base;
    double v = p.remainder;
    for (int k = p.grid.depth - 1; k >= 0; --k) {
        int i = p.digits[k];
        if (i < 0 || i >= p.grid.base) throw std::domain_error("decode_point: digit out of range");
        v = (i + v) / b;
    }
    return v;
}

/// Left endpoint x and width h of leaf j.
inline double leaf_left(const Grid& grid, std::uint64_t j) {
    return static_cast<double>(j) / static_cast<double>(grid.leaves());
}

/// Point of leaf j at local coordinate y. y = 1 maps to the largest double
/// below the right endpoint, i.e. the left limit of the leaf.
inline double leaf_point(const Grid& grid, std::uint64_t j, double y) {
    const double n = static_cast<double>(grid.leaves());
    const double right = (static_cast<double>(j) + 1.0) / n;
    if (y >= 1.0) return std::nextafter(right, 0.0);
    // j + y may round up to j + 1 when y is just below 1
    const double x = (static_cast<double>(j) + y) / n;
    return x < right ? x : std::nextafter(right, 0.0);
}

/// g(y) = f(b^-d (j + y)). At y = 1 the sampler returns the left limit.
inline Sampler leaf_restriction(Sampler f, const Grid& grid, const LeafIndex& j) {
    if (j.flat >= grid.leaves()) throw std::domain_error("leaf_restriction: leaf index out of range");
    const std::uint64_t flat = j.flat;
    return [f = std::move(f), grid, flat](double y) { return f(leaf_point(grid, flat, y)); };
}

inline Sampler leaf_restriction(Sampler f, const Grid& grid, std::uint64_t j) {
    return leaf_restriction(std::move(f), grid, LeafIndex{grid, j});
}

/// (sum_j b^-d n_j^p)^(1/p), or max_j n_j for p = inf.
inline double lp_norm_from_leaves(std::span<const double> leaf_norms, const Grid& grid, double p) {
    if (!(p > 0.0)) throw std::domain_error("lp_norm_from_leaves: p must be positive");
    if (leaf_norms.size() != grid.leaves())
        throw std::invalid_argument("lp_norm_from_leaves: expected b^d leaf norms");
    if (std::isinf(p)) {
        double m = 0.0;
        for (double v : leaf_norms) m = std::max(m, v);
        return m;
    }
    const double w = grid.leaf_width();
    double s = 0.0;
    for (double v : leaf_norms) s += w * std::pow(v, p);
    return std::pow(s, 1.0 / p);
}

}  // namespace qtt
