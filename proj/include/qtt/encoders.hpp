#pragma once
/// @file encoders.hpp
/// @brief Exact tensor-train constructions: polynomials, fixed- and free-knot
/// splines, dilated wavelets and the sawtooth.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include "qtt/piecewise.hpp"
#include "qtt/tensor_train.hpp"

namespace qtt {

// ---------------------------------------------------------------- polynomials

/// Exact train of p on `grid`, leaf basis of degree p.degree() and the given kind.
/// Core 1 is c^T A(i), cores 2..d are A(i) and the leaf is the identity, where A(i)
/// restricts the leaf basis to the i-th subinterval.
inline TensorTrain encode_polynomial(const Polynomial& p, const Grid& grid, BasisKind kind = BasisKind::legendre) {
    PolyBasis B(p.degree(), kind);
    Polynomial q = to_basis(p, B);
    TensorTrain root{Grid(grid.base, 0), B, {}, q.coeffs.transpose()};
    return deepen(root, grid.depth);
}

/// Convenience overload: monomial coefficients c_0, c_1, ...
inline TensorTrain encode_polynomial(const std::vector<double>& monomial_coeffs, const Grid& grid,
                                     BasisKind kind = BasisKind::legendre) {
    return encode_polynomial(Polynomial::monomial(monomial_coeffs), grid, kind);
}

// ------------------------------------------------------------ fixed-knot splines

namespace detail {

inline int uniform_depth(const PiecewisePolynomial& s) {
    std::uint64_t n = 1;
    int d = 0;
    while (n < s.size()) {
        n *= static_cast<std::uint64_t>(s.base);
        ++d;
    }
    if (!s.is_uniform(d)) throw std::invalid_argument("fixed-knot spline: breakpoints must be {k b^-d}");
    return d;
}

inline Eigen::MatrixXd coefficient_rows(const std::vector<Polynomial>& polys) {
    Eigen::MatrixXd C(polys.size(), polys.front().basis.dim());
    for (std::size_t j = 0; j < polys.size(); ++j) C.row(j) = polys[j].coeffs.transpose();
    return C;
}

}  // namespace detail

/// Spline with N = b^d uniform pieces. The first levels select the prefix
/// (rank b^nu) while b^nu <= (m+1) b^{d-nu}; after that the state is a suffix
/// index paired with a leaf coefficient (rank (m+1) b^{d-nu}).
inline TensorTrain encode_fixed_knot_spline(const PiecewisePolynomial& s, BasisKind kind = BasisKind::legendre) {
    const int d = detail::uniform_depth(s);
    const int b = s.base;
    PolyBasis B(s.degree(), kind);
    const int n = B.dim();
    Eigen::MatrixXd C = detail::coefficient_rows(leaf_polynomials(s, d, B));

    int nstar = 0;
    while (nstar < d && Grid::ipow(b, nstar + 1) <= static_cast<std::uint64_t>(n) * Grid::ipow(b, d - nstar - 1))
        ++nstar;

    TensorTrain tt{Grid(b, d), B, {}, {}};
    for (int nu = 1; nu <= nstar; ++nu) {
        const int rl = static_cast<int>(Grid::ipow(b, nu - 1));
        TTCore c(b, rl, rl * b);
        for (int i = 0; i < b; ++i)
            for (int j = 0; j < rl; ++j) c(i, j, j * b + i) = 1.0;
        tt.cores.push_back(std::move(c));
    }
    if (nstar == d) {
        tt.leaf = C;
        return tt;
    }
    {
        const int nu = nstar + 1;
        const int rl = static_cast<int>(Grid::ipow(b, nstar));
        const std::uint64_t rest = Grid::ipow(b, d - nu);
        TTCore c(b, rl, n * static_cast<int>(rest));
        for (int i = 0; i < b; ++i)
            for (int j = 0; j < rl; ++j)
                for (std::uint64_t t = 0; t < rest; ++t)
                    for (int k = 0; k < n; ++k)
                        c(i, j, static_cast<int>(t) * n + k) = C(static_cast<Eigen::Index>(
                                                                      (j * Grid::ipow(b, d - nstar)) + i * rest + t),
                                                                  k);
        tt.cores.push_back(std::move(c));
    }
    for (int nu = nstar + 2; nu <= d; ++nu) {
        const std::uint64_t rest = Grid::ipow(b, d - nu);
        TTCore c(b, n * static_cast<int>(rest * b), n * static_cast<int>(rest));
        for (int i = 0; i < b; ++i)
            for (std::uint64_t t = 0; t < rest; ++t)
                for (int k = 0; k < n; ++k)
                    c(i, static_cast<int>(i * rest + t) * n + k, static_cast<int>(t) * n + k) = 1.0;
        tt.cores.push_back(std::move(c));
    }
    tt.leaf = Eigen::MatrixXd::Identity(n, n);
    return tt;
}

/// The same spline written with b^d uniform pieces (d >= s.max_level()).
inline PiecewisePolynomial refine_uniform(const PiecewisePolynomial& s, int d) {
    PolyBasis B(s.degree(), BasisKind::monomial);
    return PiecewisePolynomial::uniform(s.base, d, leaf_polynomials(s, d, B));
}

// ------------------------------------------------------------- free-knot splines

namespace detail {

inline std::size_t piece_containing(const PiecewisePolynomial& s, int level, std::uint64_t pos) {
    std::size_t lo = 0, hi = s.size();
    while (hi - lo > 1) {
        std::size_t mid = (lo + hi) / 2;
        if (s.knot_at_level(mid, level) <= pos)
            lo = mid;
        else
            hi = mid;
    }
    return lo;
}

}  // namespace detail

/// Exact train of a free b-adic knot spline on depth d = s.max_level().
/// The state after nu digits is either a polynomial state (leaf coefficient
/// of the local polynomial) or, for each level-nu interval with a knot in its
/// interior, a dedicated state. Stored ranks are (m+1) + #split intervals <= m+N.
inline TensorTrain encode_free_knot_spline(const PiecewisePolynomial& s, BasisKind kind = BasisKind::legendre) {
    const int b = s.base;
    const int D = s.max_level();
    PolyBasis B(s.degree(), kind);
    const int n = B.dim();
    if (D == 0) {
        TensorTrain root{Grid(b, 0), B, {}, to_basis(s.pieces[0], B).coeffs.transpose()};
        return root;
    }
    // split intervals per level
    std::vector<std::vector<std::uint64_t>> split(D + 1);
    for (int nu = 0; nu <= D; ++nu) {
        const std::uint64_t w = Grid::ipow(b, D - nu);
        for (std::size_t k = 1; k + 1 < s.knots.size(); ++k) {
            std::uint64_t K = s.knot_at_level(k, D);
            if (K % w != 0) split[nu].push_back(K / w);
        }
        std::sort(split[nu].begin(), split[nu].end());
        split[nu].erase(std::unique(split[nu].begin(), split[nu].end()), split[nu].end());
    }
    auto split_col = [&](int nu, std::uint64_t j) -> int {
        auto it = std::lower_bound(split[nu].begin(), split[nu].end(), j);
        if (it == split[nu].end() || *it != j) return -1;
        return n + static_cast<int>(it - split[nu].begin());
    };
    std::vector<Eigen::MatrixXd> A(b);
    for (int i = 0; i < b; ++i) A[i] = restriction_matrix(B, b, i);

    TensorTrain tt{Grid(b, D), B, {}, Eigen::MatrixXd::Identity(n, n)};
    for (int nu = 1; nu <= D; ++nu) {
        const int rl = (nu == 1) ? 1 : n + static_cast<int>(split[nu - 1].size());
        const int rr = n + static_cast<int>(split[nu].size());
        TTCore c(b, rl, rr);
        const std::uint64_t w = Grid::ipow(b, D - nu);
        if (nu > 1)
            for (int i = 0; i < b; ++i) c.slices[i].topLeftCorner(n, n) = A[i];
        // rows for split states of level nu-1 (the root at level 0 is always split)
        for (std::size_t r = 0; r < split[nu - 1].size(); ++r) {
            const int row = (nu == 1) ? 0 : n + static_cast<int>(r);
            const std::uint64_t parent = split[nu - 1][r];
            for (int i = 0; i < b; ++i) {
                const std::uint64_t child = parent * b + i;
                int col = split_col(nu, child);
                if (col >= 0) {
                    c(i, row, col) = 1.0;
                    continue;
                }
                const std::uint64_t lo = child * w, hi = lo + w;
                std::size_t k = detail::piece_containing(s, D, lo);
                Polynomial q = piece_on(s, k, D, lo, hi, B);
                for (int l = 0; l < n; ++l) c(i, row, l) = q.coeffs(l);
            }
        }
        tt.cores.push_back(std::move(c));
    }
    return tt;
}

/// One summand of the sparse free-knot representation: piece `piece`
/// restricted to the b-adic interval [prefix, prefix+1) * b^{-level}.
struct FreeKnotTerm {
    std::size_t piece = 0;
    int level = 0;
    std::uint64_t prefix = 0;
};

/// Minimal decomposition of [lo, hi) (integers at `level`) into aligned b-adic
/// intervals, left to right: at each position take the largest aligned block.
inline std::vector<std::pair<int, std::uint64_t>> badic_decomposition(std::uint64_t lo, std::uint64_t hi, int level,
                                                                      int b) {
    std::vector<std::pair<int, std::uint64_t>> out;
    std::uint64_t x = lo;
    while (x < hi) {
        int e = 0;
        std::uint64_t w = 1;
        while (e < level && x % (w * b) == 0 && x + w * b <= hi) {
            w *= b;
            ++e;
        }
        out.emplace_back(level - e, x / w);
        x += w;
    }
    return out;
}

inline std::vector<FreeKnotTerm> free_knot_terms(const PiecewisePolynomial& s) {
    const int D = s.max_level();
    std::vector<FreeKnotTerm> terms;
    for (std::size_t k = 0; k < s.size(); ++k)
        for (auto [lvl, pre] : badic_decomposition(s.knot_at_level(k, D), s.knot_at_level(k + 1, D), D, s.base))
            terms.push_back({k, lvl, pre});
    return terms;
}

/// Train of one term: delta cores selecting the prefix, then the local polynomial.
inline TensorTrain free_knot_term_train(const PiecewisePolynomial& s, const FreeKnotTerm& t, const PolyBasis& B) {
    const int b = s.base;
    const int D = s.max_level();
    const std::uint64_t w = Grid::ipow(b, D - t.level);
    Polynomial q = piece_on(s, t.piece, D, t.prefix * w, (t.prefix + 1) * w, B);
    TensorTrain local{Grid(b, 0), B, {}, q.coeffs.transpose()};
    TensorTrain tail = deepen(local, D - t.level);
    TensorTrain out{Grid(b, D), B, {}, tail.leaf};
    auto digits = leaf_digits(LeafIndex{Grid(b, t.level), t.prefix});
    for (int l = 0; l < t.level; ++l) {
        TTCore c(b, 1, 1);
        c(digits[l], 0, 0) = 1.0;
        out.cores.push_back(std::move(c));
    }
    for (auto& c : tail.cores) out.cores.push_back(std::move(c));
    return out;
}

/// The sparse representation as an explicit block sum. Sizes grow with the
/// number of terms; intended for moderate inputs.
inline TensorTrain encode_free_knot_spline_sparse(const PiecewisePolynomial& s,
                                                  BasisKind kind = BasisKind::legendre) {
    PolyBasis B(s.degree(), kind);
    std::vector<TensorTrain> parts;
    for (const auto& t : free_knot_terms(s)) parts.push_back(free_knot_term_train(s, t, B));
    return block_sum(parts);
}

// ------------------------------------------------------------------- wavelets

/// b^{l/p} psi(b^l x - j) for a mother psi given as a train.
struct WaveletSpec {
    TensorTrain mother;
    int level = 0;
    std::uint64_t shift = 0;
    double p = 2.0;
};

inline TensorTrain encode_dilated(const WaveletSpec& w, int target_depth) {
    const int b = w.mother.grid.base;
    if (w.level < 0) throw std::invalid_argument("encode_dilated: negative level");
    if (w.shift >= Grid::ipow(b, w.level)) throw std::invalid_argument("encode_dilated: shift >= b^level");
    if (target_depth < w.level + w.mother.depth())
        throw std::invalid_argument("encode_dilated: target depth below level + mother depth");
    if (!(w.p > 0.0)) throw std::invalid_argument("encode_dilated: p must be positive");
    TensorTrain inner = deepen(w.mother, target_depth - w.level - w.mother.depth());
    TensorTrain out{Grid(b, target_depth), w.mother.basis, {}, inner.leaf};
    const double factor = std::pow(static_cast<double>(b), 1.0 / w.p);
    auto digits = leaf_digits(LeafIndex{Grid(b, w.level), w.shift});
    for (int l = 0; l < w.level; ++l) {
        TTCore c(b, 1, 1);
        c(digits[l], 0, 0) = factor;
        out.cores.push_back(std::move(c));
    }
    for (auto& c : inner.cores) out.cores.push_back(std::move(c));
    return out;
}

/// Sum of c_lambda * psi_lambda at a common depth.
inline TensorTrain n_term_wavelet(const std::vector<std::pair<double, WaveletSpec>>& terms, int target_depth) {
    if (terms.empty()) throw std::invalid_argument("n_term_wavelet: no terms");
    const int b = terms.front().second.mother.grid.base;
    int m = 0;
    for (const auto& [c, w] : terms) {
        if (w.mother.grid.base != b) throw std::invalid_argument("n_term_wavelet: mixed bases");
        m = std::max(m, w.mother.basis.degree);
    }
    PolyBasis B(m, terms.front().second.mother.basis.kind);
    std::vector<TensorTrain> parts;
    for (const auto& [c, w] : terms) {
        TensorTrain t = scale(encode_dilated(w, target_depth), c);
        parts.push_back(t.basis == B ? t : change_leaf_basis(t, B));
    }
    return block_sum(parts);
}

/// Haar mother on [0,1): -1 on [0,1/2), +1 on [1/2,1).
inline PiecewisePolynomial haar_spline() {
    return PiecewisePolynomial::uniform(2, 1, {Polynomial::monomial({-1.0}), Polynomial::monomial({1.0})});
}

/// Hat: 2x on [0,1/2), 2-2x on [1/2,1).
inline PiecewisePolynomial hat_spline() {
    return PiecewisePolynomial::uniform(2, 1, {Polynomial::monomial({0.0, 1.0}), Polynomial::monomial({1.0, -1.0})});
}

inline TensorTrain haar_mother(BasisKind kind = BasisKind::legendre) {
    return encode_fixed_knot_spline(haar_spline(), kind);
}
inline TensorTrain hat_mother(BasisKind kind = BasisKind::legendre) {
    return encode_fixed_knot_spline(hat_spline(), kind);
}

/// Pointwise b^{l/p} psi(b^l x - j), zero outside the support.
inline Sampler dilate_sampler(Sampler psi, int b, int level, std::uint64_t shift, double p = 2.0) {
    const double bl = std::pow(static_cast<double>(b), level);
    const double factor = std::pow(static_cast<double>(b), level / p);
    return [=](double x) {
        double t = bl * x - static_cast<double>(shift);
        return (t >= 0.0 && t < 1.0) ? factor * psi(t) : 0.0;
    };
}

// ------------------------------------------------------------------- sawtooth

/// 2^{d-1}-tooth sawtooth: on every depth-d leaf it is y when the last digit is 0
/// and 1-y when it is 1.
inline TensorTrain encode_sawtooth(const Grid& grid, int m = 1, BasisKind kind = BasisKind::legendre) {
    if (grid.base != 2) throw std::invalid_argument("encode_sawtooth: base must be 2");
    if (grid.depth < 1) throw std::invalid_argument("encode_sawtooth: depth must be >= 1");
    if (m < 1) throw std::invalid_argument("encode_sawtooth: degree must be >= 1");
    PolyBasis B(m, kind);
    const int d = grid.depth;
    TensorTrain tt{grid, B, {}, Eigen::MatrixXd(2, B.dim())};
    tt.leaf.row(0) = to_basis(Polynomial::monomial({0.0, 1.0}), B).coeffs.transpose();
    tt.leaf.row(1) = to_basis(Polynomial::monomial({1.0, -1.0}), B).coeffs.transpose();
    if (d == 1) {
        TTCore c(2, 1, 2);
        c(0, 0, 0) = 1.0;
        c(1, 0, 1) = 1.0;
        tt.cores.push_back(std::move(c));
        return tt;
    }
    TTCore first(2, 1, 2);
    first(0, 0, 0) = first(1, 0, 0) = 1.0;
    tt.cores.push_back(std::move(first));
    for (int nu = 2; nu < d; ++nu) {
        TTCore c(2, 2, 2);
        for (int i = 0; i < 2; ++i) c.slices[i] = Eigen::MatrixXd::Identity(2, 2);
        tt.cores.push_back(std::move(c));
    }
    TTCore last(2, 2, 2);
    last(0, 0, 0) = 1.0;
    last(1, 0, 1) = 1.0;
    tt.cores.push_back(std::move(last));
    return tt;
}

inline Sampler sawtooth_sampler(int d) {
    return [d](double x) {
        double t = std::ldexp(x, d);
        double j = std::floor(t);
        double y = t - j;
        return (std::fmod(j, 2.0) == 0.0) ? y : 1.0 - y;
    };
}

}  // namespace qtt
