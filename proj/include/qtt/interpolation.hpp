#pragma once
/// @file interpolation.hpp
/// @brief Leafwise polynomial interpolation, trains from samplers,
/// re-interpolation across depth/degree and Chebyshev truncation.

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "qtt/encoders.hpp"
#include "qtt/piecewise.hpp"
#include "qtt/tensor_train.hpp"

namespace qtt {

/// Interpolation onto P_m at m+1 nodes in [0,1]. Defaults to Chebyshev-Lobatto
/// points (the midpoint for m = 0).
struct Interpolator {
    int degree = 1;
    std::vector<double> nodes;

    Interpolator() : Interpolator(1) {}
    explicit Interpolator(int m) : degree(m), nodes(chebyshev_lobatto_points(m)) {
        if (m < 0) throw std::invalid_argument("Interpolator: negative degree");
    }
    Interpolator(int m, std::vector<double> x) : degree(m), nodes(std::move(x)) {
        if (static_cast<int>(nodes.size()) != m + 1) throw std::invalid_argument("Interpolator: need m+1 nodes");
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            if (!(nodes[i] >= 0.0 && nodes[i] <= 1.0)) throw std::invalid_argument("Interpolator: node outside [0,1]");
            for (std::size_t j = 0; j < i; ++j)
                if (nodes[i] == nodes[j]) throw std::invalid_argument("Interpolator: repeated node");
        }
    }
};

/// Values of f at the interpolation nodes; y = 1 is read as the left limit.
inline Eigen::VectorXd sample_nodes(const Sampler& f, const Interpolator& I) {
    Eigen::VectorXd v(I.nodes.size());
    for (std::size_t q = 0; q < I.nodes.size(); ++q) {
        double y = I.nodes[q] >= 1.0 ? std::nextafter(1.0, 0.0) : I.nodes[q];
        v(q) = f(y);
        if (!std::isfinite(v(q))) throw std::domain_error("interpolate: non-finite sample");
    }
    return v;
}

/// I_m f on [0,1) as coefficients in `basis` (degree must equal I.degree).
inline Polynomial interpolate_unit(const Sampler& f, const Interpolator& I, const PolyBasis& basis) {
    if (basis.degree != I.degree) throw std::invalid_argument("interpolate_unit: basis degree differs");
    return Polynomial(basis, fit_values(basis, I.nodes, sample_nodes(f, I)));
}

inline Polynomial interpolate_unit(const Sampler& f, const Interpolator& I) {
    return interpolate_unit(f, I, PolyBasis(I.degree));
}

/// The leafwise interpolant I_{b,d,m} f as a uniform spline.
inline PiecewisePolynomial interpolant_spline(const Sampler& f, const Grid& grid, const Interpolator& I) {
    PolyBasis B(I.degree, BasisKind::monomial);
    std::vector<Polynomial> pieces;
    pieces.reserve(grid.leaves());
    for (std::uint64_t j = 0; j < grid.leaves(); ++j)
        pieces.push_back(interpolate_unit(leaf_restriction(f, grid, j), I, B));
    return PiecewisePolynomial::uniform(grid.base, grid.depth, std::move(pieces));
}

/// Largest b^d handled by tensor_interpolate.
inline constexpr std::uint64_t kMaxDenseLeaves = std::uint64_t{1} << 14;

/// Train of I_{b,d,m} f: leaf coefficients are computed for all b^d leaves and
/// compressed by a left-to-right SVD sweep with relative tolerance `tol`.
inline TensorTrain tensor_interpolate(const Sampler& f, const Grid& grid, const Interpolator& I,
                                      BasisKind kind = BasisKind::legendre, double tol = 1e-12) {
    if (grid.leaves() > kMaxDenseLeaves)
        throw std::invalid_argument("tensor_interpolate: b^d exceeds the dense limit 2^14");
    PolyBasis B(I.degree, kind);
    const int n = B.dim();
    const int b = grid.base;
    const int d = grid.depth;
    const auto N = static_cast<Eigen::Index>(grid.leaves());
    // row j of V holds the leaf coefficients; stored row-major in `data`
    Eigen::MatrixXd Vinv = B.vandermonde(I.nodes).inverse();
    std::vector<double> data(static_cast<std::size_t>(N) * n);
    for (Eigen::Index j = 0; j < N; ++j) {
        Eigen::VectorXd c = Vinv * sample_nodes(leaf_restriction(f, grid, static_cast<std::uint64_t>(j)), I);
        for (int k = 0; k < n; ++k) data[static_cast<std::size_t>(j) * n + k] = c(k);
    }
    TensorTrain tt{grid, B, {}, {}};
    if (d == 0) {
        tt.leaf = Eigen::Map<Eigen::MatrixXd>(data.data(), 1, n);
        return tt;
    }
    double total = 0.0;
    for (double v : data) total += v * v;
    const double delta = tol * std::sqrt(total) / std::sqrt(static_cast<double>(d));
    // W: (r * b) x rest, row-major in `data`
    using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    RowMat W = Eigen::Map<RowMat>(data.data(), b, static_cast<Eigen::Index>(data.size()) / b);
    int r = 1;
    for (int nu = 1; nu <= d; ++nu) {
        Eigen::BDCSVD<Eigen::MatrixXd> svd(Eigen::MatrixXd(W), Eigen::ComputeThinU | Eigen::ComputeThinV);
        const Eigen::VectorXd& s = svd.singularValues();
        int keep = static_cast<int>(s.size());
        double tail = 0.0;
        while (keep > 1) {
            double next = tail + s(keep - 1) * s(keep - 1);
            if (std::sqrt(next) > delta) break;
            tail = next;
            --keep;
        }
        Eigen::MatrixXd U = svd.matrixU().leftCols(keep);  // rows (a, i) with a slow
        TTCore c(b, r, keep);
        for (int a = 0; a < r; ++a)
            for (int i = 0; i < b; ++i) c.slices[i].row(a) = U.row(a * b + i);
        tt.cores.push_back(std::move(c));
        RowMat R = s.head(keep).asDiagonal() * svd.matrixV().leftCols(keep).transpose();
        r = keep;
        if (nu < d) {
            const Eigen::Index cols = R.cols() / b;
            W = Eigen::Map<RowMat>(R.data(), r * b, cols);
        } else {
            tt.leaf = R;  // r x n
        }
    }
    return tt;
}

/// Rows: I_m of each source basis function, written in `target`.
inline Eigen::MatrixXd interpolation_leaf_map(const PolyBasis& source, const Interpolator& I, const PolyBasis& target) {
    Eigen::MatrixXd Pi(source.dim(), target.dim());
    Eigen::MatrixXd Vt_inv = target.vandermonde(I.nodes).inverse();
    Eigen::MatrixXd Vs = source.vandermonde(I.nodes);  // (m+1) x source.dim
    Pi = (Vt_inv * Vs).transpose();
    return Pi;
}

/// I_{b,dbar,m} applied to the function of tt (depth d, degree mbar): the
/// source cores are kept, dbar - d levels of restriction matrices are
/// appended and the leaf basis is interpolated into P_m.
inline TensorTrain reinterpolate(const TensorTrain& tt, int dbar, const Interpolator& I,
                                 BasisKind kind = BasisKind::legendre) {
    if (dbar < tt.depth()) throw std::invalid_argument("reinterpolate: target depth below source depth");
    if (I.degree > tt.basis.degree) throw std::invalid_argument("reinterpolate: target degree above source degree");
    PolyBasis target(I.degree, kind);
    return append_polynomial_levels(tt, dbar - tt.depth(), target, interpolation_leaf_map(tt.basis, I, target));
}

/// Same function as reinterpolate, laid out for sparsity: level d+1 copies the
/// leaf into (coefficient, digit) states, level d+2 applies A(j) A(i), later
/// levels A(i), and the leaf is the interpolation map.
inline TensorTrain reinterpolate_sparse(const TensorTrain& tt, int dbar, const Interpolator& I,
                                        BasisKind kind = BasisKind::legendre) {
    const int d = tt.depth();
    if (dbar < d) throw std::invalid_argument("reinterpolate: target depth below source depth");
    if (I.degree > tt.basis.degree) throw std::invalid_argument("reinterpolate: target degree above source degree");
    PolyBasis target(I.degree, kind);
    Eigen::MatrixXd Pi = interpolation_leaf_map(tt.basis, I, target);
    if (dbar == d) {
        TensorTrain out = tt;
        out.basis = target;
        out.leaf = tt.leaf * Pi;
        return out;
    }
    const int b = tt.grid.base;
    const int n = tt.basis.dim();
    std::vector<Eigen::MatrixXd> A(b);
    for (int i = 0; i < b; ++i) A[i] = restriction_matrix(tt.basis, b, i);
    TensorTrain out{Grid(b, dbar), target, tt.cores, {}};
    const int rd = static_cast<int>(tt.leaf.rows());
    TTCore spread(b, rd, n * b);  // column (q, j) -> q * b + j
    for (int i = 0; i < b; ++i)
        for (int q = 0; q < n; ++q) spread.slices[i].col(q * b + i) = tt.leaf.col(q);
    out.cores.push_back(std::move(spread));
    // Restriction to a depth-1 grid in digit j: A(j); rows (q, j) of the next map.
    if (dbar - d == 1) {
        out.leaf = Eigen::MatrixXd(n * b, target.dim());
        for (int j = 0; j < b; ++j) {
            Eigen::MatrixXd AP = A[j] * Pi;
            for (int q = 0; q < n; ++q) out.leaf.row(q * b + j) = AP.row(q);
        }
        return out;
    }
    TTCore second(b, n * b, n);
    for (int i = 0; i < b; ++i)
        for (int j = 0; j < b; ++j) {
            Eigen::MatrixXd AA = A[j] * A[i];
            for (int q = 0; q < n; ++q) second.slices[i].row(q * b + j) = AA.row(q);
        }
    out.cores.push_back(std::move(second));
    for (int nu = d + 3; nu <= dbar; ++nu) {
        TTCore c(b, n, n);
        for (int i = 0; i < b; ++i) c.slices[i] = A[i];
        out.cores.push_back(std::move(c));
    }
    out.leaf = Pi;
    return out;
}

/// Shifted Chebyshev expansion truncated at degree mbar: a_0/2 + sum a_k T_k(2x-1),
/// coefficients from a discrete cosine transform on 4(mbar+1) Chebyshev points.
inline Polynomial chebyshev_truncate(const Sampler& f, int mbar) {
    if (mbar < 0) throw std::invalid_argument("chebyshev_truncate: negative degree");
    const int M = 4 * (mbar + 1);
    std::vector<double> fv(M), theta(M);
    for (int j = 0; j < M; ++j) {
        theta[j] = std::numbers::pi * (j + 0.5) / M;
        fv[j] = f(0.5 * (1.0 + std::cos(theta[j])));
        if (!std::isfinite(fv[j])) throw std::domain_error("chebyshev_truncate: non-finite sample");
    }
    Eigen::VectorXd c(mbar + 1);
    for (int k = 0; k <= mbar; ++k) {
        double s = 0.0;
        for (int j = 0; j < M; ++j) s += fv[j] * std::cos(k * theta[j]);
        c(k) = 2.0 * s / M;
    }
    c(0) *= 0.5;
    return Polynomial(PolyBasis(mbar, BasisKind::chebyshev), c);
}

}  // namespace qtt
