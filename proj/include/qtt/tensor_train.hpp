#pragma once
/// @file tensor_train.hpp
/// @brief Tensor trains with b-valued discrete cores and a polynomial leaf.
///
/// A train on grid (b,d) with leaf basis {phi_k} represents
///   f(x) = G_1(i_1) G_2(i_2) ... G_d(i_d) L phi(y),   x = t_{b,d}(i_1..i_d, y),
/// where G_nu(i) is an r_{nu-1} x r_nu matrix (r_0 = 1) and L is r_d x (m+1).

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qtt/poly_basis.hpp"
#include "qtt/tensorization.hpp"

namespace qtt {

/// One discrete core: b slices of size rl x rr.
struct TTCore {
    int base = 2;
    int rl = 1;
    int rr = 1;
    std::vector<Eigen::MatrixXd> slices;

    TTCore() = default;
    TTCore(int b, int left, int right)
        : base(b), rl(left), rr(right), slices(b, Eigen::MatrixXd::Zero(left, right)) {}

    double& operator()(int i, int a, int c) { return slices[i](a, c); }
    double operator()(int i, int a, int c) const { return slices[i](a, c); }

    /// (b*rl) x rr, row index i*rl + a.
    Eigen::MatrixXd left_unfolding() const {
        Eigen::MatrixXd M(base * rl, rr);
        for (int i = 0; i < base; ++i) M.block(i * rl, 0, rl, rr) = slices[i];
        return M;
    }

    static TTCore from_left_unfolding(const Eigen::MatrixXd& M, int b) {
        const int left = static_cast<int>(M.rows()) / b;
        TTCore c(b, left, static_cast<int>(M.cols()));
        for (int i = 0; i < b; ++i) c.slices[i] = M.block(i * left, 0, left, M.cols());
        return c;
    }

    /// rl x (b*rr), column index i*rr + c.
    Eigen::MatrixXd right_unfolding() const {
        Eigen::MatrixXd M(rl, base * rr);
        for (int i = 0; i < base; ++i) M.block(0, i * rr, rl, rr) = slices[i];
        return M;
    }

    static TTCore from_right_unfolding(const Eigen::MatrixXd& M, int b) {
        const int right = static_cast<int>(M.cols()) / b;
        TTCore c(b, static_cast<int>(M.rows()), right);
        for (int i = 0; i < b; ++i) c.slices[i] = M.block(0, i * right, M.rows(), right);
        return c;
    }

    void left_multiply(const Eigen::MatrixXd& R) {
        for (auto& s : slices) s = R * s;
        rl = static_cast<int>(R.rows());
    }

    void right_multiply(const Eigen::MatrixXd& R) {
        for (auto& s : slices) s = s * R;
        rr = static_cast<int>(R.cols());
    }
};

struct TensorTrain {
    Grid grid;
    PolyBasis basis;
    std::vector<TTCore> cores;
    Eigen::MatrixXd leaf;  // r_d x (m+1)

    int depth() const { return grid.depth; }

    /// Stored ranks r_1..r_d.
    std::vector<int> stored_ranks() const {
        std::vector<int> r;
        r.reserve(cores.size());
        for (const auto& c : cores) r.push_back(c.rr);
        return r;
    }

    void validate() const {
        grid.validate();
        if (static_cast<int>(cores.size()) != grid.depth)
            throw std::invalid_argument("TensorTrain: core count differs from depth");
        int prev = 1;
        for (std::size_t k = 0; k < cores.size(); ++k) {
            const auto& c = cores[k];
            if (c.base != grid.base || static_cast<int>(c.slices.size()) != grid.base)
                throw std::invalid_argument("TensorTrain: core " + std::to_string(k + 1) + " has wrong base");
            if (c.rl != prev)
                throw std::invalid_argument("TensorTrain: rank mismatch entering core " + std::to_string(k + 1));
            for (const auto& s : c.slices)
                if (s.rows() != c.rl || s.cols() != c.rr)
                    throw std::invalid_argument("TensorTrain: slice shape mismatch in core " + std::to_string(k + 1));
            prev = c.rr;
        }
        if (leaf.rows() != prev || leaf.cols() != basis.dim())
            throw std::invalid_argument("TensorTrain: leaf shape mismatch");
    }
};

/// Rank-1 train of the zero function.
inline TensorTrain zero_train(const Grid& grid, const PolyBasis& basis) {
    TensorTrain tt{grid, basis, {}, Eigen::MatrixXd::Zero(1, basis.dim())};
    for (int k = 0; k < grid.depth; ++k) tt.cores.emplace_back(grid.base, 1, 1);
    return tt;
}

/// Rank-1 train of the constant c.
inline TensorTrain constant_train(const Grid& grid, const PolyBasis& basis, double c) {
    TensorTrain tt = zero_train(grid, basis);
    for (auto& core : tt.cores)
        for (auto& s : core.slices) s(0, 0) = 1.0;
    tt.leaf(0, 0) = c;
    return tt;
}

inline double evaluate(const TensorTrain& tt, std::span<const int> digits, double y) {
    Eigen::RowVectorXd v = Eigen::RowVectorXd::Ones(1);
    for (std::size_t k = 0; k < tt.cores.size(); ++k) v = v * tt.cores[k].slices[digits[k]];
    Eigen::VectorXd phi = tt.basis.eval(y);
    return (v * tt.leaf * phi)(0);
}

inline double evaluate(const TensorTrain& tt, double x) {
    MultiIndexPoint p = encode_point(x, tt.grid);
    return evaluate(tt, p.digits, p.remainder);
}

/// Leaf coefficient vector of leaf j in the train's basis.
inline Eigen::VectorXd leaf_coefficients(const TensorTrain& tt, std::uint64_t j) {
    std::vector<int> digits = leaf_digits(LeafIndex{tt.grid, j});
    Eigen::RowVectorXd v = Eigen::RowVectorXd::Ones(1);
    for (std::size_t k = 0; k < tt.cores.size(); ++k) v = v * tt.cores[k].slices[digits[k]];
    return (v * tt.leaf).transpose();
}

/// Calls fn(j, coeffs) for every leaf in increasing j, sharing prefix products.
inline void for_each_leaf(const TensorTrain& tt,
                          const std::function<void(std::uint64_t, const Eigen::VectorXd&)>& fn) {
    const int d = tt.grid.depth;
    const int b = tt.grid.base;
    std::vector<Eigen::RowVectorXd> prefix(d + 1);
    prefix[0] = Eigen::RowVectorXd::Ones(1);
    std::vector<int> digit(d, 0);
    if (d == 0) {
        fn(0, tt.leaf.row(0).transpose());
        return;
    }
    int level = 0;  // prefix[level] is valid; next digit to set is at index level
    std::uint64_t j = 0;
    digit[0] = 0;
    while (true) {
        prefix[level + 1] = prefix[level] * tt.cores[level].slices[digit[level]];
        if (level + 1 == d) {
            fn(j, (prefix[d] * tt.leaf).transpose());
            ++j;
            // advance to the next digit sequence
            int l = d - 1;
            while (l >= 0 && digit[l] == b - 1) {
                digit[l] = 0;
                --l;
            }
            if (l < 0) break;
            ++digit[l];
            level = l;
        } else {
            ++level;
            digit[level] = 0;
        }
    }
}

/// b^d x (m+1) matrix of all leaf coefficients.
inline Eigen::MatrixXd leaf_coefficient_matrix(const TensorTrain& tt) {
    Eigen::MatrixXd C(tt.grid.leaves(), tt.basis.dim());
    for_each_leaf(tt, [&](std::uint64_t j, const Eigen::VectorXd& c) { C.row(j) = c.transpose(); });
    return C;
}

namespace detail {

inline void require_compatible(const TensorTrain& a, const TensorTrain& b, const char* op) {
    if (!(a.grid == b.grid)) throw std::invalid_argument(std::string(op) + ": grids differ");
    if (!(a.basis == b.basis)) throw std::invalid_argument(std::string(op) + ": leaf bases differ");
}

}  // namespace detail

/// Block sum of several trains on the same grid and basis.
inline TensorTrain block_sum(std::span<const TensorTrain> terms) {
    if (terms.empty()) throw std::invalid_argument("block_sum: no terms");
    for (const auto& t : terms) detail::require_compatible(terms[0], t, "add");
    const Grid grid = terms[0].grid;
    const PolyBasis basis = terms[0].basis;
    const int d = grid.depth;
    TensorTrain out{grid, basis, {}, {}};
    if (d == 0) {
        out.leaf = Eigen::MatrixXd::Zero(1, basis.dim());
        for (const auto& t : terms) out.leaf += t.leaf;
        return out;
    }
    for (int k = 0; k < d; ++k) {
        int rl = 0, rr = 0;
        for (const auto& t : terms) {
            rl += t.cores[k].rl;
            rr += t.cores[k].rr;
        }
        if (k == 0) rl = 1;
        TTCore c(grid.base, rl, rr);
        int ol = 0, orr = 0;
        for (const auto& t : terms) {
            const auto& tc = t.cores[k];
            for (int i = 0; i < grid.base; ++i) c.slices[i].block(k == 0 ? 0 : ol, orr, tc.rl, tc.rr) = tc.slices[i];
            if (k != 0) ol += tc.rl;
            orr += tc.rr;
        }
        out.cores.push_back(std::move(c));
    }
    int rows = 0;
    for (const auto& t : terms) rows += static_cast<int>(t.leaf.rows());
    out.leaf.resize(rows, basis.dim());
    int o = 0;
    for (const auto& t : terms) {
        out.leaf.middleRows(o, t.leaf.rows()) = t.leaf;
        o += static_cast<int>(t.leaf.rows());
    }
    return out;
}

inline TensorTrain add(const TensorTrain& a, const TensorTrain& b) {
    std::vector<TensorTrain> terms{a, b};
    return block_sum(terms);
}

inline TensorTrain scale(const TensorTrain& a, double c) {
    TensorTrain out = a;
    out.leaf *= c;
    return out;
}

enum class Direction { left, right };

namespace detail {

/// Thin QR of M: M = Q R with Q having min(rows, cols) orthonormal columns.
inline void thin_qr(const Eigen::MatrixXd& M, Eigen::MatrixXd& Q, Eigen::MatrixXd& R) {
    const Eigen::Index k = std::min(M.rows(), M.cols());
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(M);
    Q = qr.householderQ() * Eigen::MatrixXd::Identity(M.rows(), k);
    R = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
}

/// Factor of the leaf Gram matrix: G = F F^T with F lower triangular.
inline Eigen::MatrixXd gram_factor(const PolyBasis& basis) {
    return basis.gram().llt().matrixL();
}

}  // namespace detail

/// Left: cores 1..d have orthonormal left unfoldings and the leaf carries the
/// norm. Right: the leaf rows are orthonormal in L^2(0,1), cores 2..d have
/// orthonormal right unfoldings and core 1 carries the norm.
inline TensorTrain orthogonalize(const TensorTrain& tt, Direction dir) {
    TensorTrain out = tt;
    const int d = tt.grid.depth;
    const int b = tt.grid.base;
    if (dir == Direction::left) {
        for (int k = 0; k < d; ++k) {
            Eigen::MatrixXd Q, R;
            detail::thin_qr(out.cores[k].left_unfolding(), Q, R);
            out.cores[k] = TTCore::from_left_unfolding(Q, b);
            if (k + 1 < d)
                out.cores[k + 1].left_multiply(R);
            else
                out.leaf = R * out.leaf;
        }
        return out;
    }
    if (d == 0) return out;
    const Eigen::MatrixXd F = detail::gram_factor(tt.basis);
    {
        Eigen::MatrixXd Q, R;
        detail::thin_qr((out.leaf * F).transpose(), Q, R);
        out.leaf = F.transpose().triangularView<Eigen::Upper>().solve(Q).transpose();
        out.cores[d - 1].right_multiply(R.transpose());
    }
    for (int k = d - 1; k >= 1; --k) {
        Eigen::MatrixXd Q, R;
        detail::thin_qr(out.cores[k].right_unfolding().transpose(), Q, R);
        out.cores[k] = TTCore::from_right_unfolding(Q.transpose(), b);
        out.cores[k - 1].right_multiply(R.transpose());
    }
    return out;
}

/// L^2(0,1) inner product of two trains on the same grid and basis.
inline double inner_product(const TensorTrain& a, const TensorTrain& b) {
    detail::require_compatible(a, b, "inner_product");
    Eigen::MatrixXd M = Eigen::MatrixXd::Ones(1, 1);
    for (int k = 0; k < a.grid.depth; ++k) {
        Eigen::MatrixXd next = Eigen::MatrixXd::Zero(a.cores[k].rr, b.cores[k].rr);
        for (int i = 0; i < a.grid.base; ++i)
            next.noalias() += a.cores[k].slices[i].transpose() * M * b.cores[k].slices[i];
        M = std::move(next);
    }
    Eigen::MatrixXd leafgram = a.leaf * a.basis.gram() * b.leaf.transpose();
    return a.grid.leaf_width() * (M.array() * leafgram.array()).sum();
}

inline double l2_norm(const TensorTrain& tt) { return std::sqrt(std::max(0.0, inner_product(tt, tt))); }

struct RankProfile {
    std::vector<int> ranks;
    double tolerance = 1e-10;
};

namespace detail {

/// Left-to-right SVD sweep over a right-orthogonal train. keep(s) returns the
/// number of singular values to retain; at least one is always kept.
template <class Keep>
TensorTrain svd_sweep(TensorTrain t, Keep keep, std::vector<int>* numerical = nullptr) {
    const int d = t.grid.depth;
    const int b = t.grid.base;
    for (int k = 0; k < d; ++k) {
        Eigen::MatrixXd M = t.cores[k].left_unfolding();
        Eigen::BDCSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const Eigen::VectorXd& s = svd.singularValues();
        int r = keep(s);
        if (numerical) numerical->push_back(r);
        r = std::max(1, std::min<int>(r, static_cast<int>(s.size())));
        Eigen::MatrixXd U = svd.matrixU().leftCols(r);
        Eigen::MatrixXd SV = s.head(r).asDiagonal() * svd.matrixV().leftCols(r).transpose();
        t.cores[k] = TTCore::from_left_unfolding(U, b);
        if (k + 1 < d)
            t.cores[k + 1].left_multiply(SV);
        else
            t.leaf = SV * t.leaf;
    }
    return t;
}

}  // namespace detail

/// Truncate so that ||result - tt||_2 <= tol ||tt||_2 (L^2 on [0,1)).
inline TensorTrain round(const TensorTrain& tt, double tol) {
    if (tol < 0.0) throw std::invalid_argument("round: tolerance must be >= 0");
    const int d = tt.grid.depth;
    TensorTrain t = orthogonalize(tt, Direction::right);
    if (d == 0) return t;
    const double frob = t.cores[0].left_unfolding().norm();
    const double delta = tol * frob / std::sqrt(static_cast<double>(d));
    return detail::svd_sweep(std::move(t), [delta](const Eigen::VectorXd& s) {
        int r = static_cast<int>(s.size());
        double tail = 0.0;
        while (r > 1) {
            double next = tail + s(r - 1) * s(r - 1);
            if (std::sqrt(next) > delta) break;
            tail = next;
            --r;
        }
        return r;
    });
}

/// Numerical ranks of the nu-unfoldings: singular values above tol * sigma_max.
inline RankProfile ranks(const TensorTrain& tt, double tol = 1e-10) {
    RankProfile prof{{}, tol};
    if (tt.grid.depth == 0) return prof;
    TensorTrain t = orthogonalize(tt, Direction::right);
    detail::svd_sweep(std::move(t),
                      [tol](const Eigen::VectorXd& s) {
                          if (s.size() == 0 || s(0) <= 0.0) return 0;
                          int r = 0;
                          while (r < s.size() && s(r) > tol * s(0)) ++r;
                          return r;
                      },
                      &prof.ranks);
    return prof;
}

/// Express the same function on a deeper grid. Each extra level applies the
/// basis restriction matrices, then the final leaf is mapped through
/// leaf_map (dim x dim'), whose rows give phi_k in the new leaf basis.
inline TensorTrain append_polynomial_levels(const TensorTrain& tt, int extra, const PolyBasis& new_basis,
                                            const Eigen::MatrixXd& leaf_map) {
    if (extra < 0) throw std::invalid_argument("append_polynomial_levels: negative level count");
    if (leaf_map.rows() != tt.basis.dim() || leaf_map.cols() != new_basis.dim())
        throw std::invalid_argument("append_polynomial_levels: leaf map shape");
    TensorTrain out{Grid(tt.grid.base, tt.grid.depth + extra), new_basis, tt.cores, {}};
    const int b = tt.grid.base;
    const int n = tt.basis.dim();
    std::vector<Eigen::MatrixXd> A(b);
    for (int i = 0; i < b; ++i) A[i] = restriction_matrix(tt.basis, b, i);
    Eigen::MatrixXd carry = tt.leaf;  // r x n, multiplies into the next core
    for (int e = 0; e < extra; ++e) {
        TTCore c(b, static_cast<int>(carry.rows()), n);
        for (int i = 0; i < b; ++i) c.slices[i] = carry * A[i];
        out.cores.push_back(std::move(c));
        carry = Eigen::MatrixXd::Identity(n, n);
    }
    out.leaf = carry * leaf_map;
    return out;
}

/// Same function on depth tt.depth + extra, same leaf basis. Exact.
inline TensorTrain deepen(const TensorTrain& tt, int extra) {
    return append_polynomial_levels(tt, extra, tt.basis, Eigen::MatrixXd::Identity(tt.basis.dim(), tt.basis.dim()));
}

/// Same train with the leaf re-expressed in another basis of degree >= current.
inline TensorTrain change_leaf_basis(const TensorTrain& tt, const PolyBasis& target) {
    if (target.degree < tt.basis.degree) throw std::invalid_argument("change_leaf_basis: target degree too small");
    Eigen::MatrixXd map(tt.basis.dim(), target.dim());
    for (int k = 0; k < tt.basis.dim(); ++k) {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(tt.basis.dim());
        e(k) = 1.0;
        map.row(k) = to_basis(Polynomial(tt.basis, e), target).coeffs.transpose();
    }
    TensorTrain out = tt;
    out.basis = target;
    out.leaf = tt.leaf * map;
    return out;
}

}  // namespace qtt
