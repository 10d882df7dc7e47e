#pragma once
/// @file poly_basis.hpp
/// @brief Polynomial bases of P_m on [0,1) used for the leaf variable.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "qtt/quadrature.hpp"

namespace qtt {

enum class BasisKind { monomial, chebyshev, legendre };

inline std::string to_string(BasisKind k) {
    switch (k) {
    case BasisKind::monomial: return "monomial";
    case BasisKind::chebyshev: return "chebyshev";
    case BasisKind::legendre: return "legendre";
    }
    return "legendre";
}

inline BasisKind basis_kind_from_string(const std::string& s) {
    if (s == "monomial") return BasisKind::monomial;
    if (s == "chebyshev" || s == "chebyshev-shifted") return BasisKind::chebyshev;
    if (s == "legendre" || s == "legendre-shifted") return BasisKind::legendre;
    throw std::invalid_argument("unknown basis kind '" + s + "'");
}

/// Basis {phi_0,...,phi_m} of polynomials of degree <= m on [0,1).
/// chebyshev: T_k(2y-1); legendre: P_k(2y-1); monomial: y^k.
struct PolyBasis {
    int degree = 0;
    BasisKind kind = BasisKind::legendre;

    PolyBasis() = default;
    PolyBasis(int m, BasisKind k = BasisKind::legendre) : degree(m), kind(k) {
        if (m < 0) throw std::invalid_argument("PolyBasis: negative degree");
    }

    int dim() const { return degree + 1; }

    void eval(double y, double* out) const {
        const int n = dim();
        if (kind == BasisKind::monomial) {
            double v = 1.0;
            for (int k = 0; k < n; ++k) {
                out[k] = v;
                v *= y;
            }
            return;
        }
        const double t = 2.0 * y - 1.0;
        out[0] = 1.0;
        if (n > 1) out[1] = t;
        for (int k = 2; k < n; ++k) {
            if (kind == BasisKind::chebyshev)
                out[k] = 2.0 * t * out[k - 1] - out[k - 2];
            else
                out[k] = ((2.0 * k - 1.0) * t * out[k - 1] - (k - 1.0) * out[k - 2]) / k;
        }
    }

    Eigen::VectorXd eval(double y) const {
        Eigen::VectorXd v(dim());
        eval(y, v.data());
        return v;
    }

    /// V(q,k) = phi_k(y_q).
    Eigen::MatrixXd vandermonde(const std::vector<double>& ys) const {
        Eigen::MatrixXd V(ys.size(), dim());
        Eigen::VectorXd row(dim());
        for (std::size_t q = 0; q < ys.size(); ++q) {
            eval(ys[q], row.data());
            V.row(q) = row.transpose();
        }
        return V;
    }

    /// G(j,k) = int_0^1 phi_j phi_k, in closed form.
    Eigen::MatrixXd gram() const {
        const int n = dim();
        Eigen::MatrixXd G = Eigen::MatrixXd::Zero(n, n);
        auto cheb_int = [](int k) { return (k % 2) ? 0.0 : 2.0 / (1.0 - double(k) * k); };
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                switch (kind) {
                case BasisKind::monomial: G(j, k) = 1.0 / (j + k + 1.0); break;
                case BasisKind::legendre: G(j, k) = (j == k) ? 1.0 / (2.0 * k + 1.0) : 0.0; break;
                case BasisKind::chebyshev:
                    G(j, k) = 0.25 * (cheb_int(j + k) + cheb_int(std::abs(j - k)));
                    break;
                }
            }
        return G;
    }

    /// Coefficients of the constant function 1.
    Eigen::VectorXd constant_one() const {
        Eigen::VectorXd c = Eigen::VectorXd::Zero(dim());
        c(0) = 1.0;
        return c;
    }

    friend bool operator==(const PolyBasis&, const PolyBasis&) = default;
};

/// Polynomial on [0,1) given by coefficients in a basis.
struct Polynomial {
    PolyBasis basis;
    Eigen::VectorXd coeffs;

    Polynomial() : coeffs(Eigen::VectorXd::Zero(1)) {}
    Polynomial(PolyBasis b, Eigen::VectorXd c) : basis(b), coeffs(std::move(c)) {
        if (coeffs.size() != basis.dim()) throw std::invalid_argument("Polynomial: coefficient count != dim");
    }

    static Polynomial monomial(const std::vector<double>& c) {
        if (c.empty()) throw std::invalid_argument("Polynomial: empty coefficient list");
        return Polynomial(PolyBasis(static_cast<int>(c.size()) - 1, BasisKind::monomial),
                          Eigen::Map<const Eigen::VectorXd>(c.data(), c.size()));
    }

    int degree() const { return basis.degree; }

    double operator()(double y) const {
        if (basis.kind == BasisKind::monomial) {
            double v = 0.0;
            for (int k = basis.degree; k >= 0; --k) v = v * y + coeffs(k);
            return v;
        }
        // Clenshaw-free direct sum; degrees here are small to moderate
        double buf[64];
        std::vector<double> heap;
        double* phi = buf;
        if (basis.dim() > 64) {
            heap.resize(basis.dim());
            phi = heap.data();
        }
        basis.eval(y, phi);
        double v = 0.0;
        for (int k = 0; k < basis.dim(); ++k) v += coeffs(k) * phi[k];
        return v;
    }
};

/// Fit coefficients in `basis` from values at `ys` (square system).
inline Eigen::VectorXd fit_values(const PolyBasis& basis, const std::vector<double>& ys,
                                  const Eigen::VectorXd& values) {
    return basis.vandermonde(ys).partialPivLu().solve(values);
}

/// Re-express p in `target`. The target degree must be at least p's degree.
inline Polynomial to_basis(const Polynomial& p, const PolyBasis& target) {
    if (target.degree < p.degree()) throw std::invalid_argument("to_basis: target degree too small");
    if (target.kind == p.basis.kind) {
        Eigen::VectorXd c = Eigen::VectorXd::Zero(target.dim());
        c.head(p.basis.dim()) = p.coeffs;
        return Polynomial(target, c);
    }
    auto ys = chebyshev_points(target.dim());
    Eigen::VectorXd v(ys.size());
    for (std::size_t q = 0; q < ys.size(); ++q) v(q) = p(ys[q]);
    return Polynomial(target, fit_values(target, ys, v));
}

inline double binomial(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

/// A(i) with phi_k((i + y)/b) = sum_l A(i)(k,l) phi_l(y): restriction of the
/// basis to the i-th of b equal subintervals, rescaled to [0,1).
inline Eigen::MatrixXd restriction_matrix(const PolyBasis& basis, int b, int i) {
    const int n = basis.dim();
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    if (basis.kind == BasisKind::monomial) {
        // ((i + y)/b)^k = sum_l C(k,l) i^(k-l) y^l / b^k
        for (int k = 0; k < n; ++k) {
            double scale = std::pow(static_cast<double>(b), -k);
            for (int l = 0; l <= k; ++l)
                A(k, l) = binomial(k, l) * std::pow(static_cast<double>(i), k - l) * scale;
        }
        return A;
    }
    auto ys = chebyshev_points(n);
    Eigen::MatrixXd W(n, n);
    Eigen::VectorXd row(n);
    for (int q = 0; q < n; ++q) {
        basis.eval((i + ys[q]) / b, row.data());
        W.row(q) = row.transpose();
    }
    A = basis.vandermonde(ys).partialPivLu().solve(W).transpose();
    // phi_k only reaches phi_l with l <= k; clear round-off at the noise floor
    for (int k = 0; k < n; ++k) {
        double rmax = A.row(k).cwiseAbs().maxCoeff();
        for (int l = 0; l < n; ++l)
            if (l > k || std::abs(A(k, l)) < 64.0 * 2.2e-16 * rmax) A(k, l) = 0.0;
    }
    return A;
}

namespace detail {

inline std::vector<double> sign_change_roots(const Polynomial& p, int samples) {
    std::vector<double> roots;
    double ya = 0.0, fa = p(0.0);
    for (int s = 1; s <= samples; ++s) {
        double yb = static_cast<double>(s) / samples;
        double fb = p(yb);
        if (fb == 0.0) {
            // exact zero on a sample; cut there and keep the last nonzero sign
            if (s < samples) roots.push_back(yb);
            ya = yb;
            continue;
        }
        if ((fa < 0.0 && fb > 0.0) || (fa > 0.0 && fb < 0.0)) {
            double lo = ya, hi = yb, flo = fa;
            for (int it = 0; it < 200 && hi - lo > 1e-17; ++it) {
                double mid = 0.5 * (lo + hi);
                double fm = p(mid);
                if ((fm < 0.0) == (flo < 0.0)) {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            if (fa != 0.0 && (roots.empty() || roots.back() < ya)) roots.push_back(0.5 * (lo + hi));
        }
        ya = yb;
        fa = fb;
    }
    return roots;
}

}  // namespace detail

/// max_{[0,1]} |p| by dense sampling refined with golden-section search.
inline double poly_sup_norm(const Polynomial& p) {
    const int samples = 16 * p.basis.dim() + 16;
    std::vector<double> v(samples + 1);
    for (int s = 0; s <= samples; ++s) v[s] = std::abs(p(static_cast<double>(s) / samples));
    double best = *std::max_element(v.begin(), v.end());
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    for (int s = 1; s < samples; ++s) {
        if (v[s] < v[s - 1] || v[s] < v[s + 1]) continue;
        double a = static_cast<double>(s - 1) / samples, c = static_cast<double>(s + 1) / samples;
        double x1 = c - phi * (c - a), x2 = a + phi * (c - a);
        double f1 = std::abs(p(x1)), f2 = std::abs(p(x2));
        for (int it = 0; it < 80; ++it) {
            if (f1 > f2) {
                c = x2;
                x2 = x1;
                f2 = f1;
                x1 = c - phi * (c - a);
                f1 = std::abs(p(x1));
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + phi * (c - a);
                f2 = std::abs(p(x2));
            }
        }
        best = std::max({best, f1, f2});
    }
    return best;
}

/// ||p||_{L^p(0,1)}. The interval is split at sign changes, so for integer p
/// the Gauss rule is exact on each piece.
inline double poly_lp_norm(const Polynomial& p, double pexp, int quad_order = 0) {
    if (!(pexp > 0.0)) throw std::domain_error("poly_lp_norm: p must be positive");
    if (std::isinf(pexp)) return poly_sup_norm(p);
    std::vector<double> cuts{0.0};
    for (double r : detail::sign_change_roots(p, 8 * p.basis.dim() + 8)) cuts.push_back(r);
    cuts.push_back(1.0);
    int n = quad_order;
    const bool integer_p = std::abs(pexp - std::round(pexp)) < 1e-14;
    if (integer_p)
        n = std::max(n, static_cast<int>(std::ceil((pexp * p.degree() + 1.0) / 2.0)) + 1);
    else
        n = std::max(n, 32);
    const auto& rule = gauss_legendre(n);
    double s = 0.0;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        double a = cuts[k], h = cuts[k + 1] - cuts[k];
        for (int q = 0; q < n; ++q) s += h * rule.weights[q] * std::pow(std::abs(p(a + h * rule.nodes[q])), pexp);
    }
    return std::pow(s, 1.0 / pexp);
}

}  // namespace qtt
