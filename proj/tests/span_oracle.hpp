#pragma once
// Brute-force nu-rank: numerical rank of the b^nu x S matrix of sampled
// restrictions x -> f(b^{-nu}(j + x)). Each of the b^{d-nu} depth-d cells of the
// restriction gets `per_cell` Chebyshev samples, so piecewise polynomials of
// degree < per_cell on the depth-d grid are captured exactly.

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

inline int brute_span_rank(const std::function<double(double)>& f, int b, int d, int nu, int per_cell = 8,
                           double tol = 1e-8) {
    const long rows = std::lround(std::pow(b, nu));
    const long cells = std::lround(std::pow(b, d - nu));
    Eigen::MatrixXd M(rows, cells * per_cell);
    for (long j = 0; j < rows; ++j)
        for (long q = 0; q < cells; ++q)
            for (int u = 0; u < per_cell; ++u) {
                double t = 0.5 * (1.0 - std::cos(std::numbers::pi * (u + 0.5) / per_cell));
                double x = (static_cast<double>(j) + (static_cast<double>(q) + t) / static_cast<double>(cells)) /
                           static_cast<double>(rows);
                M(j, q * per_cell + u) = f(x);
            }
    Eigen::BDCSVD<Eigen::MatrixXd> svd(M);
    const auto& s = svd.singularValues();
    if (s.size() == 0 || s(0) == 0.0) return 0;
    int r = 0;
    while (r < s.size() && s(r) > tol * s(0)) ++r;
    return r;
}

// Exact nu-ranks of the polynomial sum_i c_i x^i: the restrictions p(h(j + t))
// have Taylor coefficients p^(k)(hj) h^k / k!; dropping the column scale h^k
// leaves the rank unchanged and keeps the matrix well conditioned.
inline std::vector<int> polynomial_span_ranks(const std::vector<double>& c, int b, int d) {
    const int m = static_cast<int>(c.size()) - 1;
    auto choose = [](int n, int k) {
        double v = 1.0;
        for (int i = 1; i <= k; ++i) v = v * (n - k + i) / i;
        return v;
    };
    std::vector<int> out;
    for (int nu = 1; nu <= d; ++nu) {
        const long rows = std::lround(std::pow(b, nu));
        Eigen::MatrixXd M(rows, m + 1);
        for (long j = 0; j < rows; ++j) {
            double x = static_cast<double>(j) / rows;
            for (int k = 0; k <= m; ++k) {
                double v = 0.0;
                for (int i = k; i <= m; ++i) v += choose(i, k) * c[i] * std::pow(x, i - k);
                M(j, k) = v;
            }
        }
        Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
        lu.setThreshold(1e-10);
        out.push_back(static_cast<int>(lu.rank()));
    }
    return out;
}
