#pragma once
/// @file quadrature.hpp
/// @brief Gauss-Legendre rules and Chebyshev point sets on [0,1].

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace qtt {

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

namespace detail {

inline QuadratureRule compute_gauss_legendre(int n) {
    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double t = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = t;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (t * p1 - p0) / (t * t - 1.0);
            double dt = p1 / dp;
            t -= dt;
            if (std::abs(dt) < 1e-16) break;
        }
        // recompute derivative at the converged node
        double p0 = 1.0, p1 = t;
        for (int k = 2; k <= n; ++k) {
            double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = n * (t * p1 - p0) / (t * t - 1.0);
        double w = 2.0 / ((1.0 - t * t) * dp * dp);
        rule.nodes[i] = 0.5 * (1.0 - t);
        rule.nodes[n - 1 - i] = 0.5 * (1.0 + t);
        rule.weights[i] = 0.5 * w;
        rule.weights[n - 1 - i] = 0.5 * w;
    }
    return rule;
}

}  // namespace detail

/// n-point Gauss-Legendre rule on [0,1]; weights sum to 1.
inline const QuadratureRule& gauss_legendre(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
    static std::mutex mutex;
    static std::map<int, QuadratureRule> cache;
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, detail::compute_gauss_legendre(n)).first;
    return it->second;
}

/// Chebyshev points of the first kind mapped to (0,1), ascending.
inline std::vector<double> chebyshev_points(int n) {
    std::vector<double> y(n);
    for (int j = 0; j < n; ++j)
        y[n - 1 - j] = 0.5 * (1.0 + std::cos(std::numbers::pi * (j + 0.5) / n));
    return y;
}

/// Chebyshev-Gauss-Lobatto points (1 - cos(pi q/m))/2, q = 0..m. For m = 0
/// the single node is the midpoint.
inline std::vector<double> chebyshev_lobatto_points(int m) {
    if (m < 0) throw std::invalid_argument("chebyshev_lobatto_points: negative degree");
    if (m == 0) return {0.5};
    std::vector<double> y(m + 1);
    for (int q = 0; q <= m; ++q) y[q] = 0.5 * (1.0 - std::cos(std::numbers::pi * q / m));
    y[0] = 0.0;
    y[m] = 1.0;
    return y;
}

}  // namespace qtt
