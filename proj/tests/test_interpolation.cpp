#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "qtt/encoders.hpp"
#include "qtt/interpolation.hpp"

using namespace qtt;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double sup_dev(const TensorTrain& tt, const Sampler& f, int per_leaf = 16) {
    const std::uint64_t L = tt.grid.leaves();
    double dev = 0.0;
    for (std::uint64_t j = 0; j < L; ++j)
        for (int q = 0; q <= per_leaf; ++q) {
            // stay clear of the endpoints: within an ulp of a non-dyadic knot
            // the digit expansion may land in either neighbouring leaf
            double y = 1e-9 + (1.0 - 2e-9) * q / per_leaf;
            double x = leaf_point(tt.grid, j, y);
            dev = std::max(dev, std::abs(evaluate(tt, x) - f(x)));
        }
    return dev;
}

double sup_dev_poly(const Polynomial& p, const Sampler& f, int n = 20001) {
    double dev = 0.0;
    for (int k = 0; k < n; ++k) {
        double x = static_cast<double>(k) / (n - 1);
        dev = std::max(dev, std::abs(p(x) - f(x)));
    }
    return dev;
}

double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

TEST(Interpolator, DefaultNodes) {
    EXPECT_EQ(Interpolator(0).nodes, (std::vector<double>{0.5}));
    Interpolator I(2);
    ASSERT_EQ(I.nodes.size(), 3u);
    EXPECT_NEAR(I.nodes[0], 0.0, 1e-15);
    EXPECT_NEAR(I.nodes[1], 0.5, 1e-15);
    EXPECT_NEAR(I.nodes[2], 1.0, 1e-15);
}

TEST(Interpolator, RejectsBadNodes) {
    EXPECT_THROW(Interpolator(1, {0.2}), std::invalid_argument);
    EXPECT_THROW(Interpolator(1, {0.2, 0.2}), std::invalid_argument);
    EXPECT_THROW(Interpolator(1, {0.2, 1.5}), std::invalid_argument);
    EXPECT_THROW(Interpolator(-1), std::invalid_argument);
}

TEST(InterpolateUnit, ReproducesPolynomials) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int m : {0, 1, 3, 6}) {
        std::vector<double> c(m + 1);
        for (auto& v : c) v = U(rng);
        Polynomial q = Polynomial::monomial(c);
        Polynomial r = interpolate_unit([&](double y) { return q(y); }, Interpolator(m), PolyBasis(m, BasisKind::monomial));
        for (int k = 0; k <= m; ++k) EXPECT_NEAR(r.coeffs(k), c[k], 1e-12);
    }
}

TEST(InterpolateUnit, MatchesAtNodes) {
    Interpolator I(1);
    Polynomial r = interpolate_unit([](double y) { return y * y; }, I);
    for (double y : I.nodes) EXPECT_NEAR(r(y), y * y, 1e-15);
    Interpolator J(3, {0.1, 0.4, 0.7, 0.95});
    Polynomial s = interpolate_unit([](double y) { return std::sin(3 * y); }, J);
    for (double y : J.nodes) EXPECT_NEAR(s(y), std::sin(3 * y), 1e-14);
}

TEST(InterpolateUnit, ExpCubicError) {
    Polynomial r = interpolate_unit([](double y) { return std::exp(y); }, Interpolator(3));
    // Lobatto cubic: 1.08516e-3 by a 20001-point grid; the best uniform cubic
    // approximation of exp on [0,1] already has error 5.4479e-4 (LP on 4001 points)
    double err = sup_dev_poly(r, [](double y) { return std::exp(y); });
    EXPECT_NEAR(err, 1.08516e-3, 1e-8);
    EXPECT_LE(err, 2.0 * 5.4479e-4);
}

TEST(InterpolateUnit, NonFiniteSample) {
    EXPECT_THROW(interpolate_unit([](double y) { return 1.0 / y; }, Interpolator(2)), std::domain_error);
}

TEST(TensorInterpolate, LeafEqualsUnitInterpolant) {
    Grid g(3, 3);
    Interpolator I(2);
    Sampler f = [](double x) { return std::cos(5 * x) + x * x * x; };
    TensorTrain t = tensor_interpolate(f, g, I);
    for (std::uint64_t j : {0ull, 7ull, 26ull}) {
        Polynomial r = interpolate_unit(leaf_restriction(f, g, j), I, t.basis);
        Eigen::VectorXd c = leaf_coefficients(t, j);
        EXPECT_LE((c - r.coeffs).cwiseAbs().maxCoeff(), 1e-11);
    }
}

TEST(TensorInterpolate, ExactOnSplines) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int m : {0, 1, 3}) {
        std::vector<Polynomial> pieces;
        for (int k = 0; k < 16; ++k) {
            std::vector<double> c(m + 1);
            for (auto& v : c) v = U(rng);
            pieces.push_back(Polynomial::monomial(c));
        }
        PiecewisePolynomial s = PiecewisePolynomial::uniform(2, 4, pieces);
        TensorTrain t = tensor_interpolate([&](double x) { return s(x); }, Grid(2, 4), Interpolator(m));
        EXPECT_LE(sup_dev(t, [&](double x) { return s(x); }), 1e-11);
    }
}

TEST(TensorInterpolate, Idempotent) {
    Grid g(2, 5);
    Interpolator I(2);
    Sampler f = [](double x) { return std::exp(-3 * x) * std::sin(7 * x); };
    TensorTrain t1 = tensor_interpolate(f, g, I);
    TensorTrain t2 = tensor_interpolate([&](double x) { return evaluate(t1, x); }, g, I);
    EXPECT_LE(sup_dev(t2, [&](double x) { return evaluate(t1, x); }), 1e-11);
}

TEST(TensorInterpolate, HaarRanksOne) {
    Sampler haar = [](double x) { return x < 0.5 ? -1.0 : 1.0; };
    for (int d : {1, 3, 6}) {
        TensorTrain t = tensor_interpolate(haar, Grid(2, d), Interpolator(1));
        EXPECT_EQ(ranks(t).ranks, std::vector<int>(d, 1));
    }
}

TEST(TensorInterpolate, RanksBelowExactEncoding) {
    PiecewisePolynomial hat = refine_uniform(hat_spline(), 5);
    TensorTrain exact = encode_fixed_knot_spline(hat);
    for (int m : {0, 1}) {
        TensorTrain t = tensor_interpolate([&](double x) { return hat(x); }, Grid(2, 5), Interpolator(m));
        auto ri = ranks(t).ranks, re = ranks(exact).ranks;
        for (int nu = 0; nu < 5; ++nu) EXPECT_LE(ri[nu], re[nu]);
    }
}

TEST(TensorInterpolate, DenseLimit) {
    EXPECT_THROW(tensor_interpolate([](double x) { return x; }, Grid(2, 15), Interpolator(1)), std::invalid_argument);
}

TEST(TensorInterpolate, SineConvergenceOrder) {
    Sampler f = [](double x) { return std::sin(kTwoPi * x); };
    for (int m : {1, 2, 3}) {
        std::vector<double> ds, le;
        for (int d = 4; d <= 9; ++d) {
            TensorTrain t = tensor_interpolate(f, Grid(2, d), Interpolator(m));
            ds.push_back(d);
            le.push_back(std::log2(sup_dev(t, f, 24)));
        }
        EXPECT_NEAR(ls_slope(ds, le), -(m + 1.0), 0.1) << "m=" << m;
    }
}

TEST(TensorInterpolate, ErrorConstantStable) {
    // e^x: |f|_{W^{3,inf}} = e, so err * 2^{3d} / e should stay put
    Sampler f = [](double x) { return std::exp(x); };
    std::vector<double> C;
    for (int d = 2; d <= 8; ++d) {
        TensorTrain t = tensor_interpolate(f, Grid(2, d), Interpolator(2));
        C.push_back(sup_dev(t, f, 32) * std::pow(2.0, 3.0 * d) / std::numbers::e);
    }
    double lo = *std::min_element(C.begin(), C.end()), hi = *std::max_element(C.begin(), C.end());
    EXPECT_LE(hi / lo, 1.5);
}

TEST(Reinterpolate, IdentityWhenNothingChanges) {
    Grid g(2, 4);
    Sampler f = [](double x) { return std::sin(3 * x); };
    TensorTrain t = tensor_interpolate(f, g, Interpolator(3));
    TensorTrain r = reinterpolate(t, 4, Interpolator(3));
    EXPECT_LE(sup_dev(r, [&](double x) { return evaluate(t, x); }), 1e-13);
    EXPECT_EQ(r.stored_ranks(), t.stored_ranks());
}

TEST(Reinterpolate, RanksAndRetainedCores) {
    std::mt19937_64 rng(8);
    PiecewisePolynomial s = PiecewisePolynomial::uniform(
        2, 3, {Polynomial::monomial({1, 2, 0, -1}), Polynomial::monomial({0, 1, 1, 1}), Polynomial::monomial({2, 0, 0, 3}),
               Polynomial::monomial({-1, 1, -1, 1}), Polynomial::monomial({0, 0, 0, 1}), Polynomial::monomial({1, 1, 1, 1}),
               Polynomial::monomial({3, 2, 1, 0}), Polynomial::monomial({0, -2, 0, 2})});
    TensorTrain t = encode_fixed_knot_spline(s);
    TensorTrain r = reinterpolate(t, 7, Interpolator(1));
    auto rt = t.stored_ranks(), rr = r.stored_ranks();
    for (int nu = 0; nu < 3; ++nu) EXPECT_EQ(rr[nu], rt[nu]);
    for (int nu = 3; nu < 7; ++nu) EXPECT_LE(rr[nu], 4);
    auto nr = ranks(r).ranks;
    for (int nu = 3; nu < 7; ++nu) EXPECT_LE(nr[nu], 4);
}

TEST(Reinterpolate, PolynomialDegreeReductionRate) {
    // p cubic, m = 1: error ~ C 2^{-2 dbar} |p''|_inf
    Polynomial p = Polynomial::monomial({0.3, -1.0, 2.0, 1.5});
    const double p2 = 4.0 + 9.0;  // max |4 + 9x| on [0,1]
    TensorTrain t = encode_polynomial(p, Grid(2, 2));
    std::vector<double> C;
    for (int dbar = 3; dbar <= 6; ++dbar) {
        TensorTrain r = reinterpolate(t, dbar, Interpolator(1));
        C.push_back(sup_dev(r, [&](double x) { return p(x); }, 32) * std::pow(4.0, dbar) / p2);
    }
    double lo = *std::min_element(C.begin(), C.end()), hi = *std::max_element(C.begin(), C.end());
    EXPECT_LE(hi / lo, 1.5);
    EXPECT_LE(hi, 1.0);
}

TEST(Reinterpolate, ExactOnSuperspace) {
    PiecewisePolynomial s = PiecewisePolynomial::uniform(
        3, 2,
        {Polynomial::monomial({1, 2}), Polynomial::monomial({0, -1}), Polynomial::monomial({2, 1}),
         Polynomial::monomial({-1, 3}), Polynomial::monomial({0, 0}), Polynomial::monomial({1, -1}),
         Polynomial::monomial({3, 2}), Polynomial::monomial({0, -2}), Polynomial::monomial({5, 1})});
    TensorTrain t = encode_fixed_knot_spline(s);
    for (int dbar : {2, 3, 5}) {
        TensorTrain r = reinterpolate(t, dbar, Interpolator(1), BasisKind::chebyshev);
        EXPECT_LE(sup_dev(r, [&](double x) { return s(x); }), 1e-11);
    }
}

TEST(Reinterpolate, RejectsBadTargets) {
    TensorTrain t = encode_polynomial(std::vector<double>{0, 1}, Grid(2, 3));
    EXPECT_THROW(reinterpolate(t, 2, Interpolator(1)), std::invalid_argument);
    EXPECT_THROW(reinterpolate(t, 4, Interpolator(2)), std::invalid_argument);
    EXPECT_THROW(reinterpolate_sparse(t, 2, Interpolator(1)), std::invalid_argument);
}

TEST(ReinterpolateSparse, SameFunction) {
    Sampler f = [](double x) { return std::exp(x) * std::cos(4 * x); };
    for (int b : {2, 3}) {
        TensorTrain t = tensor_interpolate(f, Grid(b, 2), Interpolator(3));
        for (int dbar : {2, 3, 4, 6}) {
            TensorTrain dense = reinterpolate(t, dbar, Interpolator(1));
            TensorTrain sparse = reinterpolate_sparse(t, dbar, Interpolator(1));
            EXPECT_EQ(sparse.depth(), dbar);
            EXPECT_LE(sup_dev(sparse, [&](double x) { return evaluate(dense, x); }, 8), 1e-12) << b << " " << dbar;
        }
    }
}

TEST(ChebyshevTruncate, RecoversPolynomials) {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    Eigen::VectorXd c(5);
    for (int k = 0; k < 5; ++k) c(k) = U(rng);
    Polynomial p(PolyBasis(4, BasisKind::chebyshev), c);
    Polynomial q = chebyshev_truncate([&](double x) { return p(x); }, 7);
    for (int k = 0; k <= 7; ++k) EXPECT_NEAR(q.coeffs(k), k < 5 ? c(k) : 0.0, 1e-13);
}

TEST(ChebyshevTruncate, SingleChebyshevPolynomial) {
    Sampler T3 = [](double x) {
        double t = 2 * x - 1;
        return 4 * t * t * t - 3 * t;
    };
    for (int mbar : {3, 5, 9}) {
        Polynomial q = chebyshev_truncate(T3, mbar);
        for (int k = 0; k <= mbar; ++k) EXPECT_NEAR(q.coeffs(k), k == 3 ? 1.0 : 0.0, 1e-14);
    }
}

TEST(ChebyshevTruncate, AnalyticGeometricDecay) {
    Sampler f = [](double x) { return 1.0 / (x + 2.0); };
    EXPECT_LE(sup_dev_poly(chebyshev_truncate(f, 20), f), 1e-9);
    // shifted pole at x = -2 maps to t = -5: rho = 5 + sqrt(24)
    const double rho = 5.0 + std::sqrt(24.0);
    double e4 = sup_dev_poly(chebyshev_truncate(f, 4), f);
    double e8 = sup_dev_poly(chebyshev_truncate(f, 8), f);
    EXPECT_NEAR(std::log(e4 / e8) / 4.0, std::log(rho), 0.1);
}

TEST(ChebyshevTruncate, Errors) {
    EXPECT_THROW(chebyshev_truncate([](double x) { return x; }, -1), std::invalid_argument);
    EXPECT_THROW(chebyshev_truncate([](double x) { return std::log(x - 0.5); }, 4), std::domain_error);
}
