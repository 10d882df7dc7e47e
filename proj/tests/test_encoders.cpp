#include <gtest/gtest.h>

#include <random>

#include "qtt/complexity.hpp"
#include "qtt/encoders.hpp"
#include "span_oracle.hpp"

using namespace qtt;

namespace {

double max_abs_diff(const TensorTrain& tt, const std::function<double(double)>& f, int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    double dev = 0.0;
    for (int t = 0; t < n; ++t) {
        double x = U(rng);
        dev = std::max(dev, std::abs(evaluate(tt, x) - f(x)));
    }
    return dev;
}

std::vector<int> oracle_ranks(const std::function<double(double)>& f, int b, int d) {
    std::vector<int> r;
    for (int nu = 1; nu <= d; ++nu) r.push_back(brute_span_rank(f, b, d, nu));
    return r;
}

// Spline basis function x^j on [0,1) (k == 0) or (x - k b^{-d})_+^j.
PiecewisePolynomial truncated_power(int b, int d, std::uint64_t k, int j, int m) {
    const double h = std::pow(b, -d);
    std::vector<Polynomial> pieces;
    for (std::uint64_t c = 0; c < Grid::ipow(b, d); ++c) {
        if (k > 0 && c < k) {
            pieces.push_back(Polynomial::monomial(std::vector<double>(m + 1, 0.0)));
            continue;
        }
        // (c h + h t - k h)^j
        std::vector<double> mono(j + 1, 0.0);
        mono[j] = 1.0;
        Polynomial p = affine_compose(Polynomial::monomial(mono), (c - double(k)) * h, h, PolyBasis(m, BasisKind::monomial));
        pieces.push_back(p);
    }
    return PiecewisePolynomial::uniform(b, d, std::move(pieces));
}

}  // namespace

TEST(EncodePolynomial, IdentityAtPoint) {
    TensorTrain t = encode_polynomial(std::vector<double>{0.0, 1.0}, Grid(2, 3));
    EXPECT_NEAR(evaluate(t, 0.375), 0.375, 1e-15);
}

TEST(EncodePolynomial, ConstantIsRankOne) {
    TensorTrain t = encode_polynomial(std::vector<double>{4.0}, Grid(3, 5));
    EXPECT_EQ(t.stored_ranks(), std::vector<int>(5, 1));
    EXPECT_NEAR(evaluate(t, 0.77), 4.0, 1e-14);
}

TEST(EncodePolynomial, SquareRanks) {
    TensorTrain t = encode_polynomial(std::vector<double>{0.0, 0.0, 1.0}, Grid(2, 2));
    EXPECT_EQ(ranks(t).ranks, (std::vector<int>{2, 3}));
    EXPECT_EQ(oracle_ranks([](double x) { return x * x; }, 2, 2), (std::vector<int>{2, 3}));
}

TEST(EncodePolynomial, GenericDegreeFive) {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    std::vector<double> c(6);
    for (auto& v : c) v = U(rng);
    EXPECT_EQ(polynomial_span_ranks(c, 2, 6), (std::vector<int>{2, 4, 6, 6, 6, 6}));
    // Numerically the degree-k part of the nu-unfolding has relative size about
    // 2^{-k nu}, so thresholded ranks can only undercount at this depth.
    TensorTrain t = encode_polynomial(Polynomial::monomial(c), Grid(2, 6));
    auto r = ranks(round(t, 1e-12)).ranks;
    for (int nu = 1; nu <= 6; ++nu) EXPECT_LE(r[nu - 1], std::min(6, 1 << nu));
    EXPECT_EQ(r[0], 2);
    EXPECT_EQ(r[1], 4);
}

TEST(EncodePolynomial, GenericRanksWhereResolvable) {
    // shallow enough that every component stays well above the threshold
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int m : {1, 2, 3}) {
        std::vector<double> c(m + 1);
        for (auto& v : c) v = U(rng);
        const int d = 4;
        TensorTrain t = encode_polynomial(Polynomial::monomial(c), Grid(2, d));
        std::vector<int> expect;
        for (int nu = 1; nu <= d; ++nu) expect.push_back(std::min(m + 1, 1 << nu));
        EXPECT_EQ(ranks(t).ranks, expect);
        EXPECT_EQ(polynomial_span_ranks(c, 2, d), expect);
    }
}

TEST(EncodePolynomial, ExactForAllKindsAndBases) {
    std::mt19937_64 rng(22);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (BasisKind kind : {BasisKind::legendre, BasisKind::chebyshev, BasisKind::monomial})
        for (int b : {2, 3, 5})
            for (int m : {0, 2, 4}) {
                std::vector<double> c(m + 1);
                for (auto& v : c) v = U(rng);
                Polynomial p = Polynomial::monomial(c);
                TensorTrain t = encode_polynomial(p, Grid(b, 6), kind);
                EXPECT_LE(max_abs_diff(t, [&](double x) { return p(x); }, 1000, 5), 1e-12);
                auto r = ranks(t).ranks;
                for (int nu = 1; nu <= 6; ++nu) EXPECT_LE(r[nu - 1], std::min<double>(m + 1, std::pow(b, nu)));
            }
}

TEST(Arithmetic, LinearPlusComplementIsOne) {
    Grid g(2, 4);
    TensorTrain s = add(encode_polynomial(std::vector<double>{0.0, 1.0}, g),
                        encode_polynomial(std::vector<double>{1.0, -1.0}, g));
    for (double x : {0.0, 0.1, 0.5, 0.93}) EXPECT_NEAR(evaluate(s, x), 1.0, 1e-14);
}

TEST(Arithmetic, ScaledSquare) {
    TensorTrain t = scale(encode_polynomial(std::vector<double>{0.0, 0.0, 1.0}, Grid(2, 3)), 3.0);
    EXPECT_NEAR(evaluate(t, 0.5), 0.75, 1e-14);
}

TEST(FixedKnot, HaarMotherRankOne) {
    TensorTrain h = haar_mother();
    EXPECT_EQ(ranks(h).ranks, (std::vector<int>{1}));
    EXPECT_EQ(evaluate(h, 0.25), -1.0);
    EXPECT_EQ(evaluate(h, 0.75), 1.0);
}

TEST(FixedKnot, HatAtDepthFour) {
    TensorTrain h = encode_fixed_knot_spline(refine_uniform(hat_spline(), 4));
    EXPECT_NEAR(evaluate(h, 0.5), 1.0, 1e-14);
    for (int r : ranks(h).ranks) EXPECT_LE(r, 2);
    EXPECT_EQ(ranks(h).ranks, oracle_ranks([](double x) { return x < 0.5 ? 2 * x : 2 - 2 * x; }, 2, 4));
}

TEST(FixedKnot, RandomDiscontinuousRanks) {
    std::mt19937_64 rng(23);
    PiecewisePolynomial s = random_fixed_knot_spline(2, 3, 1, rng);
    TensorTrain t = encode_fixed_knot_spline(s);
    EXPECT_LE(max_abs_diff(t, [&](double x) { return s(x); }, 1000, 1), 1e-12);
    auto r = ranks(t).ranks;
    for (int nu = 1; nu <= 3; ++nu) EXPECT_LE(r[nu - 1], std::min(2 * (1 << (3 - nu)), 1 << nu));
    EXPECT_EQ(t.stored_ranks(), (std::vector<int>{2, 4, 2}));
}

TEST(FixedKnot, StoredRanksMatchDimensionBound) {
    std::mt19937_64 rng(24);
    for (int b : {2, 3})
        for (int d : {1, 2, 3, 4})
            for (int m : {0, 1, 3}) {
                if (Grid::ipow(b, d) > 81) continue;
                PiecewisePolynomial s = random_fixed_knot_spline(b, d, m, rng);
                TensorTrain t = encode_fixed_knot_spline(s, BasisKind::chebyshev);
                EXPECT_LE(max_abs_diff(t, [&](double x) { return s(x); }, 300, 2), 1e-12);
                auto st = t.stored_ranks();
                for (int nu = 1; nu <= d; ++nu)
                    EXPECT_EQ(st[nu - 1], std::min<double>(std::pow(b, nu), (m + 1) * std::pow(b, d - nu)));
            }
}

TEST(FixedKnot, RejectsNonUniformBreakpoints) {
    PiecewisePolynomial s(2, {{0, 0}, {1, 2}, {1, 0}}, {Polynomial::monomial({1.0}), Polynomial::monomial({2.0})});
    EXPECT_THROW(encode_fixed_knot_spline(s), std::invalid_argument);
}

TEST(FixedKnot, ContinuityRankBound) {
    const int b = 2, d = 4;
    std::mt19937_64 rng(25);
    std::normal_distribution<double> Nd(0.0, 1.0);
    for (int m : {1, 2, 3})
        for (int c = -1; c <= m; ++c) {
            // random element of S_{N,m,c}: polynomial plus truncated powers of order > c
            std::vector<TensorTrain> parts;
            for (int j = 0; j <= m; ++j)
                parts.push_back(scale(encode_fixed_knot_spline(truncated_power(b, d, 0, j, m)), Nd(rng)));
            for (std::uint64_t k = 1; k < Grid::ipow(b, d); ++k)
                for (int j = c + 1; j <= m; ++j)
                    parts.push_back(scale(encode_fixed_knot_spline(truncated_power(b, d, k, j, m)), Nd(rng)));
            TensorTrain f = round(block_sum(parts), 1e-13);
            auto r = ranks(f).ranks;
            for (int nu = 1; nu <= d; ++nu) {
                double bound = std::min((m - c) * std::pow(b, d - nu) + (c + 1), std::pow(b, nu));
                EXPECT_LE(r[nu - 1], bound) << "m=" << m << " c=" << c << " nu=" << nu;
            }
        }
}

TEST(FixedKnot, SplineSpaceDimension) {
    const int b = 2, d = 3;
    const int N = 8;
    for (int m : {1, 2})
        for (int c = -1; c <= m; ++c) {
            std::vector<TensorTrain> basis;
            for (int j = 0; j <= m; ++j) basis.push_back(encode_fixed_knot_spline(truncated_power(b, d, 0, j, m)));
            for (std::uint64_t k = 1; k < Grid::ipow(b, d); ++k)
                for (int j = c + 1; j <= m; ++j)
                    basis.push_back(encode_fixed_knot_spline(truncated_power(b, d, k, j, m)));
            Eigen::MatrixXd G(basis.size(), basis.size());
            for (std::size_t i = 0; i < basis.size(); ++i)
                for (std::size_t j = 0; j < basis.size(); ++j) G(i, j) = inner_product(basis[i], basis[j]);
            Eigen::FullPivLU<Eigen::MatrixXd> lu(G);
            lu.setThreshold(1e-12);
            EXPECT_EQ(lu.rank(), (m + 1) * N - (N - 1) * (c + 1)) << "m=" << m << " c=" << c;
        }
}

TEST(FreeKnot, SinglePieceIsPolynomial) {
    PiecewisePolynomial s(2, {{0, 0}, {1, 0}}, {Polynomial::monomial({1.0, -2.0, 0.5})});
    TensorTrain t = encode_free_knot_spline(s);
    EXPECT_EQ(t.depth(), 0);
    EXPECT_NEAR(evaluate(t, 0.3), s(0.3), 1e-15);
}

TEST(FreeKnot, HalfKnotPiecewiseConstant) {
    PiecewisePolynomial s(2, {{0, 0}, {1, 1}, {1, 0}}, {Polynomial::monomial({1.0}), Polynomial::monomial({3.0})});
    TensorTrain t = encode_free_knot_spline(s);
    for (int r : ranks(round(t, 1e-12)).ranks) EXPECT_LE(r, 1);
    EXPECT_EQ(evaluate(t, 0.2), 1.0);
    EXPECT_EQ(evaluate(t, 0.7), 3.0);
}

TEST(FreeKnot, SubpartitionExample) {
    // [0, 3/8) = [0, 1/4) u [1/4, 3/8)
    auto parts = badic_decomposition(0, 3, 3, 2);
    ASSERT_EQ(parts.size(), 2u);
    EXPECT_EQ(parts[0], (std::pair<int, std::uint64_t>{2, 0}));
    EXPECT_EQ(parts[1], (std::pair<int, std::uint64_t>{3, 2}));
    PiecewisePolynomial s(2, {{0, 0}, {3, 3}, {1, 0}},
                          {Polynomial::monomial({0.0, 1.0}), Polynomial::monomial({1.0, -1.0})});
    auto terms = free_knot_terms(s);
    EXPECT_EQ(std::count_if(terms.begin(), terms.end(), [](const FreeKnotTerm& t) { return t.piece == 0; }), 2);
}

TEST(FreeKnot, RandomSplinesExactAndBounded) {
    std::mt19937_64 rng(26);
    for (int b : {2, 3})
        for (int d : {2, 4, 5})
            for (int N : {2, 5, 9})
                for (int m : {0, 1, 3}) {
                    if (static_cast<std::uint64_t>(N) > Grid::ipow(b, d)) continue;
                    PiecewisePolynomial s = random_free_knot_spline(b, d, N, m, rng);
                    TensorTrain t = encode_free_knot_spline(s);
                    EXPECT_LE(max_abs_diff(t, [&](double x) { return s(x); }, 500, 3), 1e-12);
                    for (int r : t.stored_ranks()) EXPECT_LE(r, m + N);
                    auto rr = ranks(round(t, 1e-12)).ranks;
                    for (int nu = 1; nu <= d; ++nu)
                        EXPECT_LE(rr[nu - 1],
                                  std::min({std::pow(b, nu), (m + 1) * std::pow(b, d - nu), double(m + N)}));
                    EXPECT_LE(max_subpartition(s), static_cast<std::size_t>(2 * d * (b - 1)));
                }
}

TEST(FreeKnot, SparseRepresentationAgrees) {
    std::mt19937_64 rng(27);
    for (int b : {2, 3}) {
        PiecewisePolynomial s = random_free_knot_spline(b, 4, 5, 2, rng);
        TensorTrain sparse = encode_free_knot_spline_sparse(s);
        TensorTrain direct = encode_free_knot_spline(s);
        std::mt19937_64 r2(4);
        std::uniform_real_distribution<double> U(0.0, 1.0);
        for (int t = 0; t < 300; ++t) {
            double x = U(r2);
            EXPECT_NEAR(evaluate(sparse, x), evaluate(direct, x), 1e-12);
        }
        EXPECT_EQ(complexity(sparse).cost_S, free_knot_sparse_cost(s));
    }
}

TEST(FreeKnot, RejectsNonBadicKnot) {
    EXPECT_THROW(knot_from_value(0.3, 2), NonBadicKnot);
    EXPECT_EQ(knot_from_value(0.625, 2), (BadicKnot{5, 3}));
    EXPECT_EQ(knot_from_value(2.0 / 9.0, 3), (BadicKnot{2, 2}));
}

TEST(Dilation, HaarLevelTwo) {
    TensorTrain w = encode_dilated({haar_mother(), 2, 1, 2.0}, 5);
    EXPECT_EQ(ranks(w).ranks, std::vector<int>(5, 1));
    EXPECT_NEAR(l2_norm(w), 1.0, 1e-14);
    auto src = dilate_sampler([](double t) { return t < 0.5 ? -1.0 : 1.0; }, 2, 2, 1);
    EXPECT_LE(max_abs_diff(w, src, 1000, 6), 1e-14);
}

TEST(Dilation, HatLevelOne) {
    TensorTrain w = encode_dilated({hat_mother(), 1, 0, 2.0}, 4);
    auto r = ranks(w).ranks;
    EXPECT_EQ(r, (std::vector<int>{1, 2, 2, 2}));
    auto src = dilate_sampler([](double t) { return t < 0.5 ? 2 * t : 2 - 2 * t; }, 2, 1, 0);
    EXPECT_LE(max_abs_diff(w, src, 1000, 7), 1e-13);
}

TEST(Dilation, LevelZeroIsMother) {
    TensorTrain h = hat_mother();
    TensorTrain w = encode_dilated({h, 0, 0, 2.0}, 1);
    EXPECT_EQ(w.stored_ranks(), h.stored_ranks());
    for (double x : {0.1, 0.6, 0.9}) EXPECT_EQ(evaluate(w, x), evaluate(h, x));
    EXPECT_THROW(encode_dilated({h, 2, 0, 2.0}, 2), std::invalid_argument);
    EXPECT_THROW(encode_dilated({h, 1, 2, 2.0}, 3), std::invalid_argument);
}

TEST(Wavelets, TwoDisjointHaarTerms) {
    TensorTrain a = encode_dilated({haar_mother(), 1, 0, 2.0}, 4);
    TensorTrain b = encode_dilated({haar_mother(), 1, 1, 2.0}, 4);
    TensorTrain s = add(a, b);
    for (int r : s.stored_ranks()) EXPECT_LE(r, 2);
    for (int r : ranks(round(s, 1e-12)).ranks) EXPECT_LE(r, 2);
}

TEST(Wavelets, SingleTermMatchesDilation) {
    WaveletSpec w{hat_mother(), 2, 3, 2.0};
    TensorTrain one = n_term_wavelet({{1.0, w}}, 5);
    TensorTrain ref = encode_dilated(w, 5);
    for (double x : {0.76, 0.8, 0.99, 0.1}) EXPECT_EQ(evaluate(one, x), evaluate(ref, x));
}

TEST(Wavelets, HaarTermsOrthogonalToConstant) {
    std::vector<std::pair<double, WaveletSpec>> terms;
    std::mt19937_64 rng(28);
    std::uniform_real_distribution<double> U(-2.0, 2.0);
    for (std::uint64_t j = 0; j < 8; ++j) terms.push_back({U(rng), WaveletSpec{haar_mother(), 3, j, 2.0}});
    TensorTrain s = n_term_wavelet(terms, 5);
    EXPECT_NEAR(inner_product(s, constant_train(Grid(2, 5), s.basis, 1.0)), 0.0, 1e-12);
    for (int r : ranks(round(s, 1e-12)).ranks) EXPECT_LE(r, 8);
}

TEST(Wavelets, MixedBasesRejected) {
    WaveletSpec a{haar_mother(), 0, 0, 2.0};
    TensorTrain ternary = encode_polynomial(std::vector<double>{1.0}, Grid(3, 1));
    WaveletSpec c{ternary, 0, 0, 2.0};
    EXPECT_THROW(n_term_wavelet({{1.0, a}, {1.0, c}}, 2), std::invalid_argument);
}

TEST(Sawtooth, SingleTooth) {
    TensorTrain s = encode_sawtooth(Grid(2, 1));
    // y = 1/2 on the left leaf, where the tooth is psi_1(y) = y
    EXPECT_NEAR(evaluate(s, 0.25), 0.5, 1e-15);
    EXPECT_NEAR(evaluate(s, 0.75), 0.5, 1e-15);
    EXPECT_NEAR(evaluate(s, 0.0), 0.0, 1e-15);
}

TEST(Sawtooth, StructureAndNorm) {
    for (int d = 1; d <= 10; ++d) {
        TensorTrain s = encode_sawtooth(Grid(2, d));
        EXPECT_EQ(s.stored_ranks(), std::vector<int>(d, 2));
        EXPECT_NEAR(l2_norm(s), std::sqrt(1.0 / 3.0), 1e-13);
        EXPECT_EQ(evaluate(s, 0.0), 0.0);
        EXPECT_LE(complexity(s).cost_C, 8 * d + 2 * 1 + 2);
        EXPECT_LE(max_abs_diff(s, sawtooth_sampler(d), 500, 8), 1e-14);
    }
}

TEST(Sawtooth, NumericalRanksMatchOracle) {
    for (int d : {2, 4, 6}) {
        auto r = ranks(encode_sawtooth(Grid(2, d))).ranks;
        EXPECT_EQ(r, oracle_ranks(sawtooth_sampler(d), 2, d));
        EXPECT_EQ(r.back(), 2);
    }
}

TEST(Sawtooth, RejectsOtherBases) { EXPECT_THROW(encode_sawtooth(Grid(3, 2)), std::invalid_argument); }
