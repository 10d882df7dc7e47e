#pragma once
/// @file analysis.hpp
/// @brief Error norms, the brute-force span-rank oracle, greedy b-adic knot
/// selection and the convergence study drivers.

#include <Eigen/Dense>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

#include "qtt/complexity.hpp"
#include "qtt/encoders.hpp"
#include "qtt/interpolation.hpp"
#include "qtt/quadrature.hpp"
#include "qtt/targets.hpp"
#include "qtt/tensor_train.hpp"

namespace qtt {

// ------------------------------------------------------------------ error norms

/// Largest b^d accepted by the leafwise error routines.
inline constexpr std::uint64_t kMaxErrorLeaves = std::uint64_t{1} << 22;

/// ||f - tt||_p by Gauss-Legendre quadrature of order `quad_order` on every
/// depth-d leaf, combined as (sum_j b^-d e_j^p)^(1/p). For p = infinity the
/// maximum over max(64, quad_order) equispaced points per leaf (ends included).
inline double lp_error(const Sampler& f, const TensorTrain& tt, double p, int quad_order = 8) {
    if (!(p > 0.0)) throw std::domain_error("lp_error: p must be positive");
    if (tt.grid.leaves() > kMaxErrorLeaves) throw std::invalid_argument("lp_error: too many leaves");
    const bool sup = std::isinf(p);
    std::vector<double> ys;
    std::vector<double> ws;
    if (sup) {
        const int K = std::max(64, quad_order);
        for (int q = 0; q < K; ++q) ys.push_back(static_cast<double>(q) / (K - 1));
    } else {
        const auto& rule = gauss_legendre(quad_order);
        ys = rule.nodes;
        ws = rule.weights;
    }
    const Eigen::MatrixXd Phi = tt.basis.vandermonde(ys);
    const double h = 1.0 / static_cast<double>(tt.grid.leaves());
    double acc = 0.0;
    for_each_leaf(tt, [&](std::uint64_t j, const Eigen::VectorXd& c) {
        Eigen::VectorXd v = Phi * c;
        double local = 0.0;
        for (std::size_t q = 0; q < ys.size(); ++q) {
            double e = std::abs(f(leaf_point(tt.grid, j, ys[q])) - v(static_cast<Eigen::Index>(q)));
            if (sup)
                local = std::max(local, e);
            else
                local += ws[q] * std::pow(e, p);
        }
        if (sup)
            acc = std::max(acc, local);
        else
            acc += h * local;
    });
    return sup ? acc : std::pow(acc, 1.0 / p);
}

/// Local L^p error of a polynomial q (in local coordinates) against f on
/// [a, a + h), raised to the power p (the maximum for p = infinity).
inline double local_error_power(const Sampler& f, const Polynomial& q, double a, double h, double p, int quad_order) {
    if (std::isinf(p)) {
        const int K = std::max(64, quad_order);
        double e = 0.0;
        for (int k = 0; k < K; ++k) {
            double y = static_cast<double>(k) / (K - 1);
            double x = (k == K - 1) ? std::nextafter(a + h, a) : a + h * y;
            e = std::max(e, std::abs(f(x) - q(y)));
        }
        return e;
    }
    const auto& rule = gauss_legendre(quad_order);
    double s = 0.0;
    for (std::size_t k = 0; k < rule.nodes.size(); ++k)
        s += rule.weights[k] * std::pow(std::abs(f(a + h * rule.nodes[k]) - q(rule.nodes[k])), p);
    return h * s;
}

/// ||f - s||_p with the same per-piece rule for every piece.
inline double lp_error(const Sampler& f, const PiecewisePolynomial& s, double p, int quad_order = 24) {
    if (!(p > 0.0)) throw std::domain_error("lp_error: p must be positive");
    double acc = 0.0;
    for (std::size_t k = 0; k < s.size(); ++k) {
        double a = knot_value(s.knots[k], s.base);
        double h = knot_value(s.knots[k + 1], s.base) - a;
        double e = local_error_power(f, s.pieces[k], a, h, p, quad_order);
        acc = std::isinf(p) ? std::max(acc, e) : acc + e;
    }
    return std::isinf(p) ? acc : std::pow(acc, 1.0 / p);
}

// ------------------------------------------------------------------ rank oracle

/// Numerical rank of the b^nu x S matrix whose row j samples
/// x -> f(b^-nu (j + x)). Every depth-d leaf inside the row contributes
/// `samples_per_leaf` Chebyshev points, so splines of degree below that are
/// captured exactly. Singular values above tol * sigma_max are counted.
inline int rank_span_oracle(const Sampler& f, const Grid& grid, int nu, int samples_per_leaf = 8, double tol = 1e-8) {
    if (nu < 1 || nu > grid.depth) throw std::invalid_argument("rank_span_oracle: need 1 <= nu <= d");
    const auto rows = static_cast<Eigen::Index>(Grid::ipow(grid.base, nu));
    const auto cells = static_cast<Eigen::Index>(Grid::ipow(grid.base, grid.depth - nu));
    const auto nodes = chebyshev_points(samples_per_leaf);
    Eigen::MatrixXd M(rows, cells * samples_per_leaf);
    for (Eigen::Index j = 0; j < rows; ++j)
        for (Eigen::Index q = 0; q < cells; ++q)
            for (int u = 0; u < samples_per_leaf; ++u) {
                double x = (static_cast<double>(j) + (static_cast<double>(q) + nodes[u]) / static_cast<double>(cells)) /
                           static_cast<double>(rows);
                M(j, q * samples_per_leaf + u) = f(x);
            }
    Eigen::BDCSVD<Eigen::MatrixXd> svd(M);
    const auto& s = svd.singularValues();
    if (s.size() == 0 || s(0) == 0.0) return 0;
    int r = 0;
    while (r < s.size() && s(r) > tol * s(0)) ++r;
    return r;
}

// ------------------------------------------------------------ greedy free knots

struct GreedyResult {
    PiecewisePolynomial spline;
    bool depth_capped = false;   // some interval wanted to split past max_depth
    bool budget_reached = false;  // another split would exceed N pieces
};

/// Local fit used on every interval: interpolation at Chebyshev-Lobatto nodes.
inline Polynomial local_fit(const Sampler& f, double a, double h, int degree) {
    Interpolator I(degree);
    const double right = a + h;
    return interpolate_unit(
        [&](double y) {
            double x = a + h * y;
            return f(x < right ? x : std::nextafter(right, a));
        },
        I,
        PolyBasis(degree, BasisKind::monomial));
}

/// Free b-adic-knot spline with at most N pieces: start from [0,1) and
/// repeatedly split the interval with the largest local error into b children.
inline GreedyResult greedy_badic_knots(const Sampler& f, int N, int mbar, double p, int max_depth, int b = 2,
                                       int quad_order = 24) {
    if (N < 1) throw std::invalid_argument("greedy_badic_knots: N must be positive");
    if (b < 2) throw std::invalid_argument("greedy_badic_knots: base must be >= 2");
    const int level_cap = static_cast<int>(std::floor(52.0 / std::log2(static_cast<double>(b))));
    max_depth = std::min(max_depth, level_cap);
    struct Cell {
        int level;
        std::uint64_t index;
        Polynomial poly;
        double err;
    };
    auto make = [&](int level, std::uint64_t index) {
        const double h = std::pow(static_cast<double>(b), -level);
        const double a = static_cast<double>(index) * h;
        Polynomial q = local_fit(f, a, h, mbar);
        return Cell{level, index, q, local_error_power(f, q, a, h, p, quad_order)};
    };
    auto cmp = [](const Cell& x, const Cell& y) {
        if (x.err != y.err) return x.err < y.err;
        if (x.level != y.level) return x.level > y.level;
        return x.index > y.index;
    };
    // the fit already matches f to rounding level; splitting cannot help
    auto resolved = [&](const Cell& c) {
        const double tol = 1e-13 * std::max(c.poly.coeffs.cwiseAbs().sum(), std::numeric_limits<double>::min());
        if (std::isinf(p)) return c.err <= tol;
        return c.err <= std::pow(static_cast<double>(b), -c.level) * std::pow(tol, p);
    };
    std::priority_queue<Cell, std::vector<Cell>, decltype(cmp)> open(cmp);
    std::vector<Cell> done;
    open.push(make(0, 0));
    int count = 1;
    GreedyResult out;
    while (!open.empty()) {
        if (count + (b - 1) > N) {
            out.budget_reached = true;
            break;
        }
        Cell c = open.top();
        open.pop();
        if (resolved(c)) {
            done.push_back(c);
            continue;
        }
        if (c.level >= max_depth) {
            out.depth_capped = true;
            done.push_back(c);
            continue;
        }
        for (int i = 0; i < b; ++i) open.push(make(c.level + 1, c.index * b + i));
        count += b - 1;
    }
    while (!open.empty()) {
        done.push_back(open.top());
        open.pop();
    }
    std::sort(done.begin(), done.end(), [b](const Cell& x, const Cell& y) {
        return knot_value({x.index, x.level}, b) < knot_value({y.index, y.level}, b);
    });
    std::vector<BadicKnot> knots;
    std::vector<Polynomial> pieces;
    for (const auto& c : done) {
        knots.push_back({c.index, c.level});
        pieces.push_back(c.poly);
    }
    knots.push_back({1, 0});
    out.spline = PiecewisePolynomial(b, std::move(knots), std::move(pieces));
    return out;
}

/// N uniform pieces (N a power of b) with the same local fit.
inline PiecewisePolynomial uniform_fit(const Sampler& f, int b, int d, int degree) {
    const std::uint64_t n = Grid::ipow(b, d);
    std::vector<Polynomial> pieces;
    pieces.reserve(n);
    const double h = 1.0 / static_cast<double>(n);
    for (std::uint64_t j = 0; j < n; ++j) pieces.push_back(local_fit(f, static_cast<double>(j) * h, h, degree));
    return PiecewisePolynomial::uniform(b, d, std::move(pieces));
}

// --------------------------------------------------------------------- fitting

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

/// Least squares y = slope x + intercept.
inline LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("linear_fit: need two or more points");
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i] / n;
        my += y[i] / n;
    }
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r2 = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
    return fit;
}

// ---------------------------------------------------------------------- studies

struct ErrorRecord {
    std::string study;
    std::string target;
    int b = 2;
    int m = 1;
    double p = 2.0;
    std::int64_t n = 1;     // budget or measured cost, see cost_kind
    std::string cost_kind;  // N | C | S | pieces | uniform_pieces
    int depth = 0;
    int degree = 0;
    double error = 0.0;
    double seconds = 0.0;
    std::uint64_t seed = 0;
    std::int64_t measured_cost = 0;  // cost of the built train (equals n unless n is a budget)
};

struct StudyConfig {
    std::string study = "sobolev";  // sobolev | analytic | adaptive | sawtooth
    std::string target = "sin2pi";
    int b = 2;
    int m = 1;                 // degree of the final representation
    int mbar = 3;              // degree of the intermediate approximation (sobolev)
    double p = 2.0;
    double r = 4.0;            // smoothness order used by the sobolev depth schedule
    std::vector<double> schedule;    // d (sobolev, sawtooth), n (analytic, cost_C track), N (adaptive)
    std::vector<double> schedule_n;  // analytic cost_N track budgets
    int quad_order = 8;
    int max_depth = 40;
    std::uint64_t seed = 0;
    std::string output;
};

/// Schedules used when none is given.
inline StudyConfig default_study_config(const std::string& study) {
    StudyConfig c;
    c.study = study;
    if (study == "sobolev") {
        c.target = "sin2pi";
        for (int d = 1; d <= 10; ++d) c.schedule.push_back(d);
    } else if (study == "analytic") {
        c.target = "inv_xplus2";
        c.p = std::numeric_limits<double>::infinity();
        // evenly spaced in n^{1/3} from 4.2 to 14.4
        for (int k = 0; k <= 17; ++k) c.schedule.push_back(std::floor(std::pow(4.2 + 0.6 * k, 3.0)));
        for (int k = 2; k <= 18; ++k) c.schedule_n.push_back(k * k);
    } else if (study == "adaptive") {
        c.target = "x_pow:0.6";
        c.mbar = 1;
        for (int N = 8; N <= 256; N *= 2) c.schedule.push_back(N);
    } else if (study == "sawtooth") {
        c.target = "sawtooth";
        for (int d = 1; d <= 10; ++d) c.schedule.push_back(d);
    } else {
        throw std::invalid_argument("unknown study '" + study + "'");
    }
    return c;
}

namespace detail {

inline void require_increasing(const std::vector<double>& s, const char* what) {
    for (std::size_t i = 1; i < s.size(); ++i)
        if (!(s[i] > s[i - 1])) throw std::invalid_argument(std::string(what) + ": schedule must be strictly increasing");
}

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

inline ErrorRecord base_record(const StudyConfig& c) {
    ErrorRecord r;
    r.study = c.study;
    r.target = c.target;
    r.b = c.b;
    r.m = c.m;
    r.p = c.p;
    r.seed = c.seed;
    return r;
}

inline void push_costs(std::vector<ErrorRecord>& out, ErrorRecord r, const ComplexityReport& c,
                       std::int64_t cost_S) {
    r.cost_kind = "N";
    r.n = r.measured_cost = c.cost_N;
    out.push_back(r);
    r.cost_kind = "C";
    r.n = r.measured_cost = c.cost_C;
    out.push_back(r);
    r.cost_kind = "S";
    r.n = r.measured_cost = cost_S;
    out.push_back(r);
}

}  // namespace detail

/// For each d: s = I_{b,d,mbar} f encoded as a fixed-knot spline, then
/// re-interpolated to degree m at dbar = ceil(d r / (m+1)). Costs are those of
/// the stored train.
inline std::vector<ErrorRecord> study_sobolev(const StudyConfig& cfg) {
    detail::require_increasing(cfg.schedule, "sobolev");
    Target t = make_target(cfg.target);
    std::vector<ErrorRecord> out;
    for (double dv : cfg.schedule) {
        const auto t0 = std::chrono::steady_clock::now();
        const int d = static_cast<int>(dv);
        const int dbar = static_cast<int>(std::ceil(d * cfg.r / (cfg.m + 1.0) - 1e-12));
        TensorTrain src = encode_fixed_knot_spline(interpolant_spline(t.f, Grid(cfg.b, d), Interpolator(cfg.mbar)));
        TensorTrain s = reinterpolate(src, std::max(dbar, d), Interpolator(cfg.m));
        ErrorRecord r = detail::base_record(cfg);
        r.depth = s.depth();
        r.degree = cfg.m;
        r.error = lp_error(t.f, s, cfg.p, cfg.quad_order);
        ComplexityReport c = complexity(s);
        r.seconds = detail::seconds_since(t0);
        detail::push_costs(out, r, c, c.cost_S);
    }
    return out;
}

/// The two schedules for analytic targets. cost_C track: d = floor(n^{1/3}/b -
/// (m+1) n^{-2/3}), mbar = floor(n^{1/3} - 1). cost_N track: d = floor(n^{1/2}),
/// mbar = floor(n^{1/2} - 1). The Chebyshev truncation of degree mbar is
/// interpolated into V_{b,d,m}; n is the budget and measured_cost the cost.
inline std::vector<ErrorRecord> study_analytic(const StudyConfig& cfg) {
    detail::require_increasing(cfg.schedule, "analytic");
    detail::require_increasing(cfg.schedule_n, "analytic");
    Target t = make_target(cfg.target);
    std::vector<ErrorRecord> out;
    auto run = [&](double n, bool c_track) {
        const auto t0 = std::chrono::steady_clock::now();
        int d = 0, mbar = 0;
        if (c_track) {
            const double c3 = std::cbrt(n);
            d = static_cast<int>(std::floor(c3 / cfg.b - (cfg.m + 1.0) / (c3 * c3)));
            mbar = static_cast<int>(std::floor(c3 - 1.0));
        } else {
            const double s2 = std::sqrt(n);
            d = static_cast<int>(std::floor(s2));
            mbar = static_cast<int>(std::floor(s2 - 1.0));
        }
        if (d < 1 || mbar < cfg.m) return;  // schedule not yet defined at this budget
        Polynomial P = chebyshev_truncate(t.f, mbar);
        TensorTrain s = reinterpolate(encode_polynomial(P, Grid(cfg.b, 0), BasisKind::chebyshev), d,
                                      Interpolator(cfg.m));
        ErrorRecord r = detail::base_record(cfg);
        r.cost_kind = c_track ? "C" : "N";
        r.n = static_cast<std::int64_t>(n);
        ComplexityReport c = complexity(s);
        r.measured_cost = c_track ? c.cost_C : c.cost_N;
        r.depth = d;
        r.degree = mbar;
        r.error = lp_error(t.f, s, cfg.p, cfg.quad_order);
        r.seconds = detail::seconds_since(t0);
        out.push_back(r);
    };
    for (double n : cfg.schedule) run(n, true);
    for (double n : cfg.schedule_n) run(n, false);
    return out;
}

/// For each budget N: greedy b-adic free knots with local degree m, encoded
/// directly and rounded (cost_N, cost_C) and as the sparse sum of b-adic terms
/// (cost_S); plus the uniform N-piece fit when N is a power of b. All errors
/// use the same per-piece quadrature.
inline std::vector<ErrorRecord> study_adaptive(const StudyConfig& cfg) {
    detail::require_increasing(cfg.schedule, "adaptive");
    Target t = make_target(cfg.target);
    std::vector<ErrorRecord> out;
    const int qo = std::max(cfg.quad_order, 24);
    for (double Nv : cfg.schedule) {
        const auto t0 = std::chrono::steady_clock::now();
        const int N = static_cast<int>(Nv);
        GreedyResult g = greedy_badic_knots(t.f, N, cfg.m, cfg.p, cfg.max_depth, cfg.b, qo);
        ErrorRecord r = detail::base_record(cfg);
        r.depth = g.spline.max_level();
        r.degree = cfg.m;
        r.error = lp_error(t.f, g.spline, cfg.p, qo);
        ComplexityReport c = complexity(round(encode_free_knot_spline(g.spline), 1e-12));
        std::int64_t cs = free_knot_sparse_cost(g.spline);
        r.seconds = detail::seconds_since(t0);
        detail::push_costs(out, r, c, cs);
        r.cost_kind = "pieces";
        r.n = r.measured_cost = static_cast<std::int64_t>(g.spline.size());
        out.push_back(r);
        // uniform comparison
        double lev = std::log(Nv) / std::log(static_cast<double>(cfg.b));
        int d = static_cast<int>(std::lround(lev));
        if (Grid::ipow(cfg.b, d) == static_cast<std::uint64_t>(N)) {
            const auto t1 = std::chrono::steady_clock::now();
            PiecewisePolynomial u = uniform_fit(t.f, cfg.b, d, cfg.m);
            ErrorRecord ur = detail::base_record(cfg);
            ur.cost_kind = "uniform_pieces";
            ur.n = ur.measured_cost = N;
            ur.depth = d;
            ur.degree = cfg.m;
            ur.error = lp_error(t.f, u, cfg.p, qo);
            ur.seconds = detail::seconds_since(t1);
            out.push_back(ur);
        }
    }
    return out;
}

/// For each d: the sawtooth train, its error against the pointwise definition
/// and its costs.
inline std::vector<ErrorRecord> study_sawtooth(const StudyConfig& cfg) {
    detail::require_increasing(cfg.schedule, "sawtooth");
    if (cfg.b != 2) throw std::invalid_argument("sawtooth study needs b = 2");
    std::vector<ErrorRecord> out;
    for (double dv : cfg.schedule) {
        const auto t0 = std::chrono::steady_clock::now();
        const int d = static_cast<int>(dv);
        TensorTrain s = encode_sawtooth(Grid(2, d), std::max(cfg.m, 1));
        ErrorRecord r = detail::base_record(cfg);
        r.depth = d;
        r.degree = std::max(cfg.m, 1);
        r.error = lp_error(sawtooth_sampler(d), s, cfg.p, cfg.quad_order);
        ComplexityReport c = complexity(s);
        r.seconds = detail::seconds_since(t0);
        r.cost_kind = "C";
        r.n = r.measured_cost = c.cost_C;
        out.push_back(r);
    }
    return out;
}

inline std::vector<ErrorRecord> run_study(const StudyConfig& cfg) {
    if (cfg.study == "sobolev") return study_sobolev(cfg);
    if (cfg.study == "analytic") return study_analytic(cfg);
    if (cfg.study == "adaptive") return study_adaptive(cfg);
    if (cfg.study == "sawtooth") return study_sawtooth(cfg);
    throw std::invalid_argument("unknown study '" + cfg.study + "'");
}

/// Records of one cost kind, in schedule order.
inline std::vector<ErrorRecord> select_kind(const std::vector<ErrorRecord>& rs, const std::string& kind) {
    std::vector<ErrorRecord> out;
    for (const auto& r : rs)
        if (r.cost_kind == kind) out.push_back(r);
    return out;
}

/// Fit of log_b(error) against log_b(n) over the upper half of the records.
inline LinearFit rate_fit(const std::vector<ErrorRecord>& rs, double base) {
    std::vector<double> x, y;
    const std::size_t start = rs.size() / 2;
    for (std::size_t i = start; i < rs.size(); ++i) {
        x.push_back(std::log(static_cast<double>(rs[i].n)) / std::log(base));
        y.push_back(std::log(rs[i].error) / std::log(base));
    }
    return linear_fit(x, y);
}

struct FitSummary {
    std::string label;  // which records and axes were fitted
    LinearFit fit;
};

/// The fits reported for each study. sobolev: log_b error against log_b n over
/// the upper half, per cost kind. analytic: log error against n^{1/3} (C track)
/// and n^{1/2} (N track). adaptive: log_b error against log_b N for the greedy
/// and the uniform fits, and the upper-half cost fits.
inline std::vector<FitSummary> study_fits(const StudyConfig& cfg, const std::vector<ErrorRecord>& rs) {
    std::vector<FitSummary> out;
    auto loglog = [&](const std::string& kind) {
        auto sel = select_kind(rs, kind);
        std::vector<double> x, y;
        for (const auto& r : sel) {
            x.push_back(std::log(static_cast<double>(r.n)) / std::log(double(cfg.b)));
            y.push_back(std::log(r.error) / std::log(double(cfg.b)));
        }
        return linear_fit(x, y);
    };
    auto upper = [&](const std::string& kind) {
        auto sel = select_kind(rs, kind);
        if (sel.size() >= 4) out.push_back({"cost_" + kind + " log-log (upper half)", rate_fit(sel, cfg.b)});
    };
    if (cfg.study == "sobolev") {
        for (const char* k : {"C", "N", "S"}) upper(k);
    } else if (cfg.study == "analytic") {
        for (auto [k, power] : {std::pair<const char*, double>{"C", 1.0 / 3.0}, {"N", 0.5}}) {
            auto sel = select_kind(rs, k);
            if (sel.size() < 2) continue;
            std::vector<double> x, y;
            for (const auto& r : sel) {
                x.push_back(std::pow(static_cast<double>(r.n), power));
                y.push_back(std::log(r.error));
            }
            out.push_back({std::string("cost_") + k + (power < 0.4 ? " log(error) vs n^(1/3)" : " log(error) vs n^(1/2)"),
                           linear_fit(x, y)});
        }
    } else if (cfg.study == "adaptive") {
        if (select_kind(rs, "pieces").size() >= 2) out.push_back({"greedy pieces log-log", loglog("pieces")});
        if (select_kind(rs, "uniform_pieces").size() >= 2) out.push_back({"uniform pieces log-log", loglog("uniform_pieces")});
        for (const char* k : {"S", "N", "C"}) upper(k);
    }
    return out;
}

// ---------------------------------------------------- re-interpolation bound

struct ReinterpolationRow {
    int d = 0;
    int dbar = 0;
    double error = 0.0;  // ||s - s~||_2, exact
    double shape = 0.0;  // the two-term bound without its constant
};

/// s = I_{b,d,mbar} f and s~ = I_{b,dbar,m} s for each (d, dbar); the L^2
/// difference is computed exactly from the trains. Seminorms come from the
/// target's analytic derivatives.
inline std::vector<ReinterpolationRow> reinterpolation_rows(const Target& t, int b, int mbar, int m,
                                                            const std::vector<std::pair<int, int>>& pairs) {
    const double sm = sobolev_seminorm(t, m + 1, 2.0);
    const double smb = sobolev_seminorm(t, mbar + 1, 2.0);
    std::vector<ReinterpolationRow> rows;
    for (auto [d, dbar] : pairs) {
        TensorTrain s = encode_fixed_knot_spline(interpolant_spline(t.f, Grid(b, d), Interpolator(mbar)));
        TensorTrain st = reinterpolate(s, dbar, Interpolator(m));
        TensorTrain diff = add(deepen(s, dbar - d), scale(change_leaf_basis(st, s.basis), -1.0));
        // orthogonalize first so the norm is not formed by cancellation
        ReinterpolationRow r{d, dbar, l2_norm(round(diff, 0.0)), 0.0};
        r.shape = std::pow(b, -dbar * (m + 1.0)) * sm + std::pow(b, -(dbar - d) * (m + 1.0) - d * (mbar + 1.0)) * smb;
        rows.push_back(r);
    }
    return rows;
}

}  // namespace qtt
