#pragma once
/// @file cli.hpp
/// @brief The qtt command line: encode, eval, ranks, complexity, audit, study.
///
/// Exit codes: 0 success, 1 failure (including audit violations), 2 usage or
/// parse error, 3 non-b-adic knot, 4 unknown target or audit instance.
/// Errors are reported as a single line starting with "error:".

#include <filesystem>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qtt/analysis.hpp"
#include "qtt/complexity.hpp"
#include "qtt/encoders.hpp"
#include "qtt/interpolation.hpp"
#include "qtt/io.hpp"
#include "qtt/targets.hpp"

namespace qtt {

enum ExitCode : int { kExitOk = 0, kExitFailure = 1, kExitUsage = 2, kExitNonBadic = 3, kExitUnknown = 4 };

struct UnknownInstance : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

namespace cli_detail {

inline std::string one_line(std::string s) {
    for (char& c : s)
        if (c == '\n' || c == '\r') c = ' ';
    return s;
}

inline std::string join(const std::vector<int>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + std::to_string(v[i]);
    return s;
}

inline std::vector<double> parse_schedule(const std::string& s) {
    try {
        return detail::parse_list(s);
    } catch (const std::exception& e) {
        throw FormatError(std::string("schedule: ") + e.what());
    }
}

inline bool looks_like_file(const std::string& s) {
    return (s.size() > 5 && s.substr(s.size() - 5) == ".json") || std::filesystem::is_regular_file(s);
}

/// The spline with knots re-expressed in base b (throws NonBadicKnot).
inline PiecewisePolynomial rebase(const PiecewisePolynomial& s, int b) {
    if (s.base == b) return s;
    std::vector<BadicKnot> knots;
    for (const auto& k : s.knots) knots.push_back(knot_from_value(knot_value(k, s.base), b));
    return PiecewisePolynomial(b, std::move(knots), s.pieces);
}

inline TensorTrain encode_spline(const PiecewisePolynomial& s, std::optional<int> depth, BasisKind kind) {
    const int D = s.max_level();
    TensorTrain tt = s.is_uniform(D) ? encode_fixed_knot_spline(s, kind) : encode_free_knot_spline(s, kind);
    if (depth) {
        if (*depth < D) throw std::invalid_argument("depth " + std::to_string(*depth) + " is below the knot level " + std::to_string(D));
        tt = deepen(tt, *depth - D);
    }
    return tt;
}

inline void print_summary(std::ostream& out, const TensorTrain& tt) {
    ComplexityReport c = complexity(tt);
    out << "base " << tt.grid.base << " depth " << tt.grid.depth << " degree " << tt.basis.degree << " basis "
        << to_string(tt.basis.kind) << '\n';
    out << "stored_ranks " << join(tt.stored_ranks()) << '\n';
    out << "ranks " << join(ranks(tt).ranks) << '\n';
    out << "cost_N " << c.cost_N << " cost_C " << c.cost_C << " cost_S " << c.cost_S << '\n';
}

}  // namespace cli_detail

/// Run the command line on argv-style arguments (args[0] is the program name).
inline int run_cli(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Tensorized function approximation in the tensor-train format", "qtt"};
    app.require_subcommand(1);

    // encode
    auto* enc = app.add_subcommand("encode", "Encode a builtin target or a spline JSON file as a tensor train");
    std::string enc_source;
    int enc_base = 2, enc_depth = 4, enc_degree = 1;
    std::string enc_basis = "legendre", enc_out;
    double enc_round = -1.0;
    enc->add_option("source", enc_source, "Builtin id (sin2pi, inv_xplus2, exp, x_pow:A, sqrt, haar, hat, sawtooth, poly:c0,c1,...) or spline JSON file")
        ->required();
    auto* enc_base_opt = enc->add_option("--base,-b", enc_base, "Base b")->check(CLI::Range(2, 64));
    auto* enc_depth_opt = enc->add_option("--depth,-d", enc_depth, "Depth d")->check(CLI::Range(0, 52));
    enc->add_option("--degree,-m", enc_degree, "Leaf degree for sampled targets")->check(CLI::Range(0, 60));
    enc->add_option("--basis", enc_basis, "Leaf basis")->check(CLI::IsMember({"legendre", "chebyshev", "monomial"}));
    enc->add_option("--round", enc_round, "Round with this relative tolerance");
    enc->add_option("--out,-o", enc_out, "Output TT JSON file");

    // eval
    auto* ev = app.add_subcommand("eval", "Evaluate a TT JSON file at points");
    std::string ev_file;
    std::vector<double> ev_x;
    ev->add_option("file", ev_file, "TT JSON file")->required();
    ev->add_option("x", ev_x, "Points in [0,1)")->required();

    // ranks
    auto* rk = app.add_subcommand("ranks", "Numerical ranks of a TT JSON file");
    std::string rk_file;
    double rk_tol = 1e-10;
    rk->add_option("file", rk_file, "TT JSON file")->required();
    rk->add_option("--tol", rk_tol, "Relative singular value threshold");

    // complexity
    auto* cx = app.add_subcommand("complexity", "cost_N, cost_C, cost_S of a TT JSON file");
    std::string cx_file;
    double cx_zero = 0.0;
    cx->add_option("file", cx_file, "TT JSON file")->required();
    cx->add_option("--zero-tol", cx_zero, "Entries with |v| <= tol count as zero");

    // audit
    auto* au = app.add_subcommand("audit", "Check the encoding complexity bounds");
    std::string au_sweep = "default", au_instance, au_out;
    AuditInstance au_in;
    au->add_option("--sweep", au_sweep, "Parameter sweep")->check(CLI::IsMember({"default"}));
    au->add_option("--instance", au_instance, "Single instance name");
    au->add_option("--b", au_in.b, "Base")->check(CLI::Range(2, 16));
    au->add_option("--d", au_in.d, "Depth")->check(CLI::Range(1, 40));
    auto* au_m_opt = au->add_option("--m", au_in.m, "Degree")->check(CLI::Range(0, 20));
    auto* au_mbar_opt = au->add_option("--mbar", au_in.mbar, "Source degree")->check(CLI::Range(0, 20));
    au->add_option("--N", au_in.N, "Pieces")->check(CLI::Range(1, 1 << 20));
    auto* au_dbar_opt = au->add_option("--dbar", au_in.dbar, "Target depth")->check(CLI::Range(1, 52));
    au->add_option("--seed", au_in.seed, "Seed");
    au->add_option("--out,-o", au_out, "JSON report file");

    // study
    auto* st = app.add_subcommand("study", "Run a convergence study");
    std::string st_kind, st_target, st_csv, st_json, st_p, st_schedule, st_schedule_n;
    int st_b = 2, st_m = 1, st_mbar = 3, st_quad = 8, st_maxdepth = 40, st_dmax = 0, st_Nmax = 0;
    double st_r = 4.0, st_nmax = 0.0;
    std::uint64_t st_seed = 0;
    bool st_no_timing = false;
    st->add_option("kind", st_kind, "sobolev | analytic | adaptive | sawtooth")
        ->required()
        ->check(CLI::IsMember({"sobolev", "analytic", "adaptive", "sawtooth"}));
    auto* st_target_opt = st->add_option("--target", st_target, "Builtin target id");
    auto* st_b_opt = st->add_option("--b", st_b, "Base")->check(CLI::Range(2, 16));
    auto* st_m_opt = st->add_option("--m", st_m, "Degree of the final representation")->check(CLI::Range(0, 20));
    auto* st_mbar_opt = st->add_option("--mbar", st_mbar, "Intermediate degree")->check(CLI::Range(0, 30));
    st->add_option("--p", st_p, "Norm exponent (number or inf)");
    auto* st_r_opt = st->add_option("--r", st_r, "Smoothness order for the depth schedule");
    st->add_option("--dmax", st_dmax, "Depths 1..dmax (sobolev, sawtooth)")->check(CLI::Range(1, 40));
    st->add_option("--nmax", st_nmax, "Largest budget (analytic)")->check(CLI::Range(1.0, 1e7));
    st->add_option("--Nmax", st_Nmax, "Largest piece count (adaptive)")->check(CLI::Range(1, 1 << 16));
    st->add_option("--schedule", st_schedule, "Comma-separated schedule");
    st->add_option("--schedule-n", st_schedule_n, "Comma-separated cost_N track budgets (analytic)");
    auto* st_quad_opt = st->add_option("--quad-order", st_quad, "Quadrature order per leaf")->check(CLI::Range(1, 200));
    auto* st_md_opt = st->add_option("--max-depth", st_maxdepth, "Depth cap for greedy refinement")->check(CLI::Range(1, 52));
    st->add_option("--seed", st_seed, "Seed recorded with the output");
    st->add_option("--csv", st_csv, "CSV output file");
    st->add_option("--json", st_json, "JSON output file");
    st->add_flag("--no-timing", st_no_timing, "Leave the seconds column empty");

    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "error: " << cli_detail::one_line(e.what()) << '\n';
        return kExitUsage;
    }

    try {
        if (*enc) {
            const BasisKind kind = basis_kind_from_string(enc_basis);
            const std::optional<int> depth = enc_depth_opt->count() ? std::optional<int>(enc_depth) : std::nullopt;
            TensorTrain tt;
            if (cli_detail::looks_like_file(enc_source)) {
                PiecewisePolynomial s = spline_from_json(read_json_file(enc_source), enc_base);
                if (enc_base_opt->count()) s = cli_detail::rebase(s, enc_base);
                tt = cli_detail::encode_spline(s, depth, kind);
            } else {
                Target t = make_target(enc_source, enc_depth);
                if (enc_source == "sawtooth" || enc_source.rfind("sawtooth:", 0) == 0) {
                    int d = enc_depth;
                    if (enc_source != "sawtooth") d = static_cast<int>(detail::parse_list(enc_source.substr(9))[0]);
                    if (enc_base != 2) throw std::invalid_argument("the sawtooth needs base 2");
                    tt = encode_sawtooth(Grid(2, d), std::max(enc_degree, 1), kind);
                } else if (enc_source.rfind("poly:", 0) == 0) {
                    Polynomial P = t.spline->pieces[0];
                    tt = encode_polynomial(P, Grid(enc_base, enc_depth), kind);
                } else if (t.spline) {
                    tt = cli_detail::encode_spline(cli_detail::rebase(*t.spline, enc_base), depth, kind);
                } else {
                    tt = tensor_interpolate(t.f, Grid(enc_base, enc_depth), Interpolator(enc_degree), kind);
                }
            }
            if (enc_round >= 0.0) tt = round(tt, enc_round);
            if (!enc_out.empty()) write_text_file(enc_out, tt_to_json(tt).dump() + "\n");
            cli_detail::print_summary(out, tt);
            return kExitOk;
        }
        if (*ev) {
            TensorTrain tt = tt_from_json(read_json_file(ev_file));
            for (double x : ev_x) out << format_double(x) << ' ' << format_double(evaluate(tt, x)) << '\n';
            return kExitOk;
        }
        if (*rk) {
            TensorTrain tt = tt_from_json(read_json_file(rk_file));
            out << "ranks " << cli_detail::join(ranks(tt, rk_tol).ranks) << '\n';
            out << "stored_ranks " << cli_detail::join(tt.stored_ranks()) << '\n';
            return kExitOk;
        }
        if (*cx) {
            TensorTrain tt = tt_from_json(read_json_file(cx_file));
            out << complexity_to_json(complexity(tt, cx_zero)).dump() << '\n';
            return kExitOk;
        }
        if (*au) {
            std::vector<AuditInstance> list;
            if (!au_instance.empty()) {
                const auto& names = audit_instance_names();
                if (std::find(names.begin(), names.end(), au_instance) == names.end())
                    throw UnknownInstance("unknown audit instance '" + au_instance + "'");
                au_in.name = au_instance;
                if (!au_m_opt->count() && au_mbar_opt->count()) au_in.m = std::min(au_in.m, au_in.mbar);
                if (!au_mbar_opt->count()) au_in.mbar = au_in.m;
                if (!au_dbar_opt->count()) au_in.dbar = au_in.d;
                list.push_back(au_in);
            } else {
                list = default_audit_sweep();
            }
            json report = json::array();
            int failures = 0;
            for (const auto& in : list) {
                AuditRecord r = audit_bounds(in);
                failures += r.pass ? 0 : 1;
                report.push_back(audit_to_json(r));
            }
            json doc = {{"instances", list.size()}, {"failures", failures}, {"pass", failures == 0}, {"records", report}};
            if (!au_out.empty())
                write_text_file(au_out, doc.dump(2) + "\n");
            else if (list.size() == 1)
                out << report[0].dump() << '\n';
            out << "audit " << list.size() << " instances, " << failures << " failures\n";
            return failures == 0 ? kExitOk : kExitFailure;
        }
        if (*st) {
            StudyConfig cfg = default_study_config(st_kind);
            if (st_target_opt->count()) cfg.target = st_target;
            if (st_b_opt->count()) cfg.b = st_b;
            if (st_m_opt->count()) cfg.m = st_m;
            if (st_mbar_opt->count()) cfg.mbar = st_mbar;
            if (!st_p.empty()) cfg.p = p_from_string(st_p);
            if (st_r_opt->count()) cfg.r = st_r;
            if (st_quad_opt->count()) cfg.quad_order = st_quad;
            if (st_md_opt->count()) cfg.max_depth = st_maxdepth;
            cfg.seed = st_seed;
            if (st_dmax > 0) {
                cfg.schedule.clear();
                for (int d = 1; d <= st_dmax; ++d) cfg.schedule.push_back(d);
            }
            if (st_nmax > 0.0) {
                cfg.schedule.clear();
                for (int k = 0; std::floor(std::pow(4.2 + 0.6 * k, 3.0)) <= st_nmax; ++k)
                    cfg.schedule.push_back(std::floor(std::pow(4.2 + 0.6 * k, 3.0)));
                cfg.schedule_n.clear();
                for (int k = 2; k <= 18 && k * k <= st_nmax; ++k) cfg.schedule_n.push_back(k * k);
            }
            if (st_Nmax > 0) {
                cfg.schedule.clear();
                for (int N = 8; N <= st_Nmax; N *= 2) cfg.schedule.push_back(N);
            }
            if (!st_schedule.empty()) cfg.schedule = cli_detail::parse_schedule(st_schedule);
            if (!st_schedule_n.empty()) cfg.schedule_n = cli_detail::parse_schedule(st_schedule_n);
            if (cfg.study != "sawtooth") make_target(cfg.target);  // validate before computing
            std::vector<ErrorRecord> rs = run_study(cfg);
            std::ostringstream csv;
            write_csv(csv, rs, !st_no_timing);
            if (!st_csv.empty())
                write_text_file(st_csv, csv.str());
            else
                out << csv.str();
            auto fits = study_fits(cfg, rs);
            json jf = json::array();
            for (const auto& f : fits) {
                out << "fit " << f.label << ": slope " << format_double(f.fit.slope) << " r2 " << format_double(f.fit.r2)
                    << '\n';
                jf.push_back({{"label", f.label}, {"slope", f.fit.slope}, {"intercept", f.fit.intercept}, {"r2", f.fit.r2}});
            }
            if (cfg.study == "sawtooth") {
                double worst = 0.0;
                for (const auto& r : rs) worst = std::max(worst, r.error);
                out << "rows " << rs.size() << " max error " << format_double(worst) << '\n';
            }
            if (!st_json.empty()) {
                json recs = json::array();
                for (const auto& r : rs) recs.push_back(record_to_json(r));
                write_text_file(st_json, json({{"config", config_to_json(cfg)}, {"records", recs}, {"fits", jf}}).dump(2) + "\n");
            }
            return kExitOk;
        }
    } catch (const NonBadicKnot& e) {
        err << "error: " << cli_detail::one_line(e.what()) << '\n';
        return kExitNonBadic;
    } catch (const UnknownTarget& e) {
        err << "error: " << cli_detail::one_line(e.what()) << '\n';
        return kExitUnknown;
    } catch (const UnknownInstance& e) {
        err << "error: " << cli_detail::one_line(e.what()) << '\n';
        return kExitUnknown;
    } catch (const FormatError& e) {
        err << "error: " << cli_detail::one_line(e.what()) << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << cli_detail::one_line(e.what()) << '\n';
        return kExitFailure;
    }
    return kExitUsage;
}

inline int run_cli(int argc, char** argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    return run_cli(std::vector<std::string>(argv, argv + argc), out, err);
}

}  // namespace qtt
