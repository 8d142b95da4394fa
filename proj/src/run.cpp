#include "fraclab/run.hpp"

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "fraclab/cache.hpp"
#include "fraclab/catalog.hpp"
#include "fraclab/contour.hpp"
#include "fraclab/errors.hpp"
#include "fraclab/nonlocal.hpp"
#include "fraclab/numeric.hpp"
#include "fraclab/regularity.hpp"
#include "fraclab/report.hpp"
#include "fraclab/spectral.hpp"

namespace fraclab {

namespace {

struct RunConfig {
    std::string command;
    std::string bc = "dirichlet";
    double a = 0.5;
    std::string rhs = "const";
    std::string coef = "const:1";
    int n = 1024;
    int quad_q = 200;
    double quad_step = 0.0;     // 0: balanced default
    bool dump_coeffs = false;
    std::string out;
    std::string cache_dir;
    long seed = 1;
    double tol_beta = 0.15;
    double tol_theta = 0.05;
    double interval_left = 0.0;
    double interval_right = M_PI;
};

BcKind parse_bc(const std::string& s) {
    if (s == "dirichlet") return BcKind::Dirichlet;
    if (s == "neumann") return BcKind::Neumann;
    throw CLI::ValidationError("--bc", "must be 'dirichlet' or 'neumann'");
}

bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

std::string cache_key(const RunConfig& cfg, BcKind bc) {
    std::ostringstream os;
    os << "coef=" << cfg.coef << ";c=0;bc=" << (bc == BcKind::Dirichlet ? "d" : "n")
       << ";n=" << cfg.n << std::hexfloat << ";l=" << cfg.interval_left
       << ";r=" << cfg.interval_right;
    const std::string desc = os.str();
    std::ostringstream name;
    name << "frlb-" << std::hex << fnv1a(desc.data(), desc.size()) << ".bin";
    return name.str();
}

struct Problem {
    Grid grid;
    DiscreteOperator op;
    SpectralDecomposition dec;       // raw
    SpectralDecomposition solve_dec; // augmented when Neumann
    CoefficientSpec coef;
    BcKind bc;
};

Problem build_problem(const RunConfig& cfg) {
    Problem p;
    p.bc = parse_bc(cfg.bc);
    p.coef = parse_coefficient(cfg.coef);
    p.grid = build_uniform_grid(cfg.interval_left, cfg.interval_right, cfg.n,
                                p.bc == BcKind::Dirichlet ? GridLayout::NodeCentered
                                                          : GridLayout::CellCentered);
    EllipticSpec spec;
    spec.diffusion = [c = p.coef](double x) { return c(x); };
    spec.potential = [](double) { return 0.0; };
    spec.bc = p.bc;
    spec.ellipticity_floor = 1e-8;
    p.op = assemble_elliptic(spec, p.grid);

    bool loaded = false;
    std::filesystem::path cache_file;
    if (!cfg.cache_dir.empty()) {
        std::filesystem::create_directories(cfg.cache_dir);
        cache_file = std::filesystem::path(cfg.cache_dir) / cache_key(cfg, p.bc);
        if (std::filesystem::exists(cache_file)) {
            try {
                SpectralDecomposition dec = load_decomposition(cache_file.string());
                if (dec.size() == cfg.n && dec.bc() == p.bc &&
                    dec.grid().left == cfg.interval_left && dec.grid().right == cfg.interval_right) {
                    p.dec = std::move(dec);
                    loaded = true;
                }
            } catch (const InvalidState& e) {
                std::cerr << "cache: " << e.what() << " (recomputing)\n";
            }
        }
    }
    if (!loaded) {
        p.dec = decompose(p.op);
        if (!cache_file.empty()) save_decomposition(cache_file.string(), p.dec);
    }
    p.solve_dec = p.bc == BcKind::Neumann ? neumann_augment(p.dec) : p.dec;
    return p;
}

void dump_coefficients(const RunConfig& cfg, const SpectralDecomposition& dec,
                       std::span<const double> cf, std::span<const double> cu) {
    if (!cfg.dump_coeffs || cfg.out.empty()) return;
    std::filesystem::path p(cfg.out);
    p.replace_extension(".coeffs.csv");
    std::ofstream out(p);
    out << "k,lambda_k,c_f,c_u\n";
    out.precision(17);
    for (int k = 0; k < dec.size(); ++k)
        out << (k + 1) << ',' << dec.eigenvalue(k) << ',' << cf[k] << ',' << cu[k] << '\n';
}

nlohmann::json config_echo(const RunConfig& cfg) {
    return {
        {"command", cfg.command}, {"bc", cfg.bc},       {"a", cfg.a},
        {"rhs", cfg.rhs},         {"coef", cfg.coef},   {"n", cfg.n},
        {"quad_q", cfg.quad_q},   {"quad_step", cfg.quad_step},
        {"seed", cfg.seed},       {"tol_beta", cfg.tol_beta}, {"tol_theta", cfg.tol_theta},
        {"interval", {cfg.interval_left, cfg.interval_right}},
    };
}

int finish(const RunConfig& cfg, ExperimentReport& report,
           std::chrono::steady_clock::time_point t0) {
    const auto t1 = std::chrono::steady_clock::now();
    report.meta = {{"tool", kToolName},
                   {"version", kToolVersion},
                   {"wall_time_ms", std::chrono::duration<double, std::milli>(t1 - t0).count()}};
    const bool pass = report.overall_pass();
    if (cfg.out.empty())
        std::cout << report.serialize();
    else
        report.write_file(cfg.out);
    return pass ? 0 : 1;
}

int cmd_power(const RunConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    Problem p = build_problem(cfg);
    const RhsEntry rhs = parse_rhs(cfg.rhs, p.grid);
    const std::vector<double> f = sample_rhs(rhs, p.grid, &p.solve_dec);

    const std::vector<double> u = solve_power(p.solve_dec, cfg.a, f);
    const std::vector<double> back = apply_power(p.solve_dec, cfg.a, u);
    double num = 0.0;
    for (std::size_t i = 0; i < back.size(); ++i) {
        const double d = back[i] - f[i];
        num += d * d;
    }
    const double fn = norm2(f);
    const double residual = std::sqrt(num) / (fn > 0 ? fn : 1.0);

    const bool augment = p.bc == BcKind::Neumann;
    std::vector<double> uc;
    if (cfg.quad_step > 0.0)
        uc = apply_inverse_power_contour(p.op, build_rule(cfg.a, cfg.quad_q, cfg.quad_step), f,
                                         augment);
    else
        uc = solve_fractional_contour(p.op, cfg.a, cfg.quad_q, f, augment);
    double dev = 0.0, un = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double d = uc[i] - u[i];
        dev += d * d;
        un += u[i] * u[i];
    }
    const double contour_dev = std::sqrt(dev / (un > 0 ? un : 1.0));

    const std::vector<double> cf = forward_coefficients(p.solve_dec, f);
    std::vector<double> cu(cf.size());
    for (int k = 0; k < p.solve_dec.size(); ++k)
        cu[k] = std::pow(p.solve_dec.eigenvalue(k), -cfg.a) * cf[k];
    dump_coefficients(cfg, p.solve_dec, cf, cu);

    ExperimentReport report;
    report.config = config_echo(cfg);
    report.measured = {{"solution_norm_h", std::sqrt(p.op.h) * norm2(u)},
                       {"rhs_norm_h", std::sqrt(p.op.h) * fn},
                       {"residual_rel", residual},
                       {"contour_vs_spectral_rel", contour_dev},
                       {"lambda_min", p.solve_dec.eigenvalue(0)}};
    report.predicted = {{"residual_rel", 0.0}};
    report.add_verdict("residual", residual <= 1e-9, 1e-9);
    return finish(cfg, report, t0);
}

int cmd_compat(const RunConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    Problem p = build_problem(cfg);
    const RhsEntry rhs = parse_rhs(cfg.rhs, p.grid);

    CompatibilityOptions opt;
    opt.tol_beta = cfg.tol_beta;
    const CompatibilityReport rep = compatibility_experiment(p.solve_dec, p.coef, 0.0, cfg.a, rhs, opt);

    if (cfg.dump_coeffs) {
        const std::vector<double> f = sample_rhs(rhs, p.grid, &p.solve_dec);
        const std::vector<double> cf = forward_coefficients(p.solve_dec, f);
        std::vector<double> cu(cf.size());
        for (int k = 0; k < p.solve_dec.size(); ++k)
            cu[k] = std::pow(p.solve_dec.eigenvalue(k), -cfg.a) * cf[k];
        dump_coefficients(cfg, p.solve_dec, cf, cu);
    }

    ExperimentReport report;
    report.config = config_echo(cfg);
    report.measured = {{"beta", rep.measured_beta},
                       {"s_max", rep.measured_s_max},
                       {"r_squared", rep.r_squared},
                       {"superpolynomial", rep.superpolynomial}};
    report.measured["violation_index"] =
        rep.violation_index ? nlohmann::json(*rep.violation_index) : nlohmann::json("inf");
    report.predicted = {{"beta", rep.predicted_beta},
                        {"s_max", rep.predicted_s_max},
                        {"theory", rep.theory_tag}};
    report.add_verdict("beta", rep.pass, rep.tolerance);
    return finish(cfg, report, t0);
}

int cmd_boundary(const RunConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    if (parse_bc(cfg.bc) != BcKind::Dirichlet)
        throw CLI::ValidationError("--bc", "boundary experiment is Dirichlet-only");
    Problem p = build_problem(cfg);
    const RhsEntry rhs = parse_rhs(cfg.rhs, p.grid);

    const BoundaryFit fit = fit_boundary_exponent(p.solve_dec, cfg.a, rhs, cfg.n / 4);
    const double predicted = std::min(2.0 * cfg.a, 1.0);

    ExperimentReport report;
    report.config = config_echo(cfg);
    report.measured = {{"theta", fit.exponent},
                       {"r_squared", fit.r_squared},
                       {"d_window", {fit.d_lo, fit.d_hi}},
                       {"defined", fit.defined},
                       {"modes", fit.modes}};
    report.predicted = {{"theta", predicted}, {"theory", "Cor3.5"}};
    report.add_verdict("theta", fit.defined && std::fabs(fit.exponent - predicted) <= cfg.tol_theta,
                       cfg.tol_theta);
    report.add_verdict("vanishing_trace", fit.defined && fit.exponent > 0.1, 0.1);
    return finish(cfg, report, t0);
}

int cmd_compare(const RunConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    if (cfg.n > kDenseMaxN)
        throw CLI::ValidationError("--n", "compare caps N at " + std::to_string(kDenseMaxN));
    const EigenvalueComparison cmp = compare_first_eigenvalues(cfg.a, cfg.n);

    ExperimentReport report;
    report.config = config_echo(cfg);
    report.measured = {{"spectral", cmp.spectral}, {"restricted", cmp.restricted}, {"gap", cmp.gap}};
    report.predicted = {{"ordering", "restricted < spectral"}, {"theory", "S6.2"}};
    report.add_verdict("ordering", cmp.restricted < cmp.spectral, 0.0);
    return finish(cfg, report, t0);
}

int cmd_selftest(const RunConfig& cfg) {
    std::mt19937_64 rng(static_cast<std::uint64_t>(cfg.seed));
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    int failures = 0;
    auto check = [&](const std::string& name, bool ok) {
        std::cout << (ok ? "[ok]   " : "[FAIL] ") << name << "\n";
        if (!ok) ++failures;
    };

    // grid: Garding inequality and h-symmetry
    {
        const Grid grid = build_uniform_grid(0.0, M_PI, 128, GridLayout::NodeCentered);
        EllipticSpec spec;
        spec.diffusion = [](double x) { return 1.0 + 0.5 * x; };
        spec.potential = [](double) { return 0.0; };
        spec.bc = BcKind::Dirichlet;
        spec.ellipticity_floor = 0.5;
        const DiscreteOperator op = assemble_elliptic(spec, grid);
        bool garding = true, symmetric = true;
        std::vector<double> u(128), v(128);
        for (int trial = 0; trial < 100; ++trial) {
            for (auto& x : u) x = unif(rng);
            for (auto& x : v) x = unif(rng);
            const auto au = apply_operator(op, u);
            const auto av = apply_operator(op, v);
            double grad = 0.0;
            for (int i = 0; i + 1 < 128; ++i) {
                const double g = (u[i + 1] - u[i]) / grid.h;
                grad += g * g;
            }
            garding = garding && inner_h(op, u, au) >= 0.5 * grad * grid.h - 1e-9;
            symmetric = symmetric &&
                        std::fabs(inner_h(op, au, v) - inner_h(op, u, av)) <=
                            1e-13 * std::max(1.0, std::fabs(inner_h(op, au, v)));
        }
        check("grid: discrete Garding inequality", garding);
        check("grid: <Au,v>_h = <u,Av>_h", symmetric);
    }

    // spectral: orthonormality, semigroup, homeomorphism roundtrip
    {
        const Grid grid = build_uniform_grid(0.0, M_PI, 256, GridLayout::NodeCentered);
        const DiscreteOperator op = assemble_elliptic(EllipticSpec::laplacian(BcKind::Dirichlet), grid);
        const SpectralDecomposition dec = decompose(op);
        double worst = 0.0;
        for (int k = 0; k < dec.size(); k += 17)
            for (int j = 0; j < dec.size(); j += 13) {
                const double dot = grid.h * pairwise_dot(dec.eigenvector(k), dec.eigenvector(j));
                worst = std::max(worst, std::fabs(dot - (k == j ? 1.0 : 0.0)));
            }
        check("spectral: V' M V = I to 1e-10", worst <= 1e-10);

        std::vector<std::complex<double>> f(dec.size());
        bool semigroup = true;
        for (int trial = 0; trial < 10; ++trial) {
            for (auto& x : f) x = {unif(rng), unif(rng)};
            const std::complex<double> z(unif(rng), unif(rng)), w(unif(rng), unif(rng));
            const auto zw = apply_power(dec, z + w, f);
            const auto step = apply_power(dec, z, apply_power(dec, w, f));
            double err = 0.0, ref = 0.0;
            for (std::size_t i = 0; i < f.size(); ++i) {
                err += std::norm(zw[i] - step[i]);
                ref += std::norm(zw[i]);
            }
            semigroup = semigroup && std::sqrt(err / ref) <= 1e-9;
        }
        check("spectral: semigroup composition", semigroup);

        std::vector<double> g(dec.size());
        bool roundtrip = true;
        for (int trial = 0; trial < 20; ++trial) {
            for (auto& x : g) x = unif(rng);
            const auto u = solve_power(dec, 0.6, apply_power(dec, 0.6, g));
            double err = 0.0, ref = 0.0;
            for (std::size_t i = 0; i < g.size(); ++i) {
                err += (u[i] - g[i]) * (u[i] - g[i]);
                ref += g[i] * g[i];
            }
            roundtrip = roundtrip && std::sqrt(err / ref) <= 1e-9;
        }
        check("spectral: solve_power(apply_power(f)) = f", roundtrip);
    }

    // contour vs spectral oracle
    {
        const Grid grid = build_uniform_grid(0.0, M_PI, 64, GridLayout::NodeCentered);
        const DiscreteOperator op = assemble_elliptic(EllipticSpec::laplacian(BcKind::Dirichlet), grid);
        const SpectralDecomposition dec = decompose(op);
        bool ok = true;
        std::vector<double> f(64);
        for (double a : {0.25, 0.5, 0.75}) {
            for (auto& x : f) x = unif(rng);
            const auto us = solve_power(dec, a, f);
            const auto uc = solve_fractional_contour(op, a, 200, f);
            double err = 0.0, ref = 0.0;
            for (int i = 0; i < 64; ++i) {
                err += (us[i] - uc[i]) * (us[i] - uc[i]);
                ref += us[i] * us[i];
            }
            ok = ok && std::sqrt(err / ref) <= 1e-7;
        }
        check("contour: matches spectral solve at Q=200", ok);
    }

    // nonlocal: closed-form exterior mass and the constant identity
    {
        const Grid grid = build_uniform_grid(0.0, 1.0, 64, GridLayout::NodeCentered);
        const KernelSpec kernel = make_kernel(0.5);
        const auto w = exterior_mass(grid, kernel);
        double worst = 0.0;
        for (int i = 0; i < 64; ++i) {
            const double x = grid.x[i];
            const double ref = (1.0 / M_PI) * (1.0 / x + 1.0 / (1.0 - x));
            worst = std::max(worst, std::fabs(w[i] - ref) / ref);
        }
        check("nonlocal: w closed form at a = 1/2", worst <= 1e-10);

        const RestrictedOperator K = assemble_restricted(grid, kernel);
        const std::vector<double> ones(64, 1.0);
        const auto K1 = K.apply(ones);
        double dev = 0.0;
        for (int i = 0; i < 64; ++i) dev = std::max(dev, std::fabs(K1[i] - K.w[i]));
        check("nonlocal: K.1 = w", dev <= 1e-9 * K.w[32]);
    }

    // cache roundtrip
    {
        const Grid grid = build_uniform_grid(0.0, M_PI, 32, GridLayout::NodeCentered);
        const DiscreteOperator op = assemble_elliptic(EllipticSpec::laplacian(BcKind::Dirichlet), grid);
        const SpectralDecomposition dec = decompose(op);
        const auto path = std::filesystem::temp_directory_path() / "fraclab-selftest.bin";
        save_decomposition(path.string(), dec);
        const SpectralDecomposition back = load_decomposition(path.string());
        bool same = back.size() == dec.size();
        for (int k = 0; same && k < dec.size(); ++k)
            same = back.eigenvalue(k) == dec.eigenvalue(k);
        same = same && back.raw_vectors() == dec.raw_vectors();
        std::filesystem::remove(path);
        check("cache: decomposition roundtrip is exact", same);
    }

    std::cout << (failures == 0 ? "selftest passed\n" : "selftest FAILED\n");
    return failures == 0 ? 0 : 1;
}

} // namespace

int run_command(const std::vector<std::string>& args) {
    RunConfig cfg;
    if (const char* env = std::getenv("FRACLAB_CACHE")) cfg.cache_dir = env;

    // config file first (lowest precedence above built-in defaults)
    for (std::size_t i = 0; i + 1 < args.size(); ++i) {
        if (args[i] == "--config") {
            std::ifstream in(args[i + 1]);
            if (!in) {
                std::cerr << "cannot open config file " << args[i + 1] << "\n";
                return 2;
            }
            try {
                nlohmann::json j;
                in >> j;
                if (j.contains("bc")) cfg.bc = j["bc"];
                if (j.contains("a")) cfg.a = j["a"];
                if (j.contains("rhs")) cfg.rhs = j["rhs"];
                if (j.contains("coef")) cfg.coef = j["coef"];
                if (j.contains("n")) cfg.n = j["n"];
                if (j.contains("quad_q")) cfg.quad_q = j["quad_q"];
                if (j.contains("quad_step")) cfg.quad_step = j["quad_step"];
                if (j.contains("out")) cfg.out = j["out"];
                if (j.contains("cache_dir")) cfg.cache_dir = j["cache_dir"];
                if (j.contains("seed")) cfg.seed = j["seed"];
                if (j.contains("tol_beta")) cfg.tol_beta = j["tol_beta"];
                if (j.contains("tol_theta")) cfg.tol_theta = j["tol_theta"];
            } catch (const nlohmann::json::exception& e) {
                std::cerr << "config file: " << e.what() << "\n";
                return 2;
            }
        }
    }

    CLI::App app{"fractional elliptic boundary-value laboratory"};
    app.require_subcommand(1);
    app.fallthrough();
    std::string config_path;
    app.add_option("--config", config_path, "JSON config file (flags override it)");
    app.add_option("--bc", cfg.bc, "boundary condition: dirichlet | neumann");
    app.add_option("--a", cfg.a, "fractional exponent");
    app.add_option("--rhs", cfg.rhs, "right-hand side catalog entry");
    app.add_option("--coef", cfg.coef, "diffusion coefficient catalog entry");
    app.add_option("--n", cfg.n, "grid size (power of two in [64, 8192])");
    app.add_option("--quad-q", cfg.quad_q, "contour quadrature node parameter Q");
    app.add_option("--quad-step", cfg.quad_step, "contour quadrature step (0 = balanced)");
    app.add_flag("--dump-coeffs", cfg.dump_coeffs, "write k,lambda_k,c_f,c_u next to --out");
    app.add_option("--out", cfg.out, "report path (stdout when empty)");
    app.add_option("--cache-dir", cfg.cache_dir, "decomposition cache directory");
    app.add_option("--seed", cfg.seed, "seed for random-vector suites");
    app.add_option("--tol-beta", cfg.tol_beta, "tolerance on decay exponents");
    app.add_option("--tol-theta", cfg.tol_theta, "tolerance on boundary exponents");

    auto* power = app.add_subcommand("power", "solve (A_B)^a u = f by both methods");
    auto* compat = app.add_subcommand("compat", "compatibility-layer decay experiment");
    auto* boundary = app.add_subcommand("boundary", "boundary-exponent fit");
    auto* compare = app.add_subcommand("compare", "spectral vs restricted first eigenvalue");
    auto* selftest = app.add_subcommand("selftest", "run the module invariant suites");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {  // --help
            std::cout << app.help();
            return 0;
        }
        std::cerr << e.what() << "\n";
        return 2;
    }

    try {
        // shared validation
        if (!selftest->parsed()) {
            if (!(cfg.a > 0.0 && cfg.a < 1.0)) {
                std::cerr << "a must lie in (0,1)\n";
                return 2;
            }
            if (!power_of_two(cfg.n) || cfg.n < 64 || cfg.n > 8192) {
                std::cerr << "n must be a power of two in [64, 8192]\n";
                return 2;
            }
            parse_bc(cfg.bc);
        }

        if (power->parsed()) { cfg.command = "power"; return cmd_power(cfg); }
        if (compat->parsed()) { cfg.command = "compat"; return cmd_compat(cfg); }
        if (boundary->parsed()) { cfg.command = "boundary"; return cmd_boundary(cfg); }
        if (compare->parsed()) { cfg.command = "compare"; return cmd_compare(cfg); }
        cfg.command = "selftest";
        return cmd_selftest(cfg);
    } catch (const CLI::Error& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return 3;
    }
}

} // namespace fraclab
