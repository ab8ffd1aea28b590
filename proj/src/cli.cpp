#include "loglap/cli.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <optional>

#include "CLI11.hpp"
#include "json.hpp"
#include "loglap/config.hpp"
#include "loglap/errors.hpp"
#include "loglap/mp_harness.hpp"
#include "loglap/operator.hpp"
#include "loglap/solver.hpp"

namespace loglap {

namespace {

Point parse_point(const std::string& text, int n) {
    const Eigen::VectorXd v = parse_number_list(text);
    if (v.size() != n) throw ConfigError("expected a point with " + std::to_string(n) + " coordinates, got '" + text + "'");
    return v;
}

double gaussian_sigma(const std::string& spec) {
    const auto colon = spec.find(':');
    if (spec.substr(0, colon) != "gaussian" || colon == std::string::npos)
        throw ConfigError("unknown function '" + spec + "' (expected gaussian:sigma=S)");
    const std::string param = spec.substr(colon + 1);
    if (param.rfind("sigma=", 0) != 0) throw ConfigError("gaussian requires sigma=S");
    double sigma = 0;
    try {
        sigma = std::stod(param.substr(6));
    } catch (const std::exception&) {
        throw ConfigError("gaussian sigma is not a number");
    }
    if (!(sigma > 0)) throw ConfigError("gaussian sigma must be positive");
    return sigma;
}

void write_csv(const std::string& path, const std::function<void(std::ostream&)>& body) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigError("cannot open '" + path + "' for writing");
    body(os);
}

int verdict_exit(Verdict v) {
    switch (v) {
        case Verdict::Consistent: return kOk;
        case Verdict::Violated: return kViolation;
        case Verdict::PreconditionUnmet: return kPreconditionUnmet;
    }
    return kConfigError;
}

} // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Discrete logarithmic Laplacian toolkit"};
    app.set_help_flag("--help", "Print help");
    app.require_subcommand(1);
    std::function<int()> action;

    // constants
    int c_dim = 2;
    auto* constants = app.add_subcommand("constants", "Print n,c_n,rho_n");
    constants->add_option("--dim", c_dim, "Dimension n")->required()->check(CLI::Range(1, 64));
    constants->callback([&] {
        action = [&] {
            const auto c = constants_for<double>(c_dim);
            out << c.n << ',' << format_number(c.c_n) << ',' << format_number(c.rho_n) << '\n';
            return int(kOk);
        };
    });

    // classify
    double cl_lambda = 0;
    std::string cl_x, cl_config;
    auto* classify_cmd = app.add_subcommand("classify", "Region label of a point relative to T_lambda");
    classify_cmd->add_option("--lambda", cl_lambda)->required();
    classify_cmd->add_option("--x", cl_x, "Point as a,b")->required();
    classify_cmd->add_option("--config", cl_config, "Config with a [domain] section");
    classify_cmd->callback([&] {
        action = [&] {
            const RunConfig cfg = cl_config.empty() ? parse_config("") : load_config(cl_config);
            const Point x = parse_number_list(cl_x);
            if (x.size() < 2) throw ConfigError("classify: point needs at least two coordinates");
            out << label_name(classify(cfg.domain, cl_lambda, x)) << '\n';
            return int(kOk);
        };
    });

    // apply
    std::string ap_config, ap_func, ap_at;
    auto* apply = app.add_subcommand("apply", "Evaluate the discrete operator on a sampled function at one node");
    apply->add_option("--config", ap_config)->required();
    apply->add_option("--func", ap_func, "gaussian:sigma=S")->required();
    apply->add_option("--at", ap_at, "Grid node as a,b")->required();
    apply->callback([&] {
        action = [&] {
            const RunConfig cfg = load_config(ap_config);
            const UniformGrid& g = cfg.require_grid();
            const GaussianProfile profile{gaussian_sigma(ap_func)};
            const Point x = parse_point(ap_at, g.dim());
            const auto node = g.node_at(x);
            if (!node) throw ConfigError("apply: --at is not a grid node");
            const KernelPlan<double> plan(g, constants_for<double>(g.dim()));
            const GridFunction u = GridFunction::sample(g, profile);
            out << format_number(log_laplacian_at(u, plan, *node)) << '\n';
            return int(kOk);
        };
    });

    // symbol-check
    int sc_dim = 2;
    double sc_sigma = 1, sc_h = 0.05, sc_radius = 8;
    auto* symbol = app.add_subcommand("symbol-check", "Compare the discrete operator at 0 with the Fourier oracle");
    symbol->add_option("--dim", sc_dim)->check(CLI::Range(1, 3));
    symbol->add_option("--sigma", sc_sigma)->required()->check(CLI::PositiveNumber);
    symbol->add_option("--h", sc_h)->check(CLI::Range(1e-4, 0.2499));
    symbol->add_option("--radius", sc_radius)->check(CLI::PositiveNumber);
    symbol->callback([&] {
        action = [&] {
            const UniformGrid g = UniformGrid::centered(sc_dim, sc_h, sc_radius);
            const KernelPlan<double> plan(g, constants_for<double>(sc_dim));
            const GaussianProfile profile{sc_sigma};
            const GridFunction u = GridFunction::sample(g, profile);
            const auto node = g.node_at(Point::Zero(sc_dim));
            if (!node) throw ConfigError("symbol-check: origin is not a grid node");
            const double quad = log_laplacian_at(u, plan, *node);
            const double oracle = fourier_oracle(profile, sc_dim);
            out << format_number(quad) << ',' << format_number(oracle) << ','
                << format_number(std::abs(quad - oracle) / std::abs(oracle)) << '\n';
            return int(kOk);
        };
    });

    // manufacture
    std::string mf_config, mf_out;
    double mf_scale = 1;
    auto* manufacture = app.add_subcommand("manufacture", "Write the monotone manufactured fixture on the config grid");
    manufacture->add_option("--config", mf_config)->required();
    manufacture->add_option("--scale", mf_scale)->check(CLI::PositiveNumber);
    manufacture->add_option("--out", mf_out)->required();
    manufacture->callback([&] {
        action = [&] {
            const RunConfig cfg = load_config(mf_config);
            write_grid_function(mf_out, manufactured_monotone(cfg.domain, cfg.require_grid(), mf_scale));
            return int(kOk);
        };
    });

    // solve
    std::string sv_config, sv_out;
    auto* solve = app.add_subcommand("solve", "Damped iteration for the truncated Dirichlet problem");
    solve->add_option("--config", sv_config)->required();
    solve->add_option("--out", sv_out)->required();
    solve->callback([&] {
        action = [&] {
            const RunConfig cfg = load_config(sv_config);
            const ProblemSpec spec = cfg.problem();
            nlohmann::json j;
            try {
                const SolveResult res = solve_dirichlet(spec, cfg.solver, cfg.initial_guess());
                write_grid_function(sv_out, res.u);
                j["residual"] = res.report.residual;
                j["iters"] = res.report.iterations;
                j["converged"] = res.report.converged;
                j["tau"] = res.report.tau;
                j["sup_norm"] = res.u.sup_norm();
                out << j.dump() << '\n';
                return int(kOk);
            } catch (const DivergenceError& e) {
                j["residual"] = nullptr;
                j["iters"] = e.iteration();
                j["converged"] = false;
                j["diverged"] = true;
                out << j.dump() << '\n';
                return int(kViolation);
            }
        };
    });

    // eigen
    double eg_R = 3, eg_h = 0.05, eg_tol = 1e-10;
    int eg_dim = 2;
    std::string eg_out;
    auto* eigen = app.add_subcommand("eigen", "First eigenpair on the unit ball centred at R e_n");
    eigen->add_option("--R", eg_R)->required();
    eigen->add_option("--h", eg_h)->check(CLI::Range(1e-4, 0.2499));
    eigen->add_option("--dim", eg_dim)->check(CLI::Range(2, 3));
    eigen->add_option("--tol", eg_tol)->check(CLI::PositiveNumber);
    eigen->add_option("--out", eg_out);
    eigen->callback([&] {
        action = [&] {
            const UniformGrid g = ball_grid(eg_dim, eg_R, eg_h);
            const EigenPair eig = eigen_smallest(eg_R, g, constants_for<double>(eg_dim), eg_tol);
            if (!eg_out.empty()) write_grid_function(eg_out, eig.phi);
            out << format_number(eig.lambda_1) << ',' << format_number(eig.residual) << ',' << eig.iterations << '\n';
            return int(kOk);
        };
    });

    // sweep
    std::string sw_in, sw_domain, sw_out;
    std::optional<double> sw_min, sw_max, sw_step, sw_tol;
    auto* sweep = app.add_subcommand("sweep", "Moving-plane sweep of w_lambda minima");
    sweep->add_option("--in", sw_in)->required();
    sweep->add_option("--domain-config", sw_domain)->required();
    sweep->add_option("--lambda-min", sw_min);
    sweep->add_option("--lambda-max", sw_max);
    sweep->add_option("--step", sw_step);
    sweep->add_option("--tol", sw_tol);
    sweep->add_option("--out", sw_out);
    sweep->callback([&] {
        action = [&] {
            const RunConfig cfg = load_config(sw_domain);
            const GridFunction u = read_grid_function(sw_in);
            const double lo = sw_min ? *sw_min : cfg.sweep.lambda_min;
            const double hi = sw_max ? *sw_max : cfg.sweep.lambda_max;
            const double step = sw_step ? *sw_step : cfg.sweep.step;
            const double tol = sw_tol ? *sw_tol : cfg.sweep.tol;
            if (!(step > 0)) throw ConfigError("sweep: a positive --step is required");
            if (!(lo > cfg.domain.infimum())) throw ConfigError("sweep: --lambda-min must exceed inf phi");
            if (!(hi >= lo)) throw ConfigError("sweep: --lambda-max must be >= --lambda-min");
            if (!(tol >= 0)) throw ConfigError("sweep: --tol must be nonnegative");
            const auto lambdas = compatible_lambdas(u.grid, lo, hi, step);
            const SweepReport rep = sweep_monotonicity(u, cfg.domain, lambdas, tol);
            if (!sw_out.empty()) {
                write_csv(sw_out, [&](std::ostream& os) {
                    os << "lambda,min_w,argmin_x1,argmin_x2,n_H,n_A,n_D\n";
                    for (std::size_t i = 0; i < rep.lambdas.size(); ++i) {
                        const Point& x = rep.argmin[i];
                        os << format_number(rep.lambdas[i]) << ',' << format_number(rep.min_w[i]) << ','
                           << format_number(x[0]) << ',' << format_number(x[x.size() - 1]) << ','
                           << rep.region_counts[i][0] << ',' << rep.region_counts[i][1] << ','
                           << rep.region_counts[i][2] << '\n';
                    }
                });
            }
            std::size_t skipped = 0;
            for (char s : rep.skipped) skipped += s != 0;
            nlohmann::json j;
            j["sweep"] = true;
            j["verdict"] = rep.verdict;
            j["count"] = rep.lambdas.size();
            j["skipped"] = skipped;
            j["threshold"] = rep.threshold;
            if (const auto f = rep.first_failure()) j["first_failure"] = *f;
            out << j.dump() << '\n';
            if (rep.lambdas.empty() || skipped == rep.lambdas.size()) return int(kPreconditionUnmet);
            return rep.verdict ? int(kOk) : int(kViolation);
        };
    });

    // diagnose
    std::string dg_kind, dg_in, dg_config;
    double dg_lambda = 0, dg_R = 3;
    int dg_kmax = 4;
    std::optional<double> dg_tol;
    auto* diagnose = app.add_subcommand("diagnose", "Maximum-principle diagnostics");
    diagnose->add_option("--kind", dg_kind)->required()->check(CLI::IsMember({"antisym", "boundary", "ball", "comparison"}));
    diagnose->add_option("--in", dg_in)->required();
    diagnose->add_option("--config", dg_config, "Config with [domain] and [problem]");
    diagnose->add_option("--lambda", dg_lambda, "Plane height (antisym) or lambda0 (boundary)");
    diagnose->add_option("--k-max", dg_kmax)->check(CLI::NonNegativeNumber);
    diagnose->add_option("--R", dg_R, "Ball centre height (ball, comparison)");
    diagnose->add_option("--tol", dg_tol);
    diagnose->callback([&] {
        action = [&] {
            const RunConfig cfg = dg_config.empty() ? parse_config("") : load_config(dg_config);
            const GridFunction u = read_grid_function(dg_in);
            const auto constants = constants_for<double>(u.grid.dim());
            const KernelPlan<double> plan(u.grid, constants);
            const double tol = dg_tol ? *dg_tol : -1;
            DiagnosticsReport rep{DiagnosticKind::AntisymMP};
            if (dg_kind == "antisym") {
                const ProblemSpec spec(cfg.domain, cfg.a, cfg.f, u.grid);
                rep = antisym_mp_check(u, dg_lambda, spec, plan, tol);
            } else if (dg_kind == "boundary") {
                rep = boundary_quotient(u, cfg.domain, dg_lambda, dg_kmax, plan, tol);
            } else if (dg_kind == "ball") {
                rep = ball_mp_check(u, dg_R, plan, constants, tol);
            } else {
                const EigenPair eig = eigen_smallest(dg_R, u.grid, constants, 1e-10);
                rep = comparison_report(comparison_construct(u, eig), eig);
            }
            out << rep.to_json_line() << '\n';
            return verdict_exit(rep.verdict);
        };
    });

    // probe-nonexistence
    std::string pn_config;
    double pn_threshold = 1e-3;
    auto* probe = app.add_subcommand("probe-nonexistence", "Heuristic probe: do positive iterates decay?");
    probe->add_option("--config", pn_config)->required();
    probe->add_option("--threshold", pn_threshold)->check(CLI::PositiveNumber);
    probe->callback([&] {
        action = [&] {
            const RunConfig cfg = load_config(pn_config);
            const ProbeReport rep = probe_nonexistence(cfg.problem(), cfg.solver, cfg.initial_guess(), pn_threshold);
            out << rep.to_json_line() << '\n';
            return int(kOk);
        };
    });

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n" << app.help();
        return kConfigError;
    }
    if (!action) {
        err << app.help();
        return kConfigError;
    }
    try {
        return action();
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const PreconditionError& e) {
        err << "precondition error: " << e.what() << '\n';
        return kConfigError;
    } catch (const ContractError& e) {
        err << "contract error: " << e.what() << '\n';
        return kConfigError;
    } catch (const ConvergenceError& e) {
        err << "convergence error: " << e.what() << '\n';
        return kViolation;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kConfigError;
    }
}

} // namespace loglap
