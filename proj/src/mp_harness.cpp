#include "loglap/mp_harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "loglap/errors.hpp"

namespace loglap {

namespace {

// Index of the mirror plane: reflected last-coordinate index = mirror - k_n.
long mirror_index(const UniformGrid& grid, double lambda) {
    const int n = grid.dim();
    const double twice = 2.0 * (lambda - grid.origin()[n - 1]) / grid.h();
    return std::lround(twice);
}

nlohmann::json point_json(const Point& x) {
    nlohmann::json a = nlohmann::json::array();
    for (Eigen::Index i = 0; i < x.size(); ++i) a.push_back(x[i]);
    return a;
}

double height(const Point& x) { return x[x.size() - 1]; }

struct Argmin {
    Eigen::Index node = -1;
    double value = std::numeric_limits<double>::infinity();
};

// Lowest-index minimizer of w over nodes with the given label.
Argmin argmin_over(const GridFunction& w, const Epigraph& e, double lambda, RegionLabel label) {
    Argmin best;
    for (Eigen::Index i = 0; i < w.grid.size(); ++i) {
        if (classify(e, lambda, w.grid.coord(i)) != label) continue;
        if (w.values[i] < best.value) {
            best.value = w.values[i];
            best.node = i;
        }
    }
    return best;
}

double default_tol(const GridFunction& u, double tol) { return tol >= 0 ? tol : 1e-8 * u.sup_norm(); }

} // namespace

bool reflection_compatible(const UniformGrid& grid, double lambda) {
    const int n = grid.dim();
    const double twice = 2.0 * (lambda - grid.origin()[n - 1]) / grid.h();
    return std::abs(twice - std::round(twice)) <= 1e-9 * std::max(1.0, std::abs(twice));
}

GridFunction w_lambda(const GridFunction& u, double lambda, const Epigraph& epigraph) {
    (void)epigraph;
    const auto& g = u.grid;
    if (!reflection_compatible(g, lambda))
        throw PreconditionError("w_lambda: lambda " + format_number(lambda) + " is not reflection-compatible with the grid");
    const long mirror = mirror_index(g, lambda);
    const int n = g.dim();
    GridFunction w(g);
    for (Eigen::Index i = 0; i < g.size(); ++i) {
        MultiIndex k = g.multi_index(i);
        MultiIndex kr = k;
        kr[n - 1] = static_cast<int>(mirror - k[n - 1]);
        if (kr == k) continue;  // on T_lambda
        w.values[i] = u.at(kr) - u.values[i];
    }
    return w;
}

std::optional<double> SweepReport::first_failure() const {
    for (std::size_t i = 0; i < lambdas.size(); ++i)
        if (!skipped[i] && min_w[i] < threshold) return lambdas[i];
    return std::nullopt;
}

std::vector<double> compatible_lambdas(const UniformGrid& grid, double lambda_min, double lambda_max, double step) {
    if (!(step > 0)) throw PreconditionError("compatible_lambdas: step must be positive");
    const int n = grid.dim();
    const double half = 0.5 * grid.h();
    const double o = grid.origin()[n - 1];
    const long stride = std::max(1L, std::lround(step / half));
    std::vector<double> out;
    for (long j = static_cast<long>(std::ceil((lambda_min - o) / half - 1e-9));; j += stride) {
        const double lam = o + j * half;
        if (lam > lambda_max + 1e-9 * half) break;
        out.push_back(lam);
    }
    return out;
}

SweepReport sweep_monotonicity(const GridFunction& u, const Epigraph& epigraph, const std::vector<double>& lambdas,
                               double tol) {
    const auto& g = u.grid;
    const int n = g.dim();
    for (double lam : lambdas) {
        if (!(lam > epigraph.infimum())) throw PreconditionError("sweep: lambda must exceed inf phi");
        if (!reflection_compatible(g, lam)) throw PreconditionError("sweep: lambda is not reflection-compatible");
    }
    SweepReport rep;
    rep.lambdas = lambdas;
    rep.threshold = -tol * u.sup_norm();
    const std::size_t count = lambdas.size();
    rep.min_w.assign(count, 0.0);
    rep.argmin.assign(count, Point::Zero(n));
    rep.region_counts.assign(count, {0, 0, 0});
    rep.skipped.assign(count, 0);
    rep.reflection_in_box.assign(count, 1);
    rep.strict.assign(count, 0);

    parallel_for(static_cast<Eigen::Index>(count), [&](Eigen::Index li) {
        const auto idx = static_cast<std::size_t>(li);
        const double lam = lambdas[idx];
        const GridFunction w = w_lambda(u, lam, epigraph);
        const long mirror = mirror_index(g, lam);
        Argmin best;
        std::array<Eigen::Index, 3> counts{0, 0, 0};
        bool in_box = true;
        for (Eigen::Index i = 0; i < g.size(); ++i) {
            const MultiIndex k = g.multi_index(i);
            const RegionLabel label = classify(epigraph, lam, g.coord(k));
            switch (label) {
                case RegionLabel::H: {
                    ++counts[0];
                    const long kr = mirror - k[n - 1];
                    if (kr < 0 || kr >= g.dims()[n - 1]) in_box = false;
                    if (w.values[i] < best.value) {
                        best.value = w.values[i];
                        best.node = i;
                    }
                    break;
                }
                case RegionLabel::A: ++counts[1]; break;
                case RegionLabel::D: ++counts[2]; break;
                case RegionLabel::Above: break;
            }
        }
        rep.region_counts[idx] = counts;
        rep.reflection_in_box[idx] = in_box;
        if (best.node < 0) {
            rep.skipped[idx] = 1;
            rep.min_w[idx] = std::numeric_limits<double>::quiet_NaN();
            return;
        }
        rep.min_w[idx] = best.value;
        rep.argmin[idx] = g.coord(best.node);
        rep.strict[idx] = best.value > 0;
    });

    bool any = false, ok = true;
    for (std::size_t i = 0; i < count; ++i) {
        if (rep.skipped[i]) continue;
        any = true;
        if (rep.min_w[i] < rep.threshold) ok = false;
    }
    rep.verdict = any && ok;
    return rep;
}

const char* kind_name(DiagnosticKind k) {
    switch (k) {
        case DiagnosticKind::AntisymMP: return "antisym_mp";
        case DiagnosticKind::BoundaryQuotient: return "boundary_quotient";
        case DiagnosticKind::BallMP: return "ball_mp";
        case DiagnosticKind::Comparison: return "comparison";
    }
    return "?";
}

const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::Consistent: return "consistent";
        case Verdict::Violated: return "violated";
        case Verdict::PreconditionUnmet: return "precondition_unmet";
    }
    return "?";
}

std::string DiagnosticsReport::to_json_line() const {
    nlohmann::json j;
    j["kind"] = kind_name(kind);
    j["verdict"] = verdict_name(verdict);
    j["data"] = data;
    return j.dump();
}

DiagnosticsReport antisym_mp_check(const GridFunction& u, double lambda, const ProblemSpec& spec,
                                   const KernelPlan<double>& plan, double tol) {
    DiagnosticsReport rep{DiagnosticKind::AntisymMP};
    tol = default_tol(u, tol);
    const auto& e = spec.epigraph;
    const GridFunction w = w_lambda(u, lambda, e);
    const auto& g = w.grid;
    rep.data["lambda"] = lambda;
    rep.data["tol"] = tol;

    // gates: w >= -tol on H, w > 0 on A, w = 0 on D
    double h_min = std::numeric_limits<double>::infinity(), a_min = h_min, d_max = 0;
    Eigen::Index h_count = 0;
    for (Eigen::Index i = 0; i < g.size(); ++i) {
        switch (classify(e, lambda, g.coord(i))) {
            case RegionLabel::H: h_min = std::min(h_min, w.values[i]); ++h_count; break;
            case RegionLabel::A: a_min = std::min(a_min, w.values[i]); break;
            case RegionLabel::D: d_max = std::max(d_max, std::abs(w.values[i])); break;
            case RegionLabel::Above: break;
        }
    }
    rep.data["h_min"] = h_count ? h_min : 0.0;
    rep.data["a_min"] = std::isfinite(a_min) ? a_min : 0.0;
    rep.data["d_max_abs"] = d_max;
    const bool gates = h_count > 0 && h_min >= -tol && (!std::isfinite(a_min) || a_min > 0) && d_max <= tol;
    if (!gates) {
        rep.verdict = Verdict::PreconditionUnmet;
        return rep;
    }

    const Argmin best = argmin_over(w, e, lambda, RegionLabel::H);
    const Point x = g.coord(best.node);
    rep.data["argmin"] = point_json(x);
    rep.data["w_min"] = best.value;
    if (best.value > tol) {
        rep.data["interior_zero"] = false;
        rep.verdict = Verdict::Consistent;
        return rep;
    }
    const double lw = log_laplacian_at(w, plan, best.node);
    // the differential inequality gives L w >= a(x_n) M w, which is ~0 at a zero of w
    const double uval = u.values[best.node];
    const double ulam = uval + best.value;
    double rhs_bound = 0;
    if (uval > 0 && ulam > 0) rhs_bound = spec.a(height(x)) * lipschitz_quotient(spec.f, uval, ulam) * best.value;
    rep.data["interior_zero"] = true;
    rep.data["log_laplacian_w"] = lw;
    rep.data["inequality_rhs"] = rhs_bound;
    rep.verdict = lw < 0 ? Verdict::Consistent : Verdict::Violated;
    return rep;
}

DiagnosticsReport boundary_quotient(const GridFunction& u, const Epigraph& epigraph, double lambda0, int k_max,
                                    const KernelPlan<double>& plan, double tol) {
    DiagnosticsReport rep{DiagnosticKind::BoundaryQuotient};
    (void)tol;
    rep.data["lambda0"] = lambda0;
    rep.data["records"] = nlohmann::json::array();
    if (k_max <= 0) {
        rep.data["reason"] = "k_max = 0";
        return rep;
    }
    const auto& g = u.grid;
    const GridFunction w0 = w_lambda(u, lambda0, epigraph);
    const Argmin base = argmin_over(w0, epigraph, lambda0, RegionLabel::H);
    rep.data["w_lambda0_min"] = base.node >= 0 ? base.value : 0.0;
    if (base.node < 0 || !(base.value > 0)) {
        rep.data["reason"] = "w_lambda0 is not positive on H_lambda0";
        return rep;
    }
    const double half = 0.5 * g.h();
    bool any = false, all_negative = true;
    for (int k = 1; k <= k_max; ++k) {
        const double lam = lambda0 + half * (k_max + 1 - k);
        const GridFunction w = w_lambda(u, lam, epigraph);
        const Argmin best = argmin_over(w, epigraph, lam, RegionLabel::H);
        nlohmann::json rec;
        rec["k"] = k;
        rec["lambda"] = lam;
        if (best.node < 0 || !(best.value < 0)) {
            rec["min_w"] = best.node >= 0 ? best.value : 0.0;
            rec["negative_min"] = false;
            rep.data["records"].push_back(rec);
            continue;
        }
        const Point x = g.coord(best.node);
        const double delta = lam - height(x);
        const double lw = log_laplacian_at(w, plan, best.node);
        rec["min_w"] = best.value;
        rec["negative_min"] = true;
        rec["argmin"] = point_json(x);
        rec["delta"] = delta;
        rec["log_laplacian_w"] = lw;
        rec["quotient"] = lw / delta;
        rep.data["records"].push_back(rec);
        any = true;
        if (!(lw / delta < 0)) all_negative = false;
    }
    if (!any) {
        rep.data["reason"] = "no negative minima";
        rep.verdict = Verdict::PreconditionUnmet;
    } else {
        rep.verdict = all_negative ? Verdict::Consistent : Verdict::Violated;
    }
    return rep;
}

VolumeIdentity volume_identity(const Point& x0, const Point& center) {
    VolumeIdentity out;
    const int n = static_cast<int>(x0.size());
    if ((x0 - center).squaredNorm() >= 1.0) throw PreconditionError("volume_identity: x0 must lie in the ball");
    if (x0 == center) {
        out.agree = true;
        return out;
    }
    if (n == 2) {
        // rays from a ball centre p: the part of B_1(p) outside B_1(q) is r in [r_exit, 1]
        auto exit_radius = [](const Point& p, const Point& q, double theta) {
            const double b = (p - q).dot(Point((Eigen::Vector2d() << std::cos(theta), std::sin(theta)).finished()));
            const double d2 = (p - q).squaredNorm();
            return -b + std::sqrt(b * b - d2 + 1.0);
        };
        const int m = 8192;
        const double dtheta = 2 * std::numbers::pi / m;
        double v0 = 0, vc = 0, k0 = 0, kc = 0;
        for (int i = 0; i < m; ++i) {
            const double th = i * dtheta;
            const double r0 = std::min(exit_radius(x0, center, th), 1.0);
            v0 += 0.5 * (1 - r0 * r0);
            const double rc = std::min(exit_radius(center, x0, th), 1.0);
            vc += 0.5 * (1 - rc * rc);
            // rays from x0 toward the far side of B_1(center): |x0 - y| in (1, r_exit)
            const double re = exit_radius(x0, center, th);
            if (re < 1) k0 += -std::log(re);
            else kc += std::log(re);
        }
        out.ball_x0_minus_a = v0 * dtheta;
        out.ball_center_minus_a = vc * dtheta;
        out.kernel_difference = (k0 - kc) * dtheta;
    } else {
        // fixed-seed Monte Carlo in the bounding box of each ball
        std::mt19937_64 rng(20240611);
        std::uniform_real_distribution<double> unif(-1.0, 1.0);
        const int samples = 4000000;
        double c0 = 0, cc = 0, k0 = 0, kc = 0;
        const double box = std::pow(2.0, n);
        Point z(n);
        for (int s = 0; s < samples; ++s) {
            for (int d = 0; d < n; ++d) z[d] = unif(rng);
            if (z.squaredNorm() >= 1) continue;
            const Point y0 = x0 + z;
            if ((y0 - center).squaredNorm() >= 1) {
                c0 += 1;
                k0 += std::pow(z.norm(), -n);
            }
            const Point yc = center + z;
            if ((yc - x0).squaredNorm() >= 1) {
                cc += 1;
                kc += std::pow((yc - x0).norm(), -n);
            }
        }
        out.ball_x0_minus_a = box * c0 / samples;
        out.ball_center_minus_a = box * cc / samples;
        out.kernel_difference = box * (k0 - kc) / samples;
    }
    const double scale = std::max(out.ball_x0_minus_a, out.ball_center_minus_a);
    out.agree = scale == 0 || std::abs(out.ball_x0_minus_a - out.ball_center_minus_a) <= 0.01 * scale;
    return out;
}

DiagnosticsReport ball_mp_check(const GridFunction& u, double R, const KernelPlan<double>& plan,
                                const Constants<double>& constants, double tol) {
    DiagnosticsReport rep{DiagnosticKind::BallMP};
    tol = default_tol(u, tol);
    const auto& g = u.grid;
    const int n = g.dim();
    Point center = Point::Zero(n);
    center[n - 1] = R;
    rep.data["R"] = R;
    rep.data["tol"] = tol;
    rep.data["rho_n"] = constants.rho_n;

    std::vector<std::string> unmet;
    if (!(constants.rho_n > 0)) unmet.push_back("rho_n <= 0");
    if (!g.contains_ball(center, 1.0)) unmet.push_back("ball not inside the grid box");
    if (!(u.grid == plan.grid())) throw ContractError("ball_mp_check: function and plan live on different grids");

    const auto inside = unit_ball_nodes(g, center);
    std::vector<char> is_inside(static_cast<std::size_t>(g.size()), 0);
    for (auto i : inside) is_inside[static_cast<std::size_t>(i)] = 1;
    double outside_min = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < g.size(); ++i)
        if (!is_inside[static_cast<std::size_t>(i)]) outside_min = std::min(outside_min, u.values[i]);
    rep.data["outside_min"] = std::isfinite(outside_min) ? outside_min : 0.0;
    if (!(outside_min > 0)) unmet.push_back("u not positive outside the ball");

    if (inside.empty()) {
        unmet.push_back("no grid nodes inside the ball");
        rep.data["unmet"] = unmet;
        return rep;
    }
    const Eigen::VectorXd lu = apply_at_nodes(u, plan, inside, true);
    rep.data["log_laplacian_min"] = lu.minCoeff();
    if (lu.minCoeff() < -tol) unmet.push_back("L u < -tol inside the ball");

    Argmin best;
    for (auto i : inside)
        if (u.values[i] < best.value) {
            best.value = u.values[i];
            best.node = i;
        }
    const Point x0 = g.coord(best.node);
    rep.data["inside_min"] = best.value;
    rep.data["argmin"] = point_json(x0);
    const VolumeIdentity vol = volume_identity(x0, center);
    rep.data["volume_x0_minus_a"] = vol.ball_x0_minus_a;
    rep.data["volume_center_minus_a"] = vol.ball_center_minus_a;
    rep.data["kernel_difference"] = vol.kernel_difference;
    rep.data["volume_identity_ok"] = vol.agree;

    if (!unmet.empty()) {
        rep.data["unmet"] = unmet;
        rep.verdict = Verdict::PreconditionUnmet;
        return rep;
    }
    rep.verdict = best.value > 0 ? Verdict::Consistent : Verdict::Violated;
    return rep;
}

ComparisonResult comparison_construct(const GridFunction& u, const EigenPair& eig) {
    if (!(u.grid == eig.phi.grid)) throw ContractError("comparison_construct: u and phi live on different grids");
    ComparisonResult out;
    double best = -std::numeric_limits<double>::infinity();
    for (auto i : eig.ball_nodes) {  // ball_nodes are increasing, so ties keep the lowest index
        if (!(u.values[i] > 0)) throw PreconditionError("comparison_construct: u must be positive on the ball");
        const double ratio = eig.phi.values[i] / u.values[i];
        if (ratio > best) {
            best = ratio;
            out.witness_node = i;
        }
    }
    if (out.witness_node < 0) throw PreconditionError("comparison_construct: empty ball");
    out.M = best;
    out.v = GridFunction(u.grid, best * u.values);
    out.witness = u.grid.coord(out.witness_node);
    const double vw = out.v.values[out.witness_node], pw = eig.phi.values[out.witness_node];
    if (std::abs(vw - pw) > 1e-10 * std::abs(pw))
        throw ContractError("comparison_construct: v(witness) != phi(witness)");
    return out;
}

DiagnosticsReport comparison_report(const ComparisonResult& c, const EigenPair& eig) {
    DiagnosticsReport rep{DiagnosticKind::Comparison};
    const double vw = c.v.values[c.witness_node], pw = eig.phi.values[c.witness_node];
    double max_excess = -std::numeric_limits<double>::infinity();  // max over ball of phi - v
    for (auto i : eig.ball_nodes) max_excess = std::max(max_excess, eig.phi.values[i] - c.v.values[i]);
    rep.data["M"] = c.M;
    rep.data["witness"] = point_json(c.witness);
    rep.data["v_witness"] = vw;
    rep.data["phi_witness"] = pw;
    rep.data["relative_gap"] = std::abs(vw - pw) / std::abs(pw);
    rep.data["max_phi_minus_v"] = max_excess;
    rep.verdict = std::abs(vw - pw) <= 1e-10 * std::abs(pw) && max_excess <= 1e-12 ? Verdict::Consistent
                                                                                    : Verdict::Violated;
    return rep;
}

const char* probe_outcome_name(ProbeOutcome o) {
    switch (o) {
        case ProbeOutcome::Decayed: return "decayed";
        case ProbeOutcome::Grew: return "grew";
        case ProbeOutcome::PositiveSolution: return "positive_solution";
        case ProbeOutcome::Inconclusive: return "inconclusive";
    }
    return "?";
}

std::string ProbeReport::to_json_line() const {
    nlohmann::json j;
    j["probe"] = "nonexistence";
    j["heuristic"] = true;
    j["outcome"] = probe_outcome_name(outcome);
    j["residual"] = solve.residual;
    j["iters"] = solve.iterations;
    j["converged"] = solve.converged;
    j["diverged"] = diverged;
    j["threshold"] = threshold;
    j["first_below_threshold"] = first_below_threshold;
    j["initial_sup"] = solve.sup_history.empty() ? 0.0 : solve.sup_history.front();
    j["final_sup"] = solve.sup_history.empty() ? 0.0 : solve.sup_history.back();
    j["sup_history"] = solve.sup_history;
    return j.dump();
}

ProbeReport probe_nonexistence(const ProblemSpec& spec, const SolveConfig& cfg, const GridFunction& u0,
                               double threshold) {
    ProbeReport rep;
    rep.threshold = threshold;
    try {
        rep.solve = solve_dirichlet(spec, cfg, u0).report;
    } catch (const DivergenceError& e) {
        rep.diverged = true;
        rep.solve.iterations = e.iteration();
        rep.outcome = ProbeOutcome::Grew;
        return rep;
    }
    const auto& hist = rep.solve.sup_history;
    for (std::size_t k = 0; k < hist.size(); ++k)
        if (hist[k] < threshold) {
            rep.first_below_threshold = static_cast<int>(k);
            break;
        }
    if (rep.first_below_threshold >= 0) rep.outcome = ProbeOutcome::Decayed;
    else if (rep.solve.converged) rep.outcome = ProbeOutcome::PositiveSolution;
    else if (!hist.empty() && hist.back() > 10.0 * hist.front()) rep.outcome = ProbeOutcome::Grew;
    else rep.outcome = ProbeOutcome::Inconclusive;
    return rep;
}

} // namespace loglap
