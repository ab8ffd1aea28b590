#include "loglap/solver.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include <cmath>

#include "loglap/errors.hpp"

namespace loglap {

SolveResult damped_iteration(const KernelPlan<double>& plan, const std::vector<Eigen::Index>& nodes,
                             const RhsFunction& rhs, const SolveConfig& cfg, const GridFunction& u0) {
    if (!(u0.grid == plan.grid())) throw ContractError("solver: initial guess lives on a different grid");
    if (cfg.max_iter < 0) throw ConfigError("solver: max_iter must be nonnegative");
    const double diag = plan.log_diagonal();
    const double tau = cfg.tau > 0 ? cfg.tau : 0.8 / diag;
    if (!(tau * diag < 2.0))
        throw ConfigError("solver: damping violates the stability bound tau * diag < 2 (tau * diag = " +
                          format_number(tau * diag) + ")");

    SolveResult out{GridFunction(plan.grid()), {}};
    auto& rep = out.report;
    rep.tau = tau;
    const auto m = static_cast<Eigen::Index>(nodes.size());
    Eigen::VectorXd restricted(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        restricted[i] = u0.values[nodes[static_cast<std::size_t>(i)]];
        out.u.values[nodes[static_cast<std::size_t>(i)]] = restricted[i];
    }
    GridFunction& u = out.u;

    for (int k = 0;; ++k) {
        rep.sup_history.push_back(restricted.size() ? restricted.cwiseAbs().maxCoeff() : 0.0);
        const Eigen::VectorXd r = apply_at_nodes(u, plan, nodes, true) - rhs(restricted);
        rep.residual = r.size() ? r.cwiseAbs().maxCoeff() : 0.0;
        rep.residual_history.push_back(rep.residual);
        rep.iterations = k;
        if (!std::isfinite(rep.residual)) throw DivergenceError("solver: non-finite residual", k);
        if (rep.residual <= cfg.tol_residual) {
            rep.converged = true;
            break;
        }
        if (k >= cfg.max_iter) break;
        restricted -= tau * r;
        if (cfg.positivity_projection) restricted = restricted.cwiseMax(0.0);
        if (!restricted.allFinite()) throw DivergenceError("solver: non-finite iterate", k + 1);
        for (Eigen::Index i = 0; i < m; ++i) u.values[nodes[static_cast<std::size_t>(i)]] = restricted[i];
    }
    return out;
}

namespace {

Eigen::VectorXd node_heights(const UniformGrid& grid, const std::vector<Eigen::Index>& nodes) {
    Eigen::VectorXd xn(static_cast<Eigen::Index>(nodes.size()));
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const Point x = grid.coord(nodes[i]);
        xn[static_cast<Eigen::Index>(i)] = x[x.size() - 1];
    }
    return xn;
}

void require_zero_outside(const GridFunction& u, const std::vector<Eigen::Index>& nodes, const char* what) {
    std::vector<char> inside(static_cast<std::size_t>(u.grid.size()), 0);
    for (auto i : nodes) inside[static_cast<std::size_t>(i)] = 1;
    for (Eigen::Index i = 0; i < u.grid.size(); ++i)
        if (!inside[static_cast<std::size_t>(i)] && u.values[i] != 0.0)
            throw PreconditionError(std::string(what) + ": function must vanish outside the domain");
}

} // namespace

SolveResult solve_dirichlet(const ProblemSpec& spec, const SolveConfig& cfg, const GridFunction& u0) {
    if (!(u0.grid == spec.grid)) throw ContractError("solve_dirichlet: initial guess lives on a different grid");
    const auto nodes = spec.domain_nodes();
    require_zero_outside(u0, nodes, "solve_dirichlet");
    if ((u0.values.array() < 0).any()) throw PreconditionError("solve_dirichlet: initial guess must be nonnegative");
    const auto assumptions = check_assumptions(spec.a, spec.f, spec.epigraph.infimum());
    if (!assumptions.monotonicity_hypotheses())
        throw PreconditionError("solve_dirichlet: coefficient/nonlinearity violate the structural assumptions");

    const KernelPlan<double> plan(spec.grid, spec.constants);
    const Eigen::VectorXd a_vals = node_heights(spec.grid, nodes).unaryExpr(
        [&](double t) { return spec.a(t); });
    const auto& f = spec.f;
    RhsFunction rhs = [&](const Eigen::VectorXd& u) {
        return Eigen::VectorXd(a_vals.cwiseProduct(u.unaryExpr([&](double v) { return f(v); })));
    };
    return damped_iteration(plan, nodes, rhs, cfg, u0);
}

SolveResult solve_linear(const KernelPlan<double>& plan, const std::vector<Eigen::Index>& nodes,
                         const Eigen::VectorXd& g, const SolveConfig& cfg, const GridFunction& u0) {
    if (g.size() != static_cast<Eigen::Index>(nodes.size()))
        throw ContractError("solve_linear: right-hand side length does not match node count");
    require_zero_outside(u0, nodes, "solve_linear");
    RhsFunction rhs = [&](const Eigen::VectorXd&) { return g; };
    return damped_iteration(plan, nodes, rhs, cfg, u0);
}

double residual(const GridFunction& u, const ProblemSpec& spec) {
    if (!(u.grid == spec.grid)) throw ContractError("residual: function lives on a different grid");
    const auto nodes = spec.domain_nodes();
    require_zero_outside(u, nodes, "residual");
    const KernelPlan<double> plan(spec.grid, spec.constants);
    const Eigen::VectorXd lu = apply_at_nodes(u, plan, nodes, true);
    double worst = 0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const Point x = spec.grid.coord(nodes[i]);
        const double rhs = spec.a(x[x.size() - 1]) * spec.f(u.values[nodes[i]]);
        worst = std::max(worst, std::abs(lu[static_cast<Eigen::Index>(i)] - rhs));
    }
    return worst;
}

Eigen::MatrixXd assemble_dense(const KernelPlan<double>& plan, const std::vector<Eigen::Index>& nodes,
                               bool include_rho) {
    const auto m = static_cast<Eigen::Index>(nodes.size());
    const auto& grid = plan.grid();
    std::vector<MultiIndex> idx;
    idx.reserve(nodes.size());
    for (auto i : nodes) idx.push_back(grid.multi_index(i));
    Eigen::MatrixXd A(m, m);
    parallel_for(m, [&](Eigen::Index j) {
        for (Eigen::Index i = 0; i < m; ++i)
            A(i, j) = plan.coupling(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)], include_rho);
    });
    return A;
}

std::vector<Eigen::Index> unit_ball_nodes(const UniformGrid& grid, const Point& center) {
    std::vector<Eigen::Index> nodes;
    for (Eigen::Index i = 0; i < grid.size(); ++i)
        if ((grid.coord(i) - center).squaredNorm() < 1.0 - 1e-9) nodes.push_back(i);  // margin keeps |x - c| = 1 out under rounding
    return nodes;
}

UniformGrid ball_grid(int n, double R, double h, int margin_cells) {
    const int half = static_cast<int>(std::ceil(1.0 / h)) + margin_cells;
    Point origin = Point::Constant(n, -half * h);
    origin[n - 1] += std::round(R / h) * h;
    return UniformGrid(origin, h, MultiIndex::Constant(n, 2 * half + 1));
}

EigenPair eigen_smallest(double R, const UniformGrid& grid, const Constants<double>& constants, double tol,
                         int max_iter) {
    const int n = grid.dim();
    if (constants.n != n) throw ContractError("eigen_smallest: constants dimension does not match grid");
    if (!(constants.rho_n > 0))
        throw PreconditionError("eigen_smallest: requires rho_n > 0 (fails for n = 1)");
    Point center = Point::Zero(n);
    center[n - 1] = R;
    if (!grid.contains_ball(center, 1.0)) throw PreconditionError("eigen_smallest: ball is not inside the grid box");

    const KernelPlan<double> plan(grid, constants);
    EigenPair out;
    out.center = center;
    out.ball_nodes = unit_ball_nodes(grid, center);
    const Eigen::MatrixXd A = assemble_dense(plan, out.ball_nodes, true);

    Eigen::LLT<Eigen::MatrixXd> llt(A);
    const bool spd = llt.info() == Eigen::Success;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu;
    if (!spd) lu.compute(A);
    auto solve = [&](const Eigen::VectorXd& b) -> Eigen::VectorXd {
        if (spd) return llt.solve(b);
        return lu.solve(b);
    };

    const auto m = A.rows();
    Eigen::VectorXd x = Eigen::VectorXd::Ones(m) / std::sqrt(double(m));
    for (int it = 1; it <= max_iter; ++it) {
        Eigen::VectorXd y = solve(x);
        x = y / y.norm();
        if (x.sum() < 0) x = -x;
        const Eigen::VectorXd ax = A * x;
        const double lambda = x.dot(ax);
        const double scale = x.cwiseAbs().maxCoeff();
        const double res = (ax - lambda * x).cwiseAbs().maxCoeff() / scale;
        if (!std::isfinite(res)) throw ConvergenceError("eigen_smallest: non-finite iterate");
        if (res <= tol) {
            out.lambda_1 = lambda;
            out.residual = res;
            out.iterations = it;
            out.phi = GridFunction(grid);
            for (Eigen::Index i = 0; i < m; ++i) out.phi.values[out.ball_nodes[static_cast<std::size_t>(i)]] = x[i] / scale;
            return out;
        }
    }
    throw ConvergenceError("eigen_smallest: inverse iteration did not reach the tolerance");
}

} // namespace loglap
