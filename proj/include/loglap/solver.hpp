#pragma once

#include <Eigen/Core>

#include <functional>
#include <vector>

#include "loglap/operator.hpp"
#include "loglap/problems.hpp"

namespace loglap {

struct SolveConfig {
    double tau = 0;  // damping; 0 selects 0.8 / (diagonal of the discrete operator)
    double tol_residual = 1e-8;
    int max_iter = 2000;
    bool positivity_projection = true;
};

struct SolveReport {
    double residual = 0;
    int iterations = 0;
    bool converged = false;
    double tau = 0;
    std::vector<double> residual_history;  // before each update
    std::vector<double> sup_history;       // ||u_k||_inf, k = 0..iterations
};

struct SolveResult {
    GridFunction u;
    SolveReport report;
};

// Damped residual iteration u <- u - tau (L_h u - rhs(u)) on the listed nodes,
// u frozen at zero elsewhere. rhs receives the current iterate restricted to
// the nodes and returns the right-hand side at those nodes.
using RhsFunction = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

SolveResult damped_iteration(const KernelPlan<double>& plan, const std::vector<Eigen::Index>& nodes,
                             const RhsFunction& rhs, const SolveConfig& cfg, const GridFunction& u0);

// L_Delta u = a(x_n) f(u) in Omega, u = 0 outside Omega (and outside the box).
SolveResult solve_dirichlet(const ProblemSpec& spec, const SolveConfig& cfg, const GridFunction& u0);

// L_Delta u = g on the listed nodes with a fixed right-hand side.
SolveResult solve_linear(const KernelPlan<double>& plan, const std::vector<Eigen::Index>& nodes,
                         const Eigen::VectorXd& g, const SolveConfig& cfg, const GridFunction& u0);

// ||L_h u - a(x_n) f(u)||_inf over the domain nodes.
double residual(const GridFunction& u, const ProblemSpec& spec);

// Dense matrix of the discrete operator restricted to the listed nodes (zero
// exterior): entry (i, j) is the coupling of node j into row i.
Eigen::MatrixXd assemble_dense(const KernelPlan<double>& plan, const std::vector<Eigen::Index>& nodes,
                               bool include_rho = true);

struct EigenPair {
    double lambda_1 = 0;
    GridFunction phi;  // max value 1, zero off the ball
    double residual = 0;
    int iterations = 0;
    Point center;
    std::vector<Eigen::Index> ball_nodes;
};

// Nodes x with |x - center| < 1.
std::vector<Eigen::Index> unit_ball_nodes(const UniformGrid& grid, const Point& center);

// First Dirichlet eigenpair of L_Delta on B_1(R e_n) by inverse power iteration.
EigenPair eigen_smallest(double R, const UniformGrid& grid, const Constants<double>& constants, double tol,
                         int max_iter = 500);

// Box around B_1(R e_n) with a margin of a few cells, nodes on multiples of h.
UniformGrid ball_grid(int n, double R, double h, int margin_cells = 4);

} // namespace loglap
