#pragma once

#include <array>
#include <string>
#include <vector>

#include "json.hpp"
#include "loglap/geometry.hpp"
#include "loglap/operator.hpp"
#include "loglap/problems.hpp"
#include "loglap/solver.hpp"

namespace loglap {

// True when reflection across T_lambda maps grid planes onto grid planes.
bool reflection_compatible(const UniformGrid& grid, double lambda);

// w_lambda(x) = u(x^lambda) - u(x) at every node (zero extension off the box).
GridFunction w_lambda(const GridFunction& u, double lambda, const Epigraph& epigraph);

struct SweepReport {
    std::vector<double> lambdas;
    std::vector<double> min_w;
    std::vector<Point> argmin;
    std::vector<std::array<Eigen::Index, 3>> region_counts;  // |H|, |A|, |D| below T_lambda
    std::vector<char> skipped;             // H_lambda had no nodes
    std::vector<char> reflection_in_box;   // every H node reflects to a box node
    std::vector<char> strict;              // min over H of w_lambda > 0
    double threshold = 0;                  // -tol * ||u||_inf
    bool verdict = false;

    // First lambda whose minimum fell below the threshold, if any.
    std::optional<double> first_failure() const;
};

SweepReport sweep_monotonicity(const GridFunction& u, const Epigraph& epigraph, const std::vector<double>& lambdas,
                               double tol = 1e-8);

// Half-cell lambdas in [lambda_min, lambda_max] stepping by step (rounded to the lattice).
std::vector<double> compatible_lambdas(const UniformGrid& grid, double lambda_min, double lambda_max, double step);

enum class DiagnosticKind { AntisymMP, BoundaryQuotient, BallMP, Comparison };
enum class Verdict { Consistent, Violated, PreconditionUnmet };

const char* kind_name(DiagnosticKind k);
const char* verdict_name(Verdict v);

struct DiagnosticsReport {
    DiagnosticKind kind;
    Verdict verdict = Verdict::PreconditionUnmet;
    nlohmann::json data = nlohmann::json::object();

    // One JSON-lines record: {"kind":..., "verdict":..., "data":{...}}.
    std::string to_json_line() const;
};

// Negative-tolerance default: tol = 1e-8 * ||u||_inf.
DiagnosticsReport antisym_mp_check(const GridFunction& u, double lambda, const ProblemSpec& spec,
                                   const KernelPlan<double>& plan, double tol = -1);

DiagnosticsReport boundary_quotient(const GridFunction& u, const Epigraph& epigraph, double lambda0, int k_max,
                                    const KernelPlan<double>& plan, double tol = -1);

struct VolumeIdentity {
    double ball_x0_minus_a = 0;     // |B_1(x0) \ A|
    double ball_center_minus_a = 0; // |B_1(R e_n) \ A|
    double kernel_difference = 0;   // int_{B_1(x0)\A} |x0-y|^{-n} - int_{B_1(Re_n)\A} |x0-y|^{-n}
    bool agree = false;             // equal within 1% relative (or both exactly zero)
};

// A = B_1(x0) cap B_1(center); x0 must lie in B_1(center).
VolumeIdentity volume_identity(const Point& x0, const Point& center);

DiagnosticsReport ball_mp_check(const GridFunction& u, double R, const KernelPlan<double>& plan,
                                const Constants<double>& constants, double tol = -1);

struct ComparisonResult {
    GridFunction v;
    double M = 0;
    Point witness;
    Eigen::Index witness_node = -1;
};

// v = M u with M = max over ball nodes of phi / u.
ComparisonResult comparison_construct(const GridFunction& u, const EigenPair& eig);

DiagnosticsReport comparison_report(const ComparisonResult& c, const EigenPair& eig);

enum class ProbeOutcome { Decayed, Grew, PositiveSolution, Inconclusive };
const char* probe_outcome_name(ProbeOutcome o);

struct ProbeReport {
    ProbeOutcome outcome = ProbeOutcome::Inconclusive;
    SolveReport solve;
    int first_below_threshold = -1;  // iteration where ||u_k|| first dropped below the threshold
    double threshold = 1e-3;
    bool diverged = false;           // non-finite iterate (report.iterations holds the index)
    std::string to_json_line() const;
};

// Heuristic nonexistence probe: run the Dirichlet solver and classify the
// iterate history. Never a proof of nonexistence.
ProbeReport probe_nonexistence(const ProblemSpec& spec, const SolveConfig& cfg, const GridFunction& u0,
                               double threshold = 1e-3);

} // namespace loglap
