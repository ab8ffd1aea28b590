#pragma once

#include <string>
#include <vector>

#include "loglap/geometry.hpp"
#include "loglap/grid.hpp"
#include "loglap/special_math.hpp"

namespace loglap {

enum class CoefficientFamily { ShiftedLinear, Clamped, Constant };

// a(t) as a function of x_n; l is the infimum of the epigraph profile.
struct CoefficientA {
    CoefficientFamily family = CoefficientFamily::ShiftedLinear;
    double l = 0;
    double c = 1;  // clamp level (Clamped) or constant value c0 (Constant)

    static CoefficientA shifted_linear(double l = 0) { return {CoefficientFamily::ShiftedLinear, l, 0}; }
    static CoefficientA clamped(double c, double l = 0) { return {CoefficientFamily::Clamped, l, c}; }
    static CoefficientA constant(double c0, double l = 0) { return {CoefficientFamily::Constant, l, c0}; }

    double operator()(double t) const;
    std::string describe() const;
};

enum class NonlinearityFamily { Power, Linear };

struct NonlinearityF {
    NonlinearityFamily family = NonlinearityFamily::Linear;
    double p = 1;

    static NonlinearityF power(double p);
    static NonlinearityF linear() { return {NonlinearityFamily::Linear, 1}; }

    double operator()(double u) const;
    double derivative(double u) const;
    // Lipschitz constant on [lo, hi] with 0 <= lo <= hi.
    double lipschitz_on(double lo, double hi) const;
    std::string describe() const;
};

// (f(u_lambda) - f(u)) / (u_lambda - u), or f'(u) when the values coincide
// to within eps (eps < 0 selects 1e-12 * max(1, |u|)).
double lipschitz_quotient(const NonlinearityF& f, double u_val, double u_lam_val, double eps = -1);

struct AssumptionReport {
    bool monotone_a = false;
    bool positive_somewhere = false;
    bool limit_condition = false;  // analytic verdict for lim a(l+h)/(-ln h) <= 0
    bool f_ok = false;
    bool a_to_infinity = false;
    // a(l+h)/(-ln h) for h = 1e-2, 1e-4, ..., 1e-10
    std::vector<double> limit_samples;
    double limit_sample_max = 0;
    bool limit_samples_decreasing = false;

    // Structural conditions under which monotonicity in x_n is expected.
    bool monotonicity_hypotheses() const { return monotone_a && positive_somewhere && limit_condition && f_ok; }
    bool nonexistence_hypotheses() const { return monotonicity_hypotheses() && a_to_infinity; }
};

AssumptionReport check_assumptions(const CoefficientA& a, const NonlinearityF& f, double l);

struct ProblemSpec {
    Epigraph epigraph;
    CoefficientA a;
    NonlinearityF f;
    UniformGrid grid;
    Constants<double> constants;

    ProblemSpec(Epigraph e, CoefficientA a_, NonlinearityF f_, UniformGrid g);

    // Nodes of the grid that lie in Omega.
    std::vector<Eigen::Index> domain_nodes() const;
};

// scale * s((x_n - phi(x'))_+) with s(t) = t^2 / (1 + t^2).
GridFunction manufactured_monotone(const Epigraph& e, const UniformGrid& grid, double scale);

inline double smooth_ramp(double t) { return t * t / (1 + t * t); }

} // namespace loglap
