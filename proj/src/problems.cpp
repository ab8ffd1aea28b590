#include "loglap/problems.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "loglap/errors.hpp"

namespace loglap {

double CoefficientA::operator()(double t) const {
    switch (family) {
        case CoefficientFamily::ShiftedLinear: return t - l;
        case CoefficientFamily::Clamped: return std::min(t - l, c);
        case CoefficientFamily::Constant: return c;
    }
    return 0;
}

std::string CoefficientA::describe() const {
    switch (family) {
        case CoefficientFamily::ShiftedLinear: return "shifted_linear";
        case CoefficientFamily::Clamped: return "clamped:c=" + format_number(c);
        case CoefficientFamily::Constant: return "constant:c0=" + format_number(c);
    }
    return "?";
}

NonlinearityF NonlinearityF::power(double p) {
    if (!(p >= 1)) throw PreconditionError("power nonlinearity requires p >= 1");
    return {NonlinearityFamily::Power, p};
}

double NonlinearityF::operator()(double u) const {
    if (family == NonlinearityFamily::Linear) return u;
    return u > 0 ? std::pow(u, p) : 0.0;
}

double NonlinearityF::derivative(double u) const {
    if (family == NonlinearityFamily::Linear || p == 1) return 1;
    return u > 0 ? p * std::pow(u, p - 1) : 0.0;
}

double NonlinearityF::lipschitz_on(double lo, double hi) const {
    // f' is nondecreasing for p >= 1
    (void)lo;
    return derivative(std::max(hi, 0.0));
}

std::string NonlinearityF::describe() const {
    return family == NonlinearityFamily::Linear ? "linear" : "power:p=" + format_number(p);
}

double lipschitz_quotient(const NonlinearityF& f, double u_val, double u_lam_val, double eps) {
    if (!(u_val > 0) || !(u_lam_val > 0))
        throw PreconditionError("lipschitz_quotient: both values must be positive");
    if (eps < 0) eps = 1e-12 * std::max(1.0, std::abs(u_val));
    const double diff = u_lam_val - u_val;
    if (std::abs(diff) > eps) return std::max(0.0, (f(u_lam_val) - f(u_val)) / diff);
    return f.derivative(u_val);
}

AssumptionReport check_assumptions(const CoefficientA& a, const NonlinearityF& f, double l) {
    AssumptionReport r;
    CoefficientA shifted = a;
    shifted.l = l;

    // every built-in family is nondecreasing; confirm on samples as well
    r.monotone_a = true;
    double prev = shifted(l + 1e-12);
    bool positive = prev > 0;
    for (int i = 1; i <= 4000; ++i) {
        const double v = shifted(l + 1e-3 * i);
        if (v < prev) r.monotone_a = false;
        positive = positive || v > 0;
        prev = v;
    }
    switch (a.family) {
        case CoefficientFamily::ShiftedLinear: r.positive_somewhere = true; break;
        case CoefficientFamily::Clamped: r.positive_somewhere = a.c > 0; break;
        case CoefficientFamily::Constant: r.positive_somewhere = a.c > 0; break;
    }
    r.positive_somewhere = r.positive_somewhere && positive;

    // a(l+h) is bounded as h -> 0 for every family, so a(l+h)/(-ln h) -> 0 (or
    // stays negative for a negative constant); the samples document the trend.
    r.limit_condition = true;
    r.limit_sample_max = -std::numeric_limits<double>::infinity();
    r.limit_samples_decreasing = true;
    for (int e = 2; e <= 10; e += 2) {
        const double h = std::pow(10.0, -e);
        const double q = shifted(l + h) / (-std::log(h));
        if (!r.limit_samples.empty() && q > r.limit_samples.back()) r.limit_samples_decreasing = false;
        r.limit_samples.push_back(q);
        r.limit_sample_max = std::max(r.limit_sample_max, q);
    }

    r.f_ok = f.family == NonlinearityFamily::Linear || f.p >= 1;
    r.a_to_infinity = a.family == CoefficientFamily::ShiftedLinear;
    return r;
}

ProblemSpec::ProblemSpec(Epigraph e, CoefficientA a_, NonlinearityF f_, UniformGrid g)
    : epigraph(e), a(a_), f(f_), grid(std::move(g)), constants(constants_for<double>(grid.dim())) {
    a.l = epigraph.infimum();
    if (domain_nodes().empty()) throw PreconditionError("problem: the grid box does not intersect the domain");
}

std::vector<Eigen::Index> ProblemSpec::domain_nodes() const {
    std::vector<Eigen::Index> nodes;
    for (Eigen::Index i = 0; i < grid.size(); ++i)
        if (in_domain(epigraph, grid.coord(i))) nodes.push_back(i);
    return nodes;
}

GridFunction manufactured_monotone(const Epigraph& e, const UniformGrid& grid, double scale) {
    if (!(scale > 0)) throw PreconditionError("manufactured_monotone: scale must be positive");
    return GridFunction::sample(grid, [&](const Point& x) {
        const double t = x[x.size() - 1] - phi_at(e, x);
        return t > 0 ? scale * smooth_ramp(t) : 0.0;
    });
}

} // namespace loglap
