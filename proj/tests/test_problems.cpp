#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "loglap/errors.hpp"
#include "loglap/problems.hpp"

using namespace loglap;
using doctest::Approx;

TEST_CASE("coefficient families") {
    CHECK(CoefficientA::shifted_linear(0.5)(2.0) == 1.5);
    CHECK(CoefficientA::clamped(1.0)(0.3) == 0.3);
    CHECK(CoefficientA::clamped(1.0)(5.0) == 1.0);
    CHECK(CoefficientA::constant(-2.0)(7.0) == -2.0);
}

TEST_CASE("lipschitz quotient examples") {
    const auto sq = NonlinearityF::power(2.0);
    CHECK(lipschitz_quotient(sq, 1.0, 2.0) == Approx(3.0));
    CHECK(lipschitz_quotient(NonlinearityF::linear(), 0.3, 7.0) == Approx(1.0));
    CHECK(lipschitz_quotient(sq, 1.5, 1.5, 1e-12) == Approx(3.0));
    CHECK_THROWS_AS(lipschitz_quotient(sq, 0.0, 1.0), PreconditionError);
    CHECK_THROWS_AS(lipschitz_quotient(sq, 1.0, -1.0), PreconditionError);
    CHECK_THROWS_AS(NonlinearityF::power(0.5), PreconditionError);
}

TEST_CASE("lipschitz quotient is nonnegative and bounded by the Lipschitz constant") {
    std::mt19937 rng(41);
    std::uniform_real_distribution<double> unif(1e-6, 5.0);
    for (const auto& f : {NonlinearityF::power(1.0), NonlinearityF::power(2.0), NonlinearityF::power(3.5),
                          NonlinearityF::linear()}) {
        for (int i = 0; i < 2000; ++i) {
            const double u = unif(rng), v = unif(rng);
            const double q = lipschitz_quotient(f, u, v);
            CHECK(q >= 0);
            CHECK(q <= f.lipschitz_on(std::min(u, v), std::max(u, v)) * (1 + 1e-12) + 1e-12);
        }
    }
}

TEST_CASE("assumption verdicts for the built-in pairs") {
    const auto sq = NonlinearityF::power(2.0);
    const auto sl = check_assumptions(CoefficientA::shifted_linear(), sq, 0.0);
    CHECK(sl.monotone_a);
    CHECK(sl.positive_somewhere);
    CHECK(sl.limit_condition);
    CHECK(sl.f_ok);
    CHECK(sl.a_to_infinity);
    CHECK(sl.limit_samples.size() == 5);
    CHECK(sl.limit_samples_decreasing);

    const auto cst = check_assumptions(CoefficientA::constant(1.0), sq, 0.0);
    CHECK(cst.limit_condition);
    CHECK_FALSE(cst.a_to_infinity);
    CHECK(cst.monotonicity_hypotheses());
    CHECK_FALSE(cst.nonexistence_hypotheses());

    const auto neg = check_assumptions(CoefficientA::constant(-1.0), sq, 0.0);
    CHECK_FALSE(neg.positive_somewhere);

    const auto cl = check_assumptions(CoefficientA::clamped(1.0), sq, 0.0);
    CHECK(cl.monotonicity_hypotheses());
    CHECK_FALSE(cl.a_to_infinity);

    const auto lin = check_assumptions(CoefficientA::shifted_linear(), NonlinearityF::linear(), 0.0);
    CHECK(lin.nonexistence_hypotheses());
}

TEST_CASE("manufactured monotone fixture") {
    const Epigraph e(EpigraphFamily::Paraboloid, 1.0, 0.0);
    Point origin(2);
    origin << -2, -1;
    const UniformGrid g(origin, 0.5, MultiIndex::Constant(2, 9));
    const GridFunction u = manufactured_monotone(e, g, 1.0);
    auto at = [&](double a, double b) {
        Point x(2);
        x << a, b;
        return u.values[*g.node_at(x)];
    };
    CHECK(at(0, 1) == Approx(0.5));
    CHECK(at(0, 2) == Approx(0.8));
    CHECK(at(1, 1) == 0.0);
    CHECK(at(2, 0) == 0.0);
    for (Eigen::Index i = 0; i < g.size(); ++i) {
        const MultiIndex k = g.multi_index(i);
        MultiIndex up = k;
        ++up[1];
        if (!g.contains(up)) continue;
        if (in_domain(e, g.coord(i))) CHECK(u.values[g.linear_index(up)] > u.values[i]);
        else CHECK(u.values[i] == 0.0);
    }
}

TEST_CASE("problem spec validates the grid") {
    const Epigraph e;
    Point origin(2);
    origin << 10, -5;
    const UniformGrid away(origin, 0.1, MultiIndex::Constant(2, 11));
    CHECK_THROWS_AS(ProblemSpec(e, CoefficientA::clamped(1), NonlinearityF::power(2), away), PreconditionError);
    const UniformGrid ok = UniformGrid::centered(2, 0.1, 1.0);
    const ProblemSpec spec(e, CoefficientA::clamped(1), NonlinearityF::power(2), ok);
    for (auto i : spec.domain_nodes()) CHECK(in_domain(e, ok.coord(i)));
}
