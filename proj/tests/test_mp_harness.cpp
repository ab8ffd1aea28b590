#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Eigenvalues>

#include <numbers>
#include <random>

#include "loglap/errors.hpp"
#include "loglap/mp_harness.hpp"

using namespace loglap;
using doctest::Approx;

namespace {

const Epigraph kParaboloid(EpigraphFamily::Paraboloid, 1.0, 0.0);

UniformGrid box(double lo1, double lo2, int d1, int d2, double h = 0.1) {
    Point origin(2);
    origin << lo1, lo2;
    MultiIndex dims(2);
    dims << d1, d2;
    return UniformGrid(origin, h, dims);
}

Point pt(double a, double b) {
    Point x(2);
    x << a, b;
    return x;
}

double plateau_profile(double t) {
    if (t <= 0) return 0;
    if (t <= 0.5) return smooth_ramp(t);
    if (t <= 2.5) return smooth_ramp(0.5);
    return smooth_ramp(0.5) + smooth_ramp(t - 2.5);
}

// Increasing in x_n except for a steep decrease on [1.5, 1.7].
double reversal_profile(double t) {
    if (t <= 1.5) return t;
    if (t <= 1.7) return 1.5 - 3 * (t - 1.5);
    return 0.9 + (t - 1.7);
}

} // namespace

TEST_CASE("w_lambda: increasing profile, antisymmetry and D-region zeros") {
    const UniformGrid g = box(-3, -3, 61, 61);
    const GridFunction height = GridFunction::sample(g, [](const Point& x) { return std::exp(x[1] / 4); });
    const GridFunction u = manufactured_monotone(kParaboloid, g, 1.0);
    for (double lam : {0.05, 0.5, 0.75, 1.0}) {
        const GridFunction w_up = w_lambda(height, lam, kParaboloid);
        const GridFunction w = w_lambda(u, lam, kParaboloid);
        for (Eigen::Index i = 0; i < g.size(); ++i) {
            const Point x = g.coord(i);
            const Point xr = reflect(x, lam);
            const auto j = g.node_at(xr);
            if (x[1] < lam && j) CHECK(w_up.values[i] >= 0);
            if (j) CHECK(w.values[i] + w.values[*j] == 0.0);
            if (x[1] < lam && classify(kParaboloid, lam, x) == RegionLabel::D) CHECK(w.values[i] == 0.0);
        }
    }
    CHECK_THROWS_AS(w_lambda(u, 0.53, kParaboloid), PreconditionError);
}

TEST_CASE("compatible lambdas are half-cell multiples") {
    const UniformGrid g = box(-3, -3, 61, 61);
    const auto lams = compatible_lambdas(g, 0.12, 0.5, 0.1);
    REQUIRE(lams.size() == 4);
    CHECK(lams.front() == Approx(0.15));
    CHECK(lams.back() == Approx(0.45));
    for (double l : lams) CHECK(reflection_compatible(g, l));
}

TEST_CASE("sweep on the monotone fixture is true, an implanted dip is found") {
    const UniformGrid g = box(-4, -4, 81, 81);
    const GridFunction u = manufactured_monotone(kParaboloid, g, 1.0);
    const auto lams = compatible_lambdas(g, 0.05, 2.0, 0.05);
    const SweepReport rep = sweep_monotonicity(u, kParaboloid, lams);
    CHECK(rep.verdict);
    CHECK(rep.skipped[0]);  // no domain node lies strictly between 0 and 0.05
    for (std::size_t i = 0; i < lams.size(); ++i) {
        if (rep.skipped[i]) continue;
        CHECK(rep.min_w[i] >= 0);
        CHECK(rep.reflection_in_box[i]);
        const auto& [nh, na, nd] = rep.region_counts[i];
        CHECK(nh > 0);
        CHECK(na + nd > 0);
    }
    CHECK_FALSE(rep.first_failure().has_value());

    GridFunction dip = u;
    for (Eigen::Index i = 0; i < g.size(); ++i)
        dip.values[i] -= 0.3 * std::exp(-(g.coord(i) - pt(0.5, 2.5)).squaredNorm() / 0.05);
    const SweepReport bad = sweep_monotonicity(dip, kParaboloid, lams);
    CHECK_FALSE(bad.verdict);
    REQUIRE(bad.first_failure().has_value());
    for (std::size_t i = 0; i < lams.size(); ++i)
        if (!bad.skipped[i] && bad.min_w[i] < bad.threshold) CHECK(std::abs(bad.argmin[i][0] - 0.5) <= 0.3);
}

TEST_CASE("constant-in-x_n data gives zero minima") {
    const UniformGrid g = box(-4, -4, 81, 81);
    const GridFunction u = GridFunction::sample(g, [](const Point& x) { return in_domain(kParaboloid, x) ? 1.0 : 0.0; });
    const SweepReport rep = sweep_monotonicity(u, kParaboloid, compatible_lambdas(g, 0.15, 2.0, 0.25));
    CHECK(rep.verdict);
    for (double m : rep.min_w) CHECK(m == 0.0);
}

TEST_CASE("sweep verdict is monotone in the tolerance") {
    const UniformGrid g = box(-3, -3, 61, 61);
    std::mt19937 rng(77);
    std::normal_distribution<double> nd(0, 0.02);
    const auto lams = compatible_lambdas(g, 0.15, 1.5, 0.1);
    for (int t = 0; t < 5; ++t) {
        GridFunction u = manufactured_monotone(kParaboloid, g, 1.0);
        for (auto& v : u.values) v += nd(rng);
        bool seen_true = false;
        for (double tol : {0.0, 1e-3, 1e-2, 0.05, 0.1, 0.2, 0.5}) {
            const bool v = sweep_monotonicity(u, kParaboloid, lams, tol).verdict;
            if (seen_true) CHECK(v);
            seen_true = seen_true || v;
        }
        CHECK(seen_true);
    }
}

TEST_CASE("sweep rejects planes at or below the infimum") {
    const UniformGrid g = box(-3, -3, 61, 61);
    const GridFunction u = manufactured_monotone(kParaboloid, g, 1.0);
    CHECK_THROWS_AS(sweep_monotonicity(u, kParaboloid, {0.0}), PreconditionError);
    CHECK_THROWS_AS(sweep_monotonicity(u, kParaboloid, {0.52}), PreconditionError);
}

TEST_CASE("antisymmetric maximum principle at an interior zero") {
    const UniformGrid g = box(-4, -1, 81, 61);
    const ProblemSpec spec(kParaboloid, CoefficientA::clamped(1.0), NonlinearityF::power(2.0), g);
    const KernelPlan<double> plan(g, spec.constants);
    const GridFunction u = GridFunction::sample(g, [](const Point& x) { return plateau_profile(x[1] - phi_at(kParaboloid, x)); });
    const DiagnosticsReport rep = antisym_mp_check(u, 1.5, spec, plan);
    CHECK(rep.verdict == Verdict::Consistent);
    CHECK(rep.data["interior_zero"].get<bool>());
    CHECK(rep.data["log_laplacian_w"].get<double>() < -1e-6);

    SUBCASE("strictly positive w is vacuously consistent") {
        const GridFunction m = manufactured_monotone(kParaboloid, g, 1.0);
        const DiagnosticsReport r = antisym_mp_check(m, 1.5, spec, plan);
        CHECK(r.verdict == Verdict::Consistent);
        CHECK_FALSE(r.data["interior_zero"].get<bool>());
    }
    SUBCASE("negative w on A is a precondition failure") {
        GridFunction m = manufactured_monotone(kParaboloid, g, 1.0);
        m.values[*g.node_at(pt(1.5, 0.5))] = 5.0;  // A-node at lambda = 1.5
        CHECK(classify(kParaboloid, 1.5, pt(1.5, 0.5)) == RegionLabel::A);
        CHECK(antisym_mp_check(m, 1.5, spec, plan).verdict == Verdict::PreconditionUnmet);
    }
}

TEST_CASE("boundary quotient diagnostics") {
    const UniformGrid g = box(-2, -1, 41, 51);
    const KernelPlan<double> plan(g, constants_for<double>(2));
    const GridFunction m = manufactured_monotone(kParaboloid, g, 1.0);
    CHECK(boundary_quotient(m, kParaboloid, 0.5, 4, plan).verdict == Verdict::PreconditionUnmet);
    const DiagnosticsReport empty = boundary_quotient(m, kParaboloid, 0.5, 0, plan);
    CHECK(empty.verdict == Verdict::PreconditionUnmet);
    CHECK(empty.data["records"].empty());

    const GridFunction u = GridFunction::sample(g, [](const Point& x) {
        return in_domain(kParaboloid, x) ? reversal_profile(x[1]) : 0.0;
    });
    const DiagnosticsReport rep = boundary_quotient(u, kParaboloid, 1.1, 6, plan);
    CHECK(rep.verdict == Verdict::Consistent);
    int negatives = 0;
    for (const auto& rec : rep.data["records"]) {
        if (!rec["negative_min"].get<bool>()) continue;
        ++negatives;
        CHECK(rec["quotient"].get<double>() < 0);
        CHECK(rec["delta"].get<double>() > 0);
    }
    CHECK(negatives >= 2);
}

TEST_CASE("volume identity") {
    const Point c = pt(0, 3);
    const VolumeIdentity same = volume_identity(c, c);
    CHECK(same.ball_x0_minus_a == 0.0);
    CHECK(same.ball_center_minus_a == 0.0);
    CHECK(same.agree);
    const VolumeIdentity off = volume_identity(pt(0.3, 2.6), c);
    CHECK(off.agree);
    // lens area of two unit discs at distance d: 2 acos(d/2) - (d/2) sqrt(4 - d^2)
    const double d = 0.5;
    const double lens = 2 * std::acos(d / 2) - 0.5 * d * std::sqrt(4 - d * d);
    CHECK(off.ball_x0_minus_a == Approx(std::numbers::pi - lens).epsilon(1e-6));
    Point c3(3), x3(3);
    c3 << 0, 0, 3;
    x3 << 0.2, 0.1, 2.7;
    CHECK(volume_identity(x3, c3).agree);
    CHECK_THROWS_AS(volume_identity(pt(0, 5), c), PreconditionError);
}

TEST_CASE("ball maximum principle and comparison construction") {
    const auto c = constants_for<double>(2);
    const UniformGrid g = ball_grid(2, 3.0, 0.1, 2);
    const KernelPlan<double> plan(g, c);
    const EigenPair eig = eigen_smallest(3.0, g, c, 1e-10);

    SUBCASE("u = phi and u = 2 phi") {
        const ComparisonResult same = comparison_construct(eig.phi, eig);
        CHECK(same.M == Approx(1.0));
        CHECK((same.v.values - eig.phi.values).cwiseAbs().maxCoeff() <= 1e-15);
        const ComparisonResult twice = comparison_construct(GridFunction(g, 2 * eig.phi.values), eig);
        CHECK(twice.M == Approx(0.5));
        CHECK((twice.v.values - eig.phi.values).cwiseAbs().maxCoeff() <= 1e-15);
    }
    SUBCASE("phi plus a bump") {
        GridFunction bumped(g, eig.phi.values);
        for (Eigen::Index i = 0; i < g.size(); ++i)
            bumped.values[i] += 0.5 * std::exp(-(g.coord(i) - pt(0.2, 3.1)).squaredNorm() / 0.1);
        const ComparisonResult r = comparison_construct(bumped, eig);
        CHECK(r.M < 1);
        CHECK(r.v.values[r.witness_node] == Approx(eig.phi.values[r.witness_node]).epsilon(1e-10));
        for (auto i : eig.ball_nodes) CHECK(r.v.values[i] >= eig.phi.values[i] * (1 - 1e-12));
        CHECK(comparison_report(r, eig).verdict == Verdict::Consistent);
    }
    SUBCASE("nonpositive u on the ball is rejected") {
        GridFunction bad(g, eig.phi.values);
        bad.values[eig.ball_nodes[3]] = 0.0;
        CHECK_THROWS_AS(comparison_construct(bad, eig), PreconditionError);
    }
    SUBCASE("ball check on a positive supersolution") {
        std::vector<Eigen::Index> all(static_cast<std::size_t>(g.size()));
        for (Eigen::Index i = 0; i < g.size(); ++i) all[static_cast<std::size_t>(i)] = i;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(assemble_dense(plan, all, true));
        REQUIRE(es.eigenvalues()[0] > 0);
        Eigen::VectorXd psi = es.eigenvectors().col(0);
        if (psi.sum() < 0) psi = -psi;
        const DiagnosticsReport rep = ball_mp_check(GridFunction(g, psi), 3.0, plan, c);
        CHECK(rep.verdict == Verdict::Consistent);
        CHECK(rep.data["volume_identity_ok"].get<bool>());
    }
    SUBCASE("v - phi touches zero, so its operator value there is negative") {
        const GridFunction u = GridFunction::sample(g, [](const Point& x) { return 1 + 0.1 * x[1]; });
        const ComparisonResult r = comparison_construct(u, eig);
        const GridFunction diff(g, r.v.values - eig.phi.values);
        CHECK(log_laplacian_at(diff, plan, r.witness_node) < 0);
        CHECK(ball_mp_check(diff, 3.0, plan, c).verdict == Verdict::PreconditionUnmet);
    }
    SUBCASE("ball outside the box or rho_n <= 0 is unmet") {
        const GridFunction one = GridFunction::sample(g, [](const Point&) { return 1.0; });
        CHECK(ball_mp_check(one, 5.0, plan, c).verdict == Verdict::PreconditionUnmet);
        auto c1 = c;
        c1.rho_n = -0.1;
        CHECK(ball_mp_check(one, 3.0, plan, c1).verdict == Verdict::PreconditionUnmet);
    }
}

TEST_CASE("diagnostics serialise to one JSON line") {
    DiagnosticsReport rep{DiagnosticKind::BallMP};
    rep.data["x"] = 1.5;
    const std::string line = rep.to_json_line();
    CHECK(line.find('\n') == std::string::npos);
    const auto j = nlohmann::json::parse(line);
    CHECK(j["kind"] == "ball_mp");
    CHECK(j["verdict"] == "precondition_unmet");
}
