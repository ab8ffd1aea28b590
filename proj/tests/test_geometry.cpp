#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "loglap/errors.hpp"
#include "loglap/geometry.hpp"
#include "loglap/grid.hpp"

using namespace loglap;
using doctest::Approx;

namespace {
Point pt(double a, double b) {
    Point x(2);
    x << a, b;
    return x;
}
}

TEST_CASE("phi_eval per family") {
    Eigen::VectorXd xp(1);
    xp << 2.0;
    CHECK(phi_eval(Epigraph(EpigraphFamily::Paraboloid, 1.0, 0.0), xp) == 4.0);
    xp << -3.0;
    CHECK(phi_eval(Epigraph(EpigraphFamily::Cone, 1.0, 0.0), xp) == 3.0);
    xp << 0.5;
    CHECK(phi_eval(Epigraph(EpigraphFamily::FlatBottom, 1.0, 1.0), xp) == 0.0);
    xp << 3.0;
    CHECK(phi_eval(Epigraph(EpigraphFamily::FlatBottom, 2.0, 1.0), xp) == 4.0);
    CHECK(Epigraph().infimum() == 0.0);
}

TEST_CASE("reflect examples and involution") {
    CHECK(reflect(pt(1.0, 0.5), 1.0).isApprox(pt(1.0, 1.5)));
    CHECK(reflect(reflect(pt(-2, 3), 0.7), 0.7).isApprox(pt(-2, 3)));
    CHECK(reflect(pt(0, 1), 1.0) == pt(0, 1));
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> unif(-10, 10);
    for (int i = 0; i < 1000; ++i) {
        const Point x = pt(unif(rng), unif(rng));
        const double lam = unif(rng);
        const Point back = reflect(reflect(x, lam), lam);
        CHECK(back[0] == x[0]);
        CHECK(std::abs(back[1] - x[1]) <= 4 * std::numeric_limits<double>::epsilon() * (std::abs(x[1]) + std::abs(lam)));
    }
}

TEST_CASE("classify examples on the paraboloid with lambda = 1") {
    const Epigraph e(EpigraphFamily::Paraboloid, 1.0, 0.0);
    CHECK(classify(e, 1.0, pt(0.0, 0.5)) == RegionLabel::H);
    CHECK(classify(e, 1.0, pt(1.0, 0.8)) == RegionLabel::A);
    CHECK(classify(e, 1.0, pt(2.0, 0.5)) == RegionLabel::D);
    CHECK(classify(e, 1.0, pt(0.0, 1.0)) == RegionLabel::Above);
    CHECK(classify(e, 1.0, pt(0.5, 0.25)) == RegionLabel::A);  // on the graph: not in the domain
    CHECK(classify(e, 1.0, pt(1.0, 1.0 - 1e-12)) == RegionLabel::A);
    CHECK(classify(e, 1.0, pt(2.0, -2.0)) == RegionLabel::D);  // on the reflected graph
    CHECK_THROWS_AS(classify(e, 0.0, pt(0, 0)), PreconditionError);
    CHECK(std::string(label_name(RegionLabel::Above)) == "ABOVE");
}

TEST_CASE("kernel_distance_pair examples") {
    auto [d, dr] = kernel_distance_pair(pt(0, 0), pt(0, 0.5), 1.0);
    CHECK(d == Approx(0.5));
    CHECK(dr == Approx(1.5));
    const auto a = kernel_distance_pair(reflect(pt(1, 0), 1.0), pt(0, 0.3), 1.0);
    const auto b = kernel_distance_pair(pt(1, 0), pt(0, 0.3), 1.0);
    CHECK(a.first == Approx(std::sqrt(3.89)));
    CHECK(b.second == Approx(a.first));
    auto [d3, dr3] = kernel_distance_pair(pt(0, 0), pt(3, 1), 1.0);
    CHECK(d3 == Approx(3.1622776602));
    CHECK(dr3 == Approx(3.1622776602));
}

TEST_CASE("reflected distance is strictly larger below the plane") {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> unif(-5, 5);
    for (int i = 0; i < 10000; ++i) {
        const double lam = unif(rng);
        std::uniform_real_distribution<double> below(lam - 6, lam);
        Point x = pt(unif(rng), below(rng)), y = pt(unif(rng), below(rng));
        if (x[1] >= lam || y[1] >= lam) continue;
        const auto [d, dr] = kernel_distance_pair(x, y, lam);
        CHECK(dr > d);
    }
}

TEST_CASE("labels partition the nodes below the plane and agree with membership") {
    for (auto fam : {EpigraphFamily::Paraboloid, EpigraphFamily::Cone, EpigraphFamily::FlatBottom}) {
        const Epigraph e(fam, 0.7, 0.5);
        const double lam = 1.3;
        const UniformGrid g(pt(-3, -2), 0.05, MultiIndex::Constant(2, 101));
        for (Eigen::Index i = 0; i < g.size(); ++i) {
            const Point x = g.coord(i);
            const RegionLabel r = classify(e, lam, x);
            if (x[1] >= lam) {
                CHECK(r == RegionLabel::Above);
                continue;
            }
            CHECK(r != RegionLabel::Above);
            if (r == RegionLabel::H) CHECK(in_domain(e, x));
            if (r == RegionLabel::A) {
                CHECK_FALSE(in_domain(e, x));
                CHECK(in_domain(e, reflect(x, lam)));
            }
            if (r == RegionLabel::D) {
                CHECK_FALSE(in_domain(e, x));
                CHECK_FALSE(in_domain(e, reflect(x, lam)));
            }
        }
    }
}

TEST_CASE("n = 3 classification uses |x'|") {
    const Epigraph e(EpigraphFamily::Cone, 1.0, 0.0);
    Point x(3);
    x << 0.3, 0.4, 0.6;
    CHECK(classify(e, 1.0, x) == RegionLabel::H);
    x << 0.6, 0.8, 0.6;
    CHECK(classify(e, 1.0, x) == RegionLabel::A);
}

TEST_CASE("grid index bijection and node lookup") {
    const UniformGrid g(pt(-1, 2), 0.25, (MultiIndex(2) << 5, 7).finished());
    CHECK(g.size() == 35);
    for (Eigen::Index i = 0; i < g.size(); ++i) {
        CHECK(g.linear_index(g.multi_index(i)) == i);
        CHECK(g.node_at(g.coord(i)).value() == i);
    }
    CHECK(g.multi_index(1)[1] == 1);  // last coordinate runs fastest
    CHECK_FALSE(g.node_at(pt(-0.9, 2)).has_value());
    CHECK(g.contains_ball(pt(-0.5, 2.75), 0.4));
    CHECK_FALSE(g.contains_ball(pt(-0.5, 2.75), 0.5));
}

TEST_CASE("grid function text round trip is idempotent") {
    const UniformGrid g(pt(-1, -1), 0.1, MultiIndex::Constant(2, 21));
    std::mt19937 rng(9);
    std::normal_distribution<double> nd;
    GridFunction u(g);
    for (Eigen::Index i = 0; i < g.size(); ++i) u.values[i] = nd(rng) * std::pow(10.0, i % 7 - 3);
    std::stringstream a;
    write_grid_function(a, u);
    const GridFunction v = read_grid_function(a);
    CHECK(v.grid == g);
    std::stringstream b, c;
    write_grid_function(b, v);
    write_grid_function(c, read_grid_function(b));
    CHECK(b.str() == c.str());
    std::stringstream bad("# n=2 h=0.1 origin=0,0 dims=2,2\n0,0,1\n");
    CHECK_THROWS_AS(read_grid_function(bad), ConfigError);
}
