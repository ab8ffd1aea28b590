#pragma once

#include <optional>
#include <string>

#include "loglap/geometry.hpp"
#include "loglap/grid.hpp"
#include "loglap/problems.hpp"
#include "loglap/solver.hpp"

namespace loglap {

struct InitialData {
    enum class Kind { Manufactured, Constant } kind = Kind::Manufactured;
    double value = 1e-3;  // scale for manufactured, level for constant
};

struct SweepConfig {
    double lambda_min = 0;
    double lambda_max = 0;
    double step = 0;
    double tol = 1e-8;
    bool present = false;
};

// Parsed and validated run configuration. Sections: [domain], [grid],
// [problem], [solver], [sweep], [operator].
struct RunConfig {
    Epigraph domain;
    std::optional<UniformGrid> grid;
    CoefficientA a = CoefficientA::clamped(1.0);
    NonlinearityF f = NonlinearityF::power(2.0);
    SolveConfig solver;
    InitialData init;
    SweepConfig sweep;
    double min_box_radius = 0;

    const UniformGrid& require_grid() const;
    ProblemSpec problem() const;
    GridFunction initial_guess() const;
};

// Throws ConfigError naming the offending line on any invalid input.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

CoefficientA parse_coefficient(const std::string& spec);
NonlinearityF parse_nonlinearity(const std::string& spec);

} // namespace loglap
