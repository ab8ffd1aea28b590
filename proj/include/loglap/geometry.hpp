#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "loglap/grid.hpp"

namespace loglap {

enum class EpigraphFamily { Paraboloid, Cone, FlatBottom };

// Omega = { x : x_n > phi(x') } for one of the parametric coercive profiles.
template <typename Scalar = double>
struct BasicEpigraph {
    EpigraphFamily family = EpigraphFamily::Paraboloid;
    Scalar alpha = 1;
    Scalar r0 = 0;

    BasicEpigraph() = default;
    BasicEpigraph(EpigraphFamily f, Scalar a, Scalar r = 0) : family(f), alpha(a), r0(r) {
        if (!(alpha > Scalar(0))) throw PreconditionError("epigraph: alpha must be positive");
        if (r0 < Scalar(0)) throw PreconditionError("epigraph: r0 must be nonnegative");
    }

    // inf phi, attained at x' = 0 for every built-in family
    Scalar infimum() const { return Scalar(0); }

    // Lipschitz constant of phi on { |x'| <= radius }.
    Scalar lipschitz_constant(Scalar radius) const {
        switch (family) {
            case EpigraphFamily::Paraboloid: return Scalar(2) * alpha * radius;
            case EpigraphFamily::Cone:
            case EpigraphFamily::FlatBottom: return alpha;
        }
        return alpha;
    }
};

using Epigraph = BasicEpigraph<double>;

inline std::string family_name(EpigraphFamily f) {
    switch (f) {
        case EpigraphFamily::Paraboloid: return "paraboloid";
        case EpigraphFamily::Cone: return "cone";
        case EpigraphFamily::FlatBottom: return "flat_bottom";
    }
    return "?";
}

template <typename Scalar, typename Derived>
Scalar phi_eval(const BasicEpigraph<Scalar>& e, const Eigen::MatrixBase<Derived>& xp) {
    const Scalar r = xp.size() ? Scalar(xp.norm()) : Scalar(0);
    switch (e.family) {
        case EpigraphFamily::Paraboloid: return e.alpha * Scalar(xp.squaredNorm());
        case EpigraphFamily::Cone: return e.alpha * r;
        case EpigraphFamily::FlatBottom: return e.alpha * std::max(r - e.r0, Scalar(0));
    }
    return Scalar(0);
}

// phi(x') for a full point x = (x', x_n).
template <typename Scalar, typename Derived>
Scalar phi_at(const BasicEpigraph<Scalar>& e, const Eigen::MatrixBase<Derived>& x) {
    return phi_eval(e, x.head(x.size() - 1));
}

// Boundary points x_n = phi(x') are not in Omega.
template <typename Scalar, typename Derived>
bool in_domain(const BasicEpigraph<Scalar>& e, const Eigen::MatrixBase<Derived>& x) {
    return x[x.size() - 1] > phi_at(e, x);
}

// x^lambda = (x', 2 lambda - x_n)
template <typename Derived>
auto reflect(const Eigen::MatrixBase<Derived>& x, typename Derived::Scalar lambda) {
    using Scalar = typename Derived::Scalar;
    PointT<Scalar> y = x;
    y[y.size() - 1] = Scalar(2) * lambda - x[x.size() - 1];
    return y;
}

// H: Omega below T_lambda; A: reflected-domain part outside Omega; D: rest of
// Sigma_lambda; Above: x_n >= lambda.
enum class RegionLabel { H, A, D, Above };

inline const char* label_name(RegionLabel r) {
    switch (r) {
        case RegionLabel::H: return "H";
        case RegionLabel::A: return "A";
        case RegionLabel::D: return "D";
        case RegionLabel::Above: return "ABOVE";
    }
    return "?";
}

template <typename Scalar, typename Derived>
RegionLabel classify(const BasicEpigraph<Scalar>& e, Scalar lambda, const Eigen::MatrixBase<Derived>& x) {
    if (!(lambda > e.infimum())) throw PreconditionError("classify: lambda must exceed inf phi");
    const Scalar xn = x[x.size() - 1];
    if (xn >= lambda) return RegionLabel::Above;
    const Scalar phi = phi_at(e, x);
    if (xn > phi) return RegionLabel::H;
    if (Scalar(2) * lambda - xn > phi) return RegionLabel::A;  // reflected point lies in the domain
    return RegionLabel::D;
}

// (|x - y|, |x - y^lambda|)
template <typename DerivedX, typename DerivedY>
auto kernel_distance_pair(const Eigen::MatrixBase<DerivedX>& x, const Eigen::MatrixBase<DerivedY>& y,
                          typename DerivedX::Scalar lambda) {
    using Scalar = typename DerivedX::Scalar;
    const Scalar d = (x - y).norm();
    const Scalar d_ref = (x - reflect(y, lambda)).norm();
    return std::pair<Scalar, Scalar>{d, d_ref};
}

} // namespace loglap
