#pragma once

#include <Eigen/Core>

#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include "loglap/errors.hpp"
#include "loglap/grid.hpp"
#include "loglap/parallel.hpp"
#include "loglap/quadrature.hpp"
#include "loglap/special_math.hpp"

namespace loglap {

namespace detail {

// Visit every integer vector k in [-K, K]^n.
template <typename F>
void for_each_lattice_point(int n, int K, F&& f) {
    MultiIndex k = MultiIndex::Constant(n, -K);
    while (true) {
        f(k);
        int d = n - 1;
        while (d >= 0 && k[d] == K) k[d--] = -K;
        if (d < 0) return;
        ++k[d];
    }
}

// Integral of |z|^{2-n} over the unit cell [-1/2, 1/2]^n. The corner
// singularity is removed by self-similarity: the integral over [0, a]^n
// scales like a^2.
inline double unit_cell_moment(int n) {
    if (n == 1) return 0.25;
    if (n == 2) return 1.0;
    double rest = 0;
    const int m = 16;
    const auto& rule = gauss_rule(m);
    // subcubes of [0, 1/2]^n other than [0, 1/4]^n
    for (int mask = 1; mask < (1 << n); ++mask) {
        MultiIndex q = MultiIndex::Zero(n);
        while (true) {
            double w = 1, r2 = 0;
            for (int d = 0; d < n; ++d) {
                const double lo = (mask >> d & 1) ? 0.25 : 0.0;
                const double x = lo + 0.125 * (1 + rule.first[q[d]]);
                w *= 0.125 * rule.second[q[d]];
                r2 += x * x;
            }
            rest += w * std::pow(r2, 0.5 * (2 - n));
            int d = n - 1;
            while (d >= 0 && q[d] == m - 1) q[d--] = 0;
            if (d < 0) break;
            ++q[d];
        }
    }
    return std::pow(2.0, n) * rest / (1.0 - 0.25);
}

} // namespace detail

// Discretization of (-Delta)^L on a uniform grid. Off-diagonal couplings are
// -C_n h^n / |z|^n for every offset z != 0 (near and far field alike); the
// near/far split only enters the diagonal, which carries the u(x) term of the
// near-field integral, the singular-cell correction and a fractional-cell
// correction for lattice cells cut by the unit sphere.
template <typename Scalar = double>
class KernelPlan {
public:
    KernelPlan(BasicGrid<Scalar> grid, Constants<Scalar> constants)
        : grid_(std::move(grid)), constants_(constants) {
        const int n = grid_.dim();
        if (constants_.n != n) throw ContractError("kernel plan: constants dimension does not match grid");
        if (!(grid_.h() < Scalar(0.25))) throw PreconditionError("kernel plan: h must be below 1/4");
        const double h = static_cast<double>(grid_.h());
        const double cn = static_cast<double>(constants_.c_n);

        table_dims_ = (2 * grid_.dims().array() - 1).matrix();
        table_strides_.resize(n);
        Eigen::Index s = 1;
        for (int d = n - 1; d >= 0; --d) {
            table_strides_[d] = s;
            s *= table_dims_[d];
        }
        weights_.assign(static_cast<std::size_t>(s), Scalar(0));
        near_.assign(static_cast<std::size_t>(s), 0);
        for (Eigen::Index t = 0; t < s; ++t) {
            Eigen::Index rem = t;
            double r2 = 0;
            for (int d = 0; d < n; ++d) {
                const Eigen::Index kd = rem / table_strides_[d] - (grid_.dims()[d] - 1);
                rem %= table_strides_[d];
                r2 += double(kd * kd);
            }
            if (r2 == 0) continue;
            const double r = h * std::sqrt(r2);
            weights_[t] = Scalar(cn * std::pow(h / r, n));
            near_[t] = r <= 1.0;
        }
        centre_key_ = 0;
        for (int d = 0; d < n; ++d) centre_key_ += (grid_.dims()[d] - 1) * table_strides_[d];

        // near-field sum over all lattice offsets in B_1, independent of the box
        const int K = static_cast<int>(std::ceil(1.0 / h + std::sqrt(double(n)))) + 1;
        const int sub = n <= 2 ? 32 : (n == 3 ? 8 : 4);
        double near_sum = 0, ring = 0;
        const double half_diag = 0.5 * std::sqrt(double(n)) * h;
        detail::for_each_lattice_point(n, K, [&](const MultiIndex& k) {
            const double r2 = double(k.squaredNorm());
            if (r2 == 0) return;
            const double r = h * std::sqrt(r2);
            const bool inside = r <= 1.0;
            if (inside) near_sum += std::pow(h / r, n);
            if (std::abs(r - 1.0) <= half_diag) ring += straddle_correction(k, h, inside, sub);
        });
        near_diag_ = Scalar(cn * near_sum);
        ring_correction_ = Scalar(cn * ring);
        const double moment = detail::unit_cell_moment(n);
        neighbour_coeff_ = Scalar(cn * moment / (2.0 * n));
        self_diag_ = Scalar(cn * moment);
    }

    const BasicGrid<Scalar>& grid() const { return grid_; }
    const Constants<Scalar>& constants() const { return constants_; }
    Scalar rho_n() const { return constants_.rho_n; }

    // Diagonal of the discrete (-Delta)^L.
    Scalar principal_diagonal() const { return near_diag_ + ring_correction_ + self_diag_; }
    Scalar log_diagonal() const { return principal_diagonal() + constants_.rho_n; }
    Scalar near_diagonal() const { return near_diag_; }
    Scalar ring_correction() const { return ring_correction_; }
    Scalar self_diagonal() const { return self_diag_; }
    // Weight of each of the 2n nearest neighbours from the singular-cell Laplacian.
    Scalar neighbour_coefficient() const { return neighbour_coeff_; }

    // C_n h^n / |z|^n for the offset z = h*k (0 for k = 0); k must fit the box.
    Scalar weight(const MultiIndex& k) const { return weights_[table_index(k)]; }
    bool is_near(const MultiIndex& k) const { return near_[table_index(k)] != 0; }

    // Flattened table access for tight loops: weight at key(target) + key(source).
    Eigen::Index source_key(const MultiIndex& k) const {
        Eigen::Index key = 0;
        for (int d = 0; d < grid_.dim(); ++d) key += k[d] * table_strides_[d];
        return key;
    }
    Eigen::Index target_key(const MultiIndex& k) const { return centre_key_ - source_key(k); }
    Scalar weight_at_key(Eigen::Index key) const { return weights_[static_cast<std::size_t>(key)]; }

    // Full coupling between two grid nodes, as used by the matrix-free apply.
    Scalar coupling(const MultiIndex& target, const MultiIndex& source, bool include_rho) const {
        const MultiIndex k = source - target;
        const int l1 = k.cwiseAbs().sum();
        if (l1 == 0) return include_rho ? log_diagonal() : principal_diagonal();
        Scalar c = -weight(k);
        if (l1 == 1) c -= neighbour_coeff_;
        return c;
    }

private:
    Eigen::Index table_index(const MultiIndex& k) const {
        Eigen::Index t = 0;
        for (int d = 0; d < grid_.dim(); ++d) {
            const Eigen::Index kd = k[d] + grid_.dims()[d] - 1;
            if (kd < 0 || kd >= table_dims_[d]) throw PreconditionError("kernel plan: offset outside the box");
            t += kd * table_strides_[d];
        }
        return t;
    }

    // Signed integral of |y|^{-n} over the part of the cell that the
    // centre-membership rule assigns to the wrong side of the unit sphere.
    static double straddle_correction(const MultiIndex& k, double h, bool centre_inside, int sub) {
        const int n = static_cast<int>(k.size());
        const double hs = h / sub;
        double sum = 0;
        MultiIndex q = MultiIndex::Zero(n);
        while (true) {
            double r2 = 0;
            for (int d = 0; d < n; ++d) {
                const double y = h * (k[d] - 0.5) + hs * (q[d] + 0.5);
                r2 += y * y;
            }
            const bool in_ball = r2 <= 1.0;
            if (in_ball != centre_inside) sum += std::pow(r2, -0.5 * n);
            int d = n - 1;
            while (d >= 0 && q[d] == sub - 1) q[d--] = 0;
            if (d < 0) break;
            ++q[d];
        }
        sum *= std::pow(hs, n);
        return centre_inside ? -sum : sum;
    }

    BasicGrid<Scalar> grid_;
    Constants<Scalar> constants_;
    MultiIndex table_dims_;
    Eigen::Matrix<Eigen::Index, Eigen::Dynamic, 1> table_strides_;
    Eigen::Index centre_key_ = 0;
    std::vector<Scalar> weights_;
    std::vector<unsigned char> near_;
    Scalar near_diag_ = 0, ring_correction_ = 0, self_diag_ = 0, neighbour_coeff_ = 0;
};

namespace detail {

template <typename Scalar>
struct SourceList {
    std::vector<Eigen::Index> keys;
    std::vector<Scalar> values;
};

template <typename Scalar>
SourceList<Scalar> nonzero_sources(const BasicGridFunction<Scalar>& u, const KernelPlan<Scalar>& plan) {
    SourceList<Scalar> s;
    for (Eigen::Index j = 0; j < u.grid.size(); ++j) {
        if (u.values[j] == Scalar(0)) continue;
        s.keys.push_back(plan.source_key(u.grid.multi_index(j)));
        s.values.push_back(u.values[j]);
    }
    return s;
}

template <typename Scalar>
Scalar apply_row(const BasicGridFunction<Scalar>& u, const KernelPlan<Scalar>& plan,
                 const SourceList<Scalar>& src, Eigen::Index node, bool include_rho) {
    const MultiIndex k = u.grid.multi_index(node);
    const Eigen::Index base = plan.target_key(k);
    Scalar far = 0;
    for (std::size_t j = 0; j < src.keys.size(); ++j)
        far += plan.weight_at_key(base + src.keys[j]) * src.values[j];
    Scalar neighbours = 0;
    MultiIndex nb = k;
    for (int d = 0; d < u.grid.dim(); ++d) {
        for (int step : {-1, 1}) {
            nb[d] = k[d] + step;
            neighbours += u.at(nb);
        }
        nb[d] = k[d];
    }
    const Scalar diag = include_rho ? plan.log_diagonal() : plan.principal_diagonal();
    return diag * u.values[node] - far - plan.neighbour_coefficient() * neighbours;
}

template <typename Scalar>
void check_same_grid(const BasicGridFunction<Scalar>& u, const KernelPlan<Scalar>& plan) {
    if (!(u.grid == plan.grid())) throw ContractError("operator: function and plan live on different grids");
}

} // namespace detail

// Discrete (-Delta)^L or L_Delta evaluated at the listed nodes.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> apply_at_nodes(const BasicGridFunction<Scalar>& u,
                                                        const KernelPlan<Scalar>& plan,
                                                        const std::vector<Eigen::Index>& nodes,
                                                        bool include_rho) {
    detail::check_same_grid(u, plan);
    const auto src = detail::nonzero_sources(u, plan);
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> out(static_cast<Eigen::Index>(nodes.size()));
    parallel_for(static_cast<Eigen::Index>(nodes.size()), [&](Eigen::Index i) {
        out[i] = detail::apply_row(u, plan, src, nodes[static_cast<std::size_t>(i)], include_rho);
    });
    return out;
}

template <typename Scalar>
BasicGridFunction<Scalar> apply_principal_part(const BasicGridFunction<Scalar>& u, const KernelPlan<Scalar>& plan) {
    detail::check_same_grid(u, plan);
    const auto src = detail::nonzero_sources(u, plan);
    BasicGridFunction<Scalar> v(u.grid);
    parallel_for(u.grid.size(), [&](Eigen::Index i) { v.values[i] = detail::apply_row(u, plan, src, i, false); });
    return v;
}

template <typename Scalar>
BasicGridFunction<Scalar> apply_log_laplacian(const BasicGridFunction<Scalar>& u, const KernelPlan<Scalar>& plan) {
    detail::check_same_grid(u, plan);
    const auto src = detail::nonzero_sources(u, plan);
    BasicGridFunction<Scalar> v(u.grid);
    parallel_for(u.grid.size(), [&](Eigen::Index i) { v.values[i] = detail::apply_row(u, plan, src, i, true); });
    return v;
}

template <typename Scalar>
Scalar log_laplacian_at(const BasicGridFunction<Scalar>& u, const KernelPlan<Scalar>& plan, Eigen::Index node) {
    return apply_at_nodes(u, plan, {node}, true)[0];
}

// Radial profiles with an analytic Fourier transform. Only the Gaussian
// exp(-|x|^2 / (2 sigma^2)) is supported.
struct GaussianProfile {
    double sigma = 1;

    double operator()(const Point& x) const { return std::exp(-0.5 * x.squaredNorm() / (sigma * sigma)); }
};

// L_Delta u(0) from the symbol 2 ln|xi| with uhat(xi) = (2 pi sigma^2)^{n/2} exp(-sigma^2 |xi|^2 / 2),
// using the inverse transform (2 pi)^{-n} int ... dxi. The radial integral is
// done with the trapezoid rule in t = ln r, where the integrand decays
// double-exponentially at both ends.
inline double fourier_oracle(const GaussianProfile& profile, int n) {
    if (n < 1 || n > 3) throw ContractError("fourier_oracle: dimension must be 1, 2 or 3");
    if (!(profile.sigma > 0)) throw ContractError("fourier_oracle: sigma must be positive");
    const double s2 = profile.sigma * profile.sigma;
    const double t_lo = -80.0 / n, t_hi = std::log(12.0 / profile.sigma);
    const double dt = 1e-3;
    const int steps = static_cast<int>(std::ceil((t_hi - t_lo) / dt));
    const double step = (t_hi - t_lo) / steps;
    double sum = 0;
    for (int i = 0; i <= steps; ++i) {
        const double t = t_lo + i * step, r = std::exp(t);
        const double f = 2.0 * t * std::exp(-0.5 * s2 * r * r) * std::pow(r, n);  // r^{n-1} dr = r^n dt
        sum += (i == 0 || i == steps) ? 0.5 * f : f;
    }
    const double radial = sum * step;
    const double prefactor = unit_sphere_area<double>(n) * std::pow(2.0 * std::numbers::pi * s2, 0.5 * n) /
                             std::pow(2.0 * std::numbers::pi, n);
    return prefactor * radial;
}

// int_H |x - y|^{-n} dy over the slab H = { h/2 < y_n - x_n < 1/4, |y' - x'| < 1/8 } (n = 2).
template <typename Scalar>
double slab_kernel_mass(const PointT<Scalar>& x, double h_param, const KernelPlan<Scalar>& plan) {
    if (plan.grid().dim() != 2 || x.size() != 2) throw PreconditionError("slab_kernel_mass: only n = 2 is supported");
    if (!(h_param > 0 && h_param < 0.25)) throw PreconditionError("slab_kernel_mass: h must lie in (0, 1/4)");
    const double lo = 0.5 * h_param, hi = 0.25, half_width = 0.125;
    auto inner = [&](double s) {
        auto f = [s](double tau) { return 1.0 / (s * s + tau * tau); };
        // width of the kernel peak is ~s; grade panels from tau = 0 outwards
        double total = 0, a = 0, b = std::min(s, half_width);
        while (true) {
            total += gauss_panel(f, a, b);
            if (b >= half_width) break;
            a = b;
            b = std::min(2 * b, half_width);
        }
        return 2.0 * total;
    };
    return gauss_graded_left(inner, lo, hi, lo);
}

// c = int_0^{1/2} |S^{n-2}| t^{n-2} (1 + t^2)^{-n/2} dt, the inner constant of the
// slab lower bound mass(h) >= c (ln(1/4) - ln h).
inline double slab_inner_constant(int n) {
    if (n < 2) throw PreconditionError("slab_inner_constant: n must be >= 2");
    const double area = unit_sphere_area<double>(n - 1);
    auto f = [n, area](double t) { return area * std::pow(t, n - 2) * std::pow(1 + t * t, -0.5 * n); };
    return gauss_panel(f, 0.0, 0.25, 30) + gauss_panel(f, 0.25, 0.5, 30);
}

} // namespace loglap
