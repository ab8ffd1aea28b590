#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace loglap {

template <typename Scalar>
inline constexpr Scalar euler_gamma = Scalar(0.57721566490153286060651209008240243L);

// Lanczos approximation (g = 7, 9 terms) with reflection below 1/2.
template <typename Scalar>
Scalar gamma_fn(Scalar x) {
    if (!(x > Scalar(0))) throw std::domain_error("gamma_fn: argument must be positive");
    if (x < Scalar(0.5)) {
        const Scalar pi = std::numbers::pi_v<Scalar>;
        return pi / (std::sin(pi * x) * gamma_fn(Scalar(1) - x));
    }
    static constexpr std::array<long double, 9> coeff = {
        0.99999999999980993227684700473478L, 676.520368121885098567009190444019L,
        -1259.13921672240287047156078755283L, 771.3234287776530788486528258894L,
        -176.61502916214059906584551354L,     12.507343278686904814458936853L,
        -0.13857109526572011689554707L,       9.984369578019570859563e-6L,
        1.50563273514931155834e-7L};
    const Scalar z = x - Scalar(1);
    Scalar series = Scalar(coeff[0]);
    for (std::size_t k = 1; k < coeff.size(); ++k) series += Scalar(coeff[k]) / (z + Scalar(k));
    const Scalar t = z + Scalar(7.5);
    return std::sqrt(Scalar(2) * std::numbers::pi_v<Scalar>) * std::pow(t, z + Scalar(0.5)) *
           std::exp(-t) * series;
}

// Upward recurrence to x >= 10, then the Bernoulli asymptotic series.
template <typename Scalar>
Scalar digamma(Scalar x) {
    if (!(x > Scalar(0))) throw std::domain_error("digamma: argument must be positive");
    Scalar shift = 0;
    while (x < Scalar(10)) {
        shift -= Scalar(1) / x;
        x += Scalar(1);
    }
    const Scalar inv2 = Scalar(1) / (x * x);
    // B_2k / (2k) for k = 1..7
    const Scalar tail =
        inv2 * (Scalar(1) / 12 -
        inv2 * (Scalar(1) / 120 -
        inv2 * (Scalar(1) / 252 -
        inv2 * (Scalar(1) / 240 -
        inv2 * (Scalar(1) / 132 -
        inv2 * (Scalar(691) / 32760 -
        inv2 * (Scalar(1) / 12)))))));
    return shift + std::log(x) - Scalar(0.5) / x - tail;
}

template <typename Scalar = double>
struct Constants {
    int n = 0;
    Scalar c_n = 0;          // kernel normalization pi^{-n/2} Gamma(n/2)
    Scalar rho_n = 0;        // zero-order coefficient 2 ln 2 + psi(n/2) - gamma
    Scalar gamma_euler = 0;
    Scalar psi_half_n = 0;
};

// Surface measure of the unit sphere S^{n-1}.
template <typename Scalar>
Scalar unit_sphere_area(int n) {
    const Scalar half_n = Scalar(n) / 2;
    return Scalar(2) * std::pow(std::numbers::pi_v<Scalar>, half_n) / gamma_fn(half_n);
}

template <typename Scalar = double>
Constants<Scalar> constants_for(int n) {
    if (n <= 0) throw std::domain_error("constants_for: dimension must be >= 1");
    const Scalar half_n = Scalar(n) / 2;
    Constants<Scalar> c;
    c.n = n;
    c.gamma_euler = euler_gamma<Scalar>;
    c.psi_half_n = digamma(half_n);
    c.c_n = std::pow(std::numbers::pi_v<Scalar>, -half_n) * gamma_fn(half_n);
    c.rho_n = Scalar(2) * std::numbers::ln2_v<Scalar> + c.psi_half_n - c.gamma_euler;
    return c;
}

} // namespace loglap
