#pragma once

#include <cmath>
#include <map>
#include <numbers>
#include <utility>
#include <vector>

namespace loglap {

// Gauss-Legendre nodes/weights on [-1, 1] via Newton iteration on P_m.
inline std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int m) {
    std::vector<double> x(m), w(m);
    for (int i = 0; i < (m + 1) / 2; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (m + 0.5));
        double dp = 0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1, p1 = z;
            for (int k = 2; k <= m; ++k) {
                const double p2 = ((2 * k - 1) * z * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (m == 1) p0 = 1;
            dp = m * (z * p1 - p0) / (z * z - 1);
            const double dz = p1 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        x[i] = -z;
        x[m - 1 - i] = z;
        w[i] = w[m - 1 - i] = 2 / ((1 - z * z) * dp * dp);
    }
    return {x, w};
}

inline const std::pair<std::vector<double>, std::vector<double>>& gauss_rule(int m) {
    static thread_local std::map<int, std::pair<std::vector<double>, std::vector<double>>> cache;
    auto it = cache.find(m);
    if (it == cache.end()) it = cache.emplace(m, gauss_legendre(m)).first;
    return it->second;
}

// Integral of f over [a, b] with one m-point Gauss-Legendre panel.
template <typename F>
double gauss_panel(F&& f, double a, double b, int m = 20) {
    const auto& rule = gauss_rule(m);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double sum = 0;
    for (int i = 0; i < m; ++i) sum += rule.second[i] * f(mid + half * rule.first[i]);
    return half * sum;
}

// Panels refined geometrically toward the left end point a (ratio 1/2 until
// the first panel is shorter than min_width).
template <typename F>
double gauss_graded_left(F&& f, double a, double b, double min_width, int m = 20) {
    double sum = 0, right = b;
    while (right - a > min_width) {
        const double left = a + 0.5 * (right - a);
        sum += gauss_panel(f, left, right, m);
        right = left;
    }
    return sum + gauss_panel(f, a, right, m);
}

} // namespace loglap
