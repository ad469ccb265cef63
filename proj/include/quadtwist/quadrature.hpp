#ifndef QUADTWIST_QUADRATURE_HPP
#define QUADTWIST_QUADRATURE_HPP

#include <quadtwist/error.hpp>

#include <cmath>
#include <complex>
#include <utility>
#include <vector>

namespace quadtwist
{

using Complex = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846;

// Gauss-Legendre rule on [-1, 1].
struct GaussRule
{
    std::vector<double> x;
    std::vector<double> w;
};

const GaussRule &gauss_legendre(int n);

template <typename F>
auto gl_panel(F &&f, double a, double b, const GaussRule &rule) -> decltype(f(a))
{
    using R = decltype(f(a));
    double h = 0.5 * (b - a);
    double m = 0.5 * (a + b);
    R acc{};
    for (std::size_t i = 0; i < rule.x.size(); ++i) {
        acc += rule.w[i] * f(m + h * rule.x[i]);
    }
    return acc * h;
}

// Panel estimate together with the integral of |f| (roundoff scale).
template <typename F>
auto gl_panel_mag(F &&f, double a, double b, const GaussRule &rule, double &mag) -> decltype(f(a))
{
    using R = decltype(f(a));
    double h = 0.5 * (b - a);
    double m = 0.5 * (a + b);
    R acc{};
    double am = 0;
    for (std::size_t i = 0; i < rule.x.size(); ++i) {
        R v = f(m + h * rule.x[i]);
        acc += rule.w[i] * v;
        am += rule.w[i] * std::abs(v);
    }
    mag += am * std::abs(h);
    return acc * h;
}

struct QuadratureOptions
{
    double abs_tol = 1e-12;
    int initial_panels = 1;
    int order = 20;
    int max_panels = 200000;
};

// Adaptive Gauss-Legendre on [a, b]: a panel is accepted when its estimate
// agrees with the sum over its two halves within its share of abs_tol.
template <typename F>
auto integrate(F &&f, double a, double b, const QuadratureOptions &opt = {}) -> decltype(f(a))
{
    using R = decltype(f(a));
    const GaussRule &rule = gauss_legendre(opt.order);
    R total{};
    if (b == a) {
        return total;
    }
    double len = b - a;
    std::vector<std::pair<double, double>> stack;
    int n0 = std::max(1, opt.initial_panels);
    for (int i = n0 - 1; i >= 0; --i) {
        stack.emplace_back(a + len * i / n0, a + len * (i + 1) / n0);
    }
    int used = 0;
    while (!stack.empty()) {
        auto [lo, hi] = stack.back();
        stack.pop_back();
        double mid = 0.5 * (lo + hi);
        double mag = 0;
        R whole = gl_panel(f, lo, hi, rule);
        R halves = gl_panel_mag(f, lo, mid, rule, mag) + gl_panel_mag(f, mid, hi, rule, mag);
        double share = opt.abs_tol * (hi - lo) / len;
        double diff = std::abs(whole - halves);
        if (diff <= share || diff <= 1e-13 * mag || (hi - lo) < 1e-6 * len) {
            total += halves;
            continue;
        }
        if (++used > opt.max_panels) {
            throw ConvergenceError("adaptive quadrature exceeded panel budget");
        }
        stack.emplace_back(mid, hi);
        stack.emplace_back(lo, mid);
    }
    return total;
}

} // namespace quadtwist

#endif
