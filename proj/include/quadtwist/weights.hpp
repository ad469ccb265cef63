#ifndef QUADTWIST_WEIGHTS_HPP
#define QUADTWIST_WEIGHTS_HPP

#include <quadtwist/quadrature.hpp>

#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

namespace quadtwist
{

// C-infinity compactly supported test function: either the bump Psi on [1,2]
// or the plateau W on [delta, 1].
class SmoothWeight
{
public:
    enum class Kind { psi, plateau };

    static SmoothWeight psi();
    static SmoothWeight plateau(double delta);

    Kind kind() const { return kind_; }
    double lower() const { return lo_; }
    double upper() const { return hi_; }
    double delta() const { return delta_; }
    const std::string &certificate() const { return certificate_; }

    double operator()(double x) const;
    double derivative(double x) const;

    // Intervals outside of which the derivative vanishes.
    std::vector<std::pair<double, double>> derivative_support() const;

    // Mellin transform: integral of F(u) u^{s-1} du, by the trapezoid rule in
    // log u (spectrally accurate for compactly supported smooth integrands).
    Complex mellin(Complex s) const;

    // Same transform by adaptive Gauss-Legendre panels.
    Complex mellin_adaptive(Complex s, double abs_tol = 1e-12) const;

    struct TrapezoidLevel;

private:
    SmoothWeight(Kind k, double lo, double hi, double delta, std::string cert);
    const TrapezoidLevel &level_for(double t) const;

    Kind kind_;
    double lo_;
    double hi_;
    double delta_;
    std::string certificate_;
    std::shared_ptr<struct TrapezoidCache> cache_;
};

SmoothWeight make_psi();
SmoothWeight make_w(double delta = 0.1);

// exp(-1/(t(1-t))) on (0,1), else 0.
double bump(double t);
// Integral of the bump over [0,1].
double bump_mass();
// Normalized bump-integral smoothstep on [0,1].
double smoothstep(double t);

// Integral of Psi(u)(cos 2 pi x u + sin 2 pi x u) du by adaptive quadrature.
double tilde_psi(const SmoothWeight &psi, double x);

// Piecewise-Chebyshev interpolant of the cosine and sine parts of tilde_psi for
// the standard Psi, used in inner loops. Zero beyond the tabulated range.
class TildePsiTable
{
public:
    static const TildePsiTable &instance();
    double operator()(double x) const;
    double range() const { return range_; }

private:
    TildePsiTable();
    double eval(const std::vector<double> &coef, double x) const;

    double range_;
    double width_;
    int degree_;
    std::vector<double> cos_coef_;
    std::vector<double> sin_coef_;
};

struct GridOptions
{
    // Largest |log u| the grid will be used to invert at; sets the panel width.
    double log_scale = 0;
    int order = 20;
    std::size_t max_nodes = 4'000'000;
    // Poles of the integrand off the line; panels shrink near them (and their conjugates).
    std::vector<Complex> poles;
};

// Gauss-Legendre nodes on the line Re s = a, truncated at |t| <= T.
// Only t > 0 is stored; F real gives F(a - it) = conj F(a + it).
struct TransformGrid
{
    double a = 0;
    double truncation = 0;
    int panel_order = 0;
    std::vector<double> t;
    std::vector<double> weight;
    std::vector<Complex> value;
};

TransformGrid vertical_line_grid(const SmoothWeight &f, double a, double tail_tol,
                                 const GridOptions &opt = {});

// (1/2 pi i) * integral over the grid line of F(s) h(s) ds.
template <typename H>
Complex line_integral(const TransformGrid &g, H &&h)
{
    Complex acc = 0;
    for (std::size_t i = 0; i < g.t.size(); ++i) {
        Complex s(g.a, g.t[i]);
        acc += g.weight[i] * (g.value[i] * h(s) + std::conj(g.value[i]) * h(std::conj(s)));
    }
    return acc / (2 * pi);
}

// Same, for h with h(conj s) = conj h(s); the result is real.
template <typename H>
double line_integral_real(const TransformGrid &g, H &&h)
{
    double acc = 0;
    for (std::size_t i = 0; i < g.t.size(); ++i) {
        Complex s(g.a, g.t[i]);
        acc += g.weight[i] * (g.value[i] * h(s)).real();
    }
    return acc / pi;
}

} // namespace quadtwist

#endif
