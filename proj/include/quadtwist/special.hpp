#ifndef QUADTWIST_SPECIAL_HPP
#define QUADTWIST_SPECIAL_HPP

#include <quadtwist/quadrature.hpp>

namespace quadtwist
{

// Complex log-gamma (Lanczos g=7, n=9) with reflection for Re z < 1/2.
Complex log_gamma(Complex z);
Complex complex_gamma(Complex z);

// log cos z and log sin z without overflow for large |Im z|.
Complex log_cos(Complex z);
Complex log_sin(Complex z);

// Riemann zeta via Euler-Maclaurin with 12 Bernoulli corrections.
// Throws SingularityError within 1e-8 of s = 1.
Complex zeta(Complex s);

// (s - 1) zeta(s), analytic at s = 1.
Complex zeta_pole_free(Complex s);

// (1 - 2^{-s}) zeta(s)
Complex zeta2(Complex s);

// Exponential integral E_1(z) for Re z > 0 (series near 0, continued fraction beyond).
Complex expint_e1(Complex z);

// Riemann's prime-counting approximation li(x) - li(x^{1/2})/2 - li(x^{1/3})/3.
double riemann_r(double x);

inline constexpr double pole_radius = 1e-8;

} // namespace quadtwist

#endif
