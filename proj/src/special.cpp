#include <quadtwist/error.hpp>
#include <quadtwist/special.hpp>

#include <array>
#include <cmath>
#include <sstream>

namespace quadtwist
{

namespace
{

constexpr std::array<double, 9> lanczos = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

// B_{2k} / (2k)!, k = 1..12
constexpr std::array<double, 12> bernoulli_over_factorial = {
    1.0 / 6 / 2,
    -1.0 / 30 / 24,
    1.0 / 42 / 720,
    -1.0 / 30 / 40320,
    5.0 / 66 / 3628800,
    -691.0 / 2730 / 479001600,
    7.0 / 6 / 87178291200.0,
    -3617.0 / 510 / 20922789888000.0,
    43867.0 / 798 / 6402373705728000.0,
    -174611.0 / 330 / 2432902008176640000.0,
    854513.0 / 138 / 1.1240007277776077e21,
    -236364091.0 / 2730 / 6.204484017332394e23};

const double log_two_pi_half = 0.91893853320467274178;

Complex log_gamma_right(Complex z)
{
    z -= 1.0;
    Complex x = lanczos[0];
    for (int i = 1; i < 9; ++i) {
        x += lanczos[i] / (z + static_cast<double>(i));
    }
    Complex t = z + 7.5;
    return log_two_pi_half + (z + 0.5) * std::log(t) - t + std::log(x);
}

// Sum_{n<N} n^{-s} + N^{-s}/2 + Bernoulli tail, without the N^{1-s}/(s-1) term.
Complex em_body(Complex s, int &big_n)
{
    double as = std::abs(s);
    big_n = std::max(20, static_cast<int>(0.7 * as) + 1);
    Complex sum = 0;
    for (int n = 1; n < big_n; ++n) {
        sum += std::exp(-s * std::log(static_cast<double>(n)));
    }
    double ln = std::log(static_cast<double>(big_n));
    Complex npow = std::exp(-s * ln);
    sum += 0.5 * npow;
    Complex rising = s;
    Complex term_pow = npow / static_cast<double>(big_n);
    double inv_n2 = 1.0 / (static_cast<double>(big_n) * big_n);
    for (int k = 0; k < 12; ++k) {
        sum += bernoulli_over_factorial[k] * rising * term_pow;
        rising *= (s + static_cast<double>(2 * k + 1)) * (s + static_cast<double>(2 * k + 2));
        term_pow *= inv_n2;
    }
    return sum;
}

} // namespace

Complex log_gamma(Complex z)
{
    if (z.real() < 0.5) {
        return std::log(pi) - log_sin(pi * z) - log_gamma_right(1.0 - z);
    }
    return log_gamma_right(z);
}

Complex complex_gamma(Complex z)
{
    if (z.imag() == 0 && z.real() <= 0 && z.real() == std::floor(z.real())) {
        throw SingularityError("gamma pole at nonpositive integer");
    }
    return std::exp(log_gamma(z));
}

Complex log_cos(Complex z)
{
    const Complex i(0, 1);
    if (z.imag() > 0) {
        return -i * z + std::log(1.0 + std::exp(2.0 * i * z)) - std::log(2.0);
    }
    return i * z + std::log(1.0 + std::exp(-2.0 * i * z)) - std::log(2.0);
}

Complex log_sin(Complex z)
{
    const Complex i(0, 1);
    if (z.imag() > 0) {
        return -i * z + std::log(1.0 - std::exp(2.0 * i * z)) - std::log(-2.0 * i);
    }
    return i * z + std::log(1.0 - std::exp(-2.0 * i * z)) - std::log(2.0 * i);
}

Complex zeta(Complex s)
{
    if (std::abs(s - 1.0) < pole_radius) {
        std::ostringstream os;
        os << "zeta evaluated within " << pole_radius << " of its pole at s = " << s;
        throw SingularityError(os.str());
    }
    int n = 0;
    Complex body = em_body(s, n);
    return body + std::exp((1.0 - s) * std::log(static_cast<double>(n))) / (s - 1.0);
}

Complex zeta_pole_free(Complex s)
{
    int n = 0;
    Complex body = em_body(s, n);
    return (s - 1.0) * body + std::exp((1.0 - s) * std::log(static_cast<double>(n)));
}

Complex zeta2(Complex s)
{
    return (1.0 - std::exp(-s * std::log(2.0))) * zeta(s);
}

Complex expint_e1(Complex z)
{
    if (!(z.real() > 0) && !(z.real() == 0 && z.imag() != 0)) {
        throw DomainError("E_1 needs Re z > 0");
    }
    constexpr double euler_gamma = 0.57721566490153286061;
    if (std::abs(z) < 2.0) {
        Complex term = 1.0;
        Complex sum = 0;
        for (int n = 1; n < 80; ++n) {
            term *= -z / static_cast<double>(n);
            Complex add = term / static_cast<double>(n);
            sum += add;
            if (std::abs(add) < 1e-17 * std::abs(sum)) {
                break;
            }
        }
        return -euler_gamma - std::log(z) - sum;
    }
    // Modified Lentz on E_1(z) = e^{-z} / (z + 1 - 1/(z + 3 - 4/(z + 5 - ...)))
    const double tiny = 1e-300;
    Complex b = z + 1.0;
    Complex c = 1.0 / tiny;
    Complex d = 1.0 / b;
    Complex h = d;
    for (int i = 1; i < 100000; ++i) {
        double an = -static_cast<double>(i) * i;
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        Complex del = c * d;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) {
            return h * std::exp(-z);
        }
    }
    throw ConvergenceError("E_1 continued fraction did not converge");
}

double riemann_r(double x)
{
    double lx = std::log(x);
    return std::expint(lx) - std::expint(lx / 2) / 2 - std::expint(lx / 3) / 3;
}

} // namespace quadtwist
