#include <quadtwist/arith.hpp>
#include <quadtwist/gk.hpp>
#include <quadtwist/series.hpp>

#include <cmath>

namespace quadtwist
{

namespace
{

using LongComplex = std::complex<long double>;

std::vector<Complex> prime_powers(const ShiftSet &a, std::uint64_t p)
{
    double lp = std::log(static_cast<double>(p));
    std::vector<Complex> x;
    for (Complex v : a) {
        x.push_back(std::exp(-v * lp));
    }
    return x;
}

std::vector<LongComplex> prime_powers_long(const ShiftSet &a, std::uint64_t p)
{
    long double lp = std::log(static_cast<long double>(p));
    std::vector<LongComplex> x;
    for (Complex v : a) {
        x.push_back(std::exp(-LongComplex(v) * lp));
    }
    return x;
}

FormalSeries<Complex> to_double(const FormalSeries<LongComplex> &f)
{
    FormalSeries<Complex> out(f.order());
    for (int i = 0; i <= f.order(); ++i) {
        out[i] = Complex(f[i]);
    }
    return out;
}

IdentityCheck<Complex> to_double(const IdentityCheck<LongComplex> &c)
{
    return {to_double(c.lhs), to_double(c.rhs), c.residual};
}

void check_prime(std::uint64_t p)
{
    if (p < 3 || !shared_sieve(p).is_prime(p)) {
        throw ParameterError("p must be an odd prime");
    }
}

} // namespace

LocalSequences<Complex> series_T_U(const ShiftSet &a, std::size_t alpha, std::uint64_t p, int n_max)
{
    return series_T_U(prime_powers(a, p), alpha, n_max);
}

IdentityCheck<Complex> verify_identity0(const ShiftSet &a, std::size_t alpha, std::uint64_t p, int m)
{
    check_prime(p);
    return to_double(verify_identity0(prime_powers_long(a, p), alpha, m));
}

IdentityCheck<Complex> verify_identity34(const ShiftSet &a, std::size_t alpha, Complex s, std::uint64_t p, int nu,
                                         int m)
{
    check_prime(p);
    LongComplex sp = std::exp(-LongComplex(s) * std::log(static_cast<long double>(p)));
    return to_double(verify_identity34(prime_powers_long(a, p), alpha, sp, nu, m));
}

std::pair<Complex, Complex> identity34_direct(const ShiftSet &a, std::size_t alpha, Complex s, std::uint64_t p,
                                              int nu, int terms)
{
    check_prime(p);
    if (alpha >= a.size()) {
        throw ParameterError("alpha is not an entry of the shift set");
    }
    double pd = static_cast<double>(p);
    Complex sa = s + a[alpha];
    ShiftSet as = a.shifted(s);
    Complex lhs = 0;
    for (int c = 0; c <= 1; ++c) {
        for (int n = 0; n <= terms; ++n) {
            if (c == 1 && n + nu != 0) {
                continue;
            }
            Complex tau = tau_prime_power(as, p, n);
            for (int k = 0; k <= terms; ++k) {
                double g = g_square_prime_power(k, p, n + nu);
                if (g == 0) {
                    continue;
                }
                Complex e = 2.0 * k * sa + static_cast<double>(c) * (2.0 - 2.0 * sa) + 1.5 * n - static_cast<double>(n) * sa;
                lhs += (c == 1 ? -1.0 : 1.0) * tau * g * std::pow(pd, -e);
            }
        }
    }
    lhs *= std::pow(pd, -(static_cast<double>(nu) - static_cast<double>(nu) * sa))
           * (1.0 - std::pow(pd, -2.0 * sa)) / (1.0 - std::pow(pd, 2.0 * sa - 1.0)) * (1.0 - 1.0 / pd);
    ShiftSet b = as.without(alpha).with(-sa, ShiftOrigin::negated);
    Complex rhs = 0;
    bool odd = nu % 2 == 1;
    for (int n = 0; n <= terms; ++n) {
        double an = n + nu == 0 ? 1.0 : pd / (pd + 1);
        rhs += tau_prime_power(b, p, odd ? 2 * n + 1 : 2 * n) * an * std::pow(pd, -static_cast<double>(n));
    }
    rhs *= 1.0 - 1.0 / (pd * pd);
    if (odd) {
        rhs /= std::sqrt(pd);
    }
    return {lhs, rhs};
}

} // namespace quadtwist
