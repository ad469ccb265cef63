#ifndef QUADTWIST_GK_HPP
#define QUADTWIST_GK_HPP

#include <quadtwist/arith.hpp>

#include <cstdint>
#include <map>
#include <mutex>
#include <tuple>
#include <vector>

namespace quadtwist
{

// G_k(p^mu) from the five-case table; kappa = v_p(k), k = 0 means kappa infinite.
double g_prime_power(std::int64_t k, std::uint64_t p, int mu);

// Multiplicative G_k(m) for odd m.
double g_k(std::int64_t k, std::uint64_t m);

// G_{p^{2k}}(p^m): phi(p^m) if m <= 2k even, p^{2k+1/2} if m = 2k+1, else 0.
double g_square_prime_power(int k, std::uint64_t p, int m);

// Caches prime-power factors keyed by (p, mu, kappa, symbol).
class GkEvaluator
{
public:
    double operator()(std::int64_t k, std::uint64_t m) const;
    // G_r(m) for r = 0..m-1; G_k(m) has period m in k for odd m.
    std::vector<double> row(std::uint64_t m) const;

private:
    double factor(std::int64_t k, std::uint64_t p, int mu) const;

    mutable std::mutex mutex_;
    mutable std::map<std::tuple<std::uint64_t, int, int, int>, double> cache_;
};

struct PoissonCheck
{
    double lhs = 0;
    double rhs = 0;
    double rhs_k0 = 0;
    std::int64_t k_max = 0;
};

struct PoissonKSum
{
    double k0 = 0;
    double total = 0;
    std::int64_t k_max = 0;
};

// sum_k (-1)^k G_k(m) tilde Psi(k x0) with row = GkEvaluator::row(m), octave-adaptive in k.
PoissonKSum poisson_k_sum(const std::vector<double> &row, double x0, std::int64_t k_limit);

// Both sides of the Poisson summation formula for the sieved character sum.
PoissonCheck poisson_check(std::uint64_t big_d, std::uint64_t m, double y, std::int64_t k_limit = 100'000'000);

} // namespace quadtwist

#endif
